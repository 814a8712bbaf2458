import numpy as np
import pytest

from lm05 import montecarlo as mc
from lm05.individual import min_detection_probability


def _noise(spec, d=3, rounds=20_000, seed=11, **kw):
    return mc.SimConfig(d=d, rounds=rounds, seed=seed, noise=mc.NoiseSpec.parse(spec), **kw)


def test_noise_spec_parsing():
    ns = mc.NoiseSpec.parse("dpf:corr:0.25")
    assert (ns.kind, ns.mode, ns.p) == ("dit-phase-flip", "correlated", 0.25)
    for bad in ("dep:ind", "dep:ind:x", "dep:ind:1.5", "adc:corr:0.1", "foo:ind:0.1"):
        with pytest.raises(ValueError):
            mc.NoiseSpec.parse(bad)


def test_config_validation():
    ns = mc.NoiseSpec.parse("dep:ind:0.1")
    with pytest.raises(ValueError):
        mc.SimConfig(d=3, rounds=10)
    with pytest.raises(ValueError):
        mc.SimConfig(d=3, rounds=10, noise=ns, cloning_theta=0.2)
    with pytest.raises(ValueError):
        mc.SimConfig(d=3, rounds=0, noise=ns)
    with pytest.raises(ValueError):
        mc.SimConfig(d=9, rounds=10, noise=ns)
    with pytest.raises(ValueError):
        mc.SimConfig(d=8, rounds=10, cloning_theta=0.2)
    with pytest.raises(ValueError):
        mc.SimConfig(d=3, rounds=10, noise=ns, check_prob=1.2)
    with pytest.raises(ValueError):
        mc.run_lm05_cloning(mc.SimConfig(d=3, rounds=10, noise=ns))


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_noiseless_rounds_are_error_free(d):
    s = mc.simulate(_noise("dep:ind:0.0", d=d, rounds=10_000))
    assert s.message_errors.sum() == 0 and s.check_fwd_errors.sum() == 0
    assert s.detections.sum() == 0
    assert s.n_message.sum() + s.n_check.sum() + s.n_check_discarded.sum() == 10_000


def test_trivial_cloner_is_invisible():
    s = mc.simulate(mc.SimConfig(d=4, rounds=10_000, seed=3, cloning_theta=0.0))
    assert s.P_det_hat == 0.0
    assert np.all(s.P_AB_hat == 1.0)


def test_bit_identical_across_workers_and_runs():
    cfg = _noise("adc:ind:0.4", rounds=3 * mc.BLOCK_SIZE + 17)
    a, b, c = mc.simulate(cfg), mc.simulate(cfg, workers=4), mc.simulate(cfg)
    for name in ("n_message", "message_errors", "n_check", "check_fwd_errors",
                 "check_bwd_errors", "detections", "key_table"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
        assert np.array_equal(getattr(a, name), getattr(c, name))
    assert a.rounds == cfg.rounds


def test_seed_changes_stream():
    a = mc.simulate(_noise("dep:ind:0.3", seed=1))
    b = mc.simulate(_noise("dep:ind:0.3", seed=2))
    assert not np.array_equal(a.key_table, b.key_table)


def test_prefix_blocks_are_stable():
    # the first block does not depend on how many rounds follow
    short = mc.round_records(_noise("dep:ind:0.3", rounds=100))
    long = mc.round_records(_noise("dep:ind:0.3", rounds=50_000))
    assert short == long[:100]


def test_mismatched_check_bases_are_discarded():
    s = mc.simulate(_noise("dep:ind:0.5", check_prob=1.0))
    assert s.n_message.sum() == 0
    total = s.n_check + s.n_check_discarded
    assert total.sum() == s.rounds
    assert 0.4 < s.n_check.sum() / s.rounds < 0.6


def test_round_records_agree_with_stats():
    cfg = _noise("dpf:ind:0.3", rounds=2000)
    recs = mc.round_records(cfg)
    s = mc.simulate(cfg)
    msgs = [r for r in recs if r.mode == "message"]
    assert len(msgs) == s.n_message.sum()
    assert sum(r.key != r.value for r in msgs) == s.message_errors.sum()
    d = cfg.d
    assert all(r.key == (r.outcome + d - r.prep) % d for r in msgs)
    assert all(r.key is None for r in recs if r.mode == "check")
    with pytest.raises(ValueError):
        mc.round_records(cfg, block=5)


def test_correlated_qubit_phase_flip():
    s = mc.simulate(_noise("dpf:corr:0.5", d=2, rounds=100_000, seed=5))
    assert s.message_errors.sum() == 0
    z = abs(s.Q_t_hat - 0.5) / s.stderr("Q_t_hat")
    assert np.all(z < 4)


def test_stderr_is_binomial():
    s = mc.simulate(_noise("dep:ind:0.3"))
    q, n = s.Q_k_hat, s.n_message
    assert np.allclose(s.stderr("Q_k_hat"), np.sqrt(q * (1 - q) / n))


def test_exact_message_error_helper():
    from lm05.collective import error_rates
    for kind in ("dep", "adc"):
        rates = error_rates(kind, "ind", 3, 0.3)
        for b in (0, 1):
            for enc in ("diagonal", "full"):
                assert mc.exact_message_error(kind, "ind", 3, 0.3, b, enc) == pytest.approx(rates.Q_k[b], abs=1e-12)


def test_cloning_targets():
    cfg = mc.SimConfig(d=2, rounds=10, cloning_theta=np.pi / 2)
    t = mc.closed_form_targets(cfg)
    assert t["P_det_hat"] == pytest.approx(0.375)
    assert t["P_AB_hat"][1] == pytest.approx(0.5)
    assert t["P_det_hat"] == pytest.approx(min_detection_probability(2, np.pi / 2))


def test_z_scores_handle_zero_variance():
    s = mc.simulate(_noise("dep:ind:0.0", rounds=5000))
    z = mc.z_scores(s, {"Q_k_hat": np.array([0.0, 0.0]), "Q_t_hat": np.array([0.1, 0.0])})
    assert np.all(z["Q_k_hat"] == 0)
    assert np.isinf(z["Q_t_hat"][0]) and z["Q_t_hat"][1] == 0


def test_cloning_eve_information_tracks_closed_form():
    from lm05.individual import mutual_informations
    cfg = mc.SimConfig(d=2, rounds=200_000, seed=9, cloning_theta=np.pi / 2)
    s = mc.simulate(cfg)
    mi = mutual_informations(2, np.pi / 2)
    assert s.I_AE_hat == pytest.approx(mi.I_AE, abs=0.01)
    assert s.I_AB_hat[1] == pytest.approx(0.0, abs=0.01)
    assert s.I_AB_hat[0] == pytest.approx(1.0, abs=1e-3)
