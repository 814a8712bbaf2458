import math

import numpy as np
import pytest

from lm05 import individual as ind
from lm05.qudit import basis_matrix, skewed_entropy, weyl_u

HALF_PI = np.pi / 2
D2_THRESHOLD = 0.220523805227  # regression constant, bisection to 1e-10 in theta


def _fourier_survival(V, d, i):
    """||(<i~| x 1) V |i~>||^2 for an explicit isometry V."""
    F = basis_matrix(d, "fourier")
    out = (V @ F[:, i]).reshape(d, d)
    return float(np.linalg.norm(F[:, i].conj() @ out) ** 2)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("theta", [0.0, 0.4, 1.1, HALF_PI])
def test_clone_norm_matches_isometry(d, theta):
    params = ind.CloningParams.equiangular(d, theta)
    V = ind.cloning_isometry(d, theta)
    assert np.allclose(V.conj().T @ V, np.eye(d))
    for i in range(d):
        assert ind.fourier_clone_norm(params, "forward", i) == pytest.approx(
            _fourier_survival(V, d, i), abs=1e-12
        )


def test_clone_norm_with_unequal_angles():
    d = 3
    rng = np.random.default_rng(5)
    theta = rng.uniform(0, 0.6, (d, d))
    theta = (theta + theta.T) / 2
    G = np.cos(theta)
    np.fill_diagonal(G, 1.0)
    lam, vec = np.linalg.eigh(G)
    E = vec @ np.diag(np.sqrt(lam)) @ vec.T
    V = np.zeros((d * d, d))
    for n in range(d):
        V[n * d:(n + 1) * d, n] = E[:, n]
    params = ind.CloningParams(d, theta=theta, theta_back=theta)
    for i in range(d):
        assert ind.fourier_clone_norm(params, "forward", i) == pytest.approx(
            _fourier_survival(V, d, i), abs=1e-12
        )


def test_clone_norm_without_cloning_is_one():
    params = ind.CloningParams(3, F=1.0, theta=0.0)
    assert all(ind.fourier_clone_norm(params, "forward", i) == pytest.approx(1.0) for i in range(3))
    assert ind.detection_probability(params) == pytest.approx(0.0, abs=1e-15)


def test_cloning_params_validation():
    with pytest.raises(ValueError):
        ind.CloningParams(3, F=1.2)
    with pytest.raises(ValueError):
        ind.CloningParams(3, theta=np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        ind.CloningParams.equiangular(3, 2.0)
    with pytest.raises(ValueError):
        ind.fourier_clone_norm(ind.CloningParams(2), "sideways", 0)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("theta", [0.3, 0.9, HALF_PI])
def test_bob_match_probability_from_isometry(d, theta):
    # exact honest-party statistics of a Fourier message round, both passes cloned
    V = ind.cloning_isometry(d, theta)
    F = basis_matrix(d, "fourier")
    hits = 0.0
    for i in range(d):
        for x in range(d):
            fwd = (V @ F[:, i]).reshape(d, d)  # (system, e)
            enc = weyl_u(d, x, x) @ fwd
            # V reshaped as (system out, ancilla, system in)
            full = np.einsum("ths,se->the", V.reshape(d, d, d), enc)
            amp = np.einsum("t,the->he", F[:, (i + x) % d].conj(), full)
            hits += np.sum(np.abs(amp) ** 2)
    p_ab = hits / d**2
    assert p_ab == pytest.approx((1 + (d - 1) * np.cos(theta) ** 2) / d, abs=1e-12)


def test_mutual_information_special_values():
    mi = ind.mutual_informations(2, 0.0)
    assert mi.I_AB == pytest.approx(1.0) and mi.I_AE == pytest.approx(0.0, abs=1e-12)
    mi = ind.mutual_informations(2, HALF_PI)
    assert (mi.I_AB, mi.I_AE, mi.I_BE) == pytest.approx((0.5, 1.0, 0.5), abs=1e-12)
    mi = ind.mutual_informations(3, HALF_PI)
    assert mi.P_AE == pytest.approx(0.5)
    assert mi.I_AE == pytest.approx(math.log2(3) - skewed_entropy(3, 0.5))


def test_key_rate_endpoints():
    assert ind.individual_key_rate(2, 0.0).r == pytest.approx(1.0, abs=1e-10)
    assert ind.individual_key_rate(2, HALF_PI).r == pytest.approx(0.0, abs=1e-10)
    pt = ind.individual_key_rate(3, HALF_PI)
    assert pt.r == pytest.approx(0.75, abs=1e-10)
    assert pt.r_reg == pytest.approx(0.75 / math.log2(3), abs=1e-10)


def test_eve_never_beats_bob_on_the_angle_range():
    for d in (2, 3, 4, 7):
        for t in np.linspace(0, HALF_PI, 41):
            mi = ind.mutual_informations(d, t)
            assert mi.I_BE <= mi.I_AB + 1e-12


def test_threshold_d2_regression_and_bracket():
    res = ind.detection_threshold(2)
    assert res.crossed and not res.at_boundary
    assert 0.0 < res.pdet_min < 0.375
    assert res.pdet_min == pytest.approx(D2_THRESHOLD, abs=1e-9)
    mi = ind.mutual_informations(2, res.theta)
    assert mi.I_AB == pytest.approx(mi.I_AE, abs=1e-8)


@pytest.mark.parametrize("d", [3, 4, 7])
def test_threshold_without_crossing_reports_range_end(d):
    # I_AB - I_AE at pi/2 equals H_d(1/(d-1)) - log2(d)/2 > 0 for d >= 3
    gap = skewed_entropy(d, 1 / (d - 1)) - 0.5 * math.log2(d)
    assert gap > 0
    res = ind.detection_threshold(d)
    assert not res.crossed
    assert res.pdet_min == pytest.approx((d * d - 1) / (2 * d * d))


def test_ensembles_qubit_table():
    t = ind.eve_ensembles(2)
    assert t.ensembles[0] == [((0, 0), (0, 0)), ((1, 1), (1, 1))]
    assert t.ensembles[1] == [((0, 0), (1, 1)), ((1, 1), (0, 0))]


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_ensembles_disjoint_with_d_members(d):
    t = ind.eve_ensembles(d)
    assert t.is_disjoint()
    assert all(len(v) == d for v in t.ensembles.values())


@pytest.mark.parametrize("d", [2, 4, 6])
def test_ancilla_overlaps(d):
    theta = 0.8
    E = ind.ancilla_states(d, theta)
    G = E.T @ E
    assert np.allclose(np.diag(G), 1.0)
    off = ~np.eye(d, dtype=bool)
    assert np.allclose(G[off], np.cos(theta))
