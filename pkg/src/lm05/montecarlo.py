"""Round-by-round Monte-Carlo simulation of the two-way protocol.

Rounds are simulated in fixed-size blocks. Block ``b`` draws from a Philox
generator seeded by ``(seed, b)``, so results are bit-identical for a given
seed whatever the number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import CorrelationMode, check_supported, make_channel, two_way_action
from .collective import error_rates
from .individual import (
    CloningParams,
    ancilla_gram,
    fourier_clone_norm,
    min_detection_probability,
    mutual_informations,
)
from .qudit import basis_matrix, check_dim, mutual_information

BLOCK_SIZE = 4096
MAX_NOISE_DIM = 8
MAX_CLONING_DIM = 7


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    mode: str
    p: float

    @classmethod
    def parse(cls, text):
        """Parse ``kind:mode:p``, e.g. ``dep:ind:0.3``."""
        try:
            kind, mode, p = text.split(":")
            p = float(p)
        except ValueError:
            raise ValueError(f"noise must look like kind:mode:p, got {text!r}") from None
        kind, mode = check_supported(kind, mode)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"noise strength must lie in [0, 1], got {p!r}")
        return cls(kind.value, mode.value, p)


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Exactly one of ``noise`` and ``cloning_theta`` must be set.
    ``encoding='diagonal'`` applies ``U_xx`` as in the original protocol;
    ``'full'`` draws ``U_xy`` and keys on ``x`` (computational) or ``y``
    (Fourier), which is what the purified analysis describes.
    """

    d: int
    rounds: int
    seed: int = 0
    check_prob: float = 0.5
    noise: NoiseSpec = None
    cloning_theta: float = None
    encoding: str = "diagonal"

    def __post_init__(self):
        check_dim(self.d)
        if int(self.rounds) < 1:
            raise ValueError("rounds must be >= 1")
        if not 0.0 <= self.check_prob <= 1.0:
            raise ValueError("check_prob must lie in [0, 1]")
        if (self.noise is None) == (self.cloning_theta is None):
            raise ValueError("configure exactly one of noise and cloning")
        if self.encoding not in ("diagonal", "full"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.noise is not None and self.d > MAX_NOISE_DIM:
            raise ValueError(f"noise simulation supports d <= {MAX_NOISE_DIM}")
        if self.cloning_theta is not None:
            if self.d > MAX_CLONING_DIM:
                raise ValueError(f"cloning simulation supports d <= {MAX_CLONING_DIM}")
            if not 0.0 <= self.cloning_theta <= np.pi / 2 + 1e-12:
                raise ValueError("cloning angle must lie in [0, pi/2]")


@dataclass(frozen=True)
class RoundRecord:
    """One simulated round.

    ``value`` is the encoding dit for message rounds and Alice's measured
    dit for check rounds. ``key`` is ``o + (d - i) mod d`` and is None for
    check rounds.
    """

    basis: int
    prep: int
    mode: str
    value: int
    outcome: int
    key: int = None


def _zeros2():
    return np.zeros(2, dtype=np.int64)


@dataclass
class SimStats:
    """Counts accumulated over all rounds, indexed by the basis of the states.

    Index 0 is the computational basis and index 1 the Fourier basis. For
    message rounds that is Bob's preparation basis. Check rounds count only
    when Alice's check basis equals Bob's; ``check_fwd_errors`` counts
    Alice's outcome differing from Bob's prepared dit, ``check_bwd_errors``
    Bob's outcome differing from the dit Alice sent back, and ``detections``
    either of the two.
    """

    d: int
    rounds: int
    n_message: np.ndarray = field(default_factory=_zeros2)
    message_errors: np.ndarray = field(default_factory=_zeros2)
    n_check: np.ndarray = field(default_factory=_zeros2)
    n_check_discarded: np.ndarray = field(default_factory=_zeros2)
    check_fwd_errors: np.ndarray = field(default_factory=_zeros2)
    check_bwd_errors: np.ndarray = field(default_factory=_zeros2)
    detections: np.ndarray = field(default_factory=_zeros2)
    key_table: np.ndarray = None
    eve_table: np.ndarray = None
    bob_eve_table: np.ndarray = None

    def __post_init__(self):
        shape = (2, self.d, self.d)
        for name in ("key_table", "eve_table", "bob_eve_table"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(shape, dtype=np.int64))

    def merge(self, other):
        for name in ("n_message", "message_errors", "n_check", "n_check_discarded",
                     "check_fwd_errors", "check_bwd_errors", "detections",
                     "key_table", "eve_table", "bob_eve_table"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self

    @property
    def Q_k_hat(self):
        return _ratio(self.message_errors, self.n_message)

    @property
    def P_AB_hat(self):
        return 1.0 - self.Q_k_hat

    @property
    def Q_t_hat(self):
        return _ratio(self.check_fwd_errors, self.n_check)

    @property
    def Q_t_back_hat(self):
        return _ratio(self.check_bwd_errors, self.n_check)

    @property
    def P_det_hat(self):
        return float(_ratio(self.detections.sum(), self.n_check.sum()))

    @property
    def I_AB_hat(self):
        return np.array([mutual_information(t) for t in self.key_table])

    @property
    def I_AE_hat(self):
        return mutual_information(self.eve_table.sum(axis=0))

    @property
    def I_BE_hat(self):
        return mutual_information(self.bob_eve_table.sum(axis=0))

    def stderr(self, name):
        """Binomial standard error of a frequency, from the recorded counts."""
        value, n = {
            "Q_k_hat": (self.Q_k_hat, self.n_message),
            "P_AB_hat": (self.P_AB_hat, self.n_message),
            "Q_t_hat": (self.Q_t_hat, self.n_check),
            "Q_t_back_hat": (self.Q_t_back_hat, self.n_check),
            "P_det_hat": (self.P_det_hat, self.n_check.sum()),
        }[name]
        return np.sqrt(value * (1 - value) / np.maximum(n, 1))


def _ratio(num, den):
    num, den = np.asarray(num, float), np.asarray(den, float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


# --------------------------------------------------------------------------- #
#                               Sampling helpers                              #
# --------------------------------------------------------------------------- #

def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def _sample(probs, u):
    """Categorical draw per row of ``probs`` using uniforms ``u``."""
    cum = np.cumsum(probs, axis=1)
    cum /= cum[:, -1:]
    return np.minimum((u[:, None] > cum).sum(axis=1), probs.shape[1] - 1)


def _encode(psi, x, y, d):
    # U_xy |l> = w^(l y) |l + x>, row-wise with per-round x, y
    l = np.arange(d)
    phase = np.exp(2j * np.pi * ((l[None, :] * y[:, None]) % d) / d)
    out = np.empty_like(psi)
    rows = np.arange(psi.shape[0])[:, None]
    out[rows, (l[None, :] + x[:, None]) % d] = phase * psi
    return out


def _encode_rho(rho, x, y, d):
    n = rho.shape[0]
    U = np.zeros((n, d, d), dtype=complex)
    l = np.arange(d)
    U[np.arange(n)[:, None], (l[None, :] + x[:, None]) % d, l[None, :]] = np.exp(
        2j * np.pi * ((l[None, :] * y[:, None]) % d) / d
    )
    return U @ rho @ U.conj().transpose(0, 2, 1)


def _kraus_step(psi, kraus, u):
    out = np.einsum("kab,nb->nka", kraus, psi)
    probs = np.sum(np.abs(out) ** 2, axis=2)
    branch = _sample(probs, u)
    rows = np.arange(psi.shape[0])
    chosen = out[rows, branch]
    return chosen / np.linalg.norm(chosen, axis=1, keepdims=True), branch


def _measure(psi, bases, which, u):
    """Projective measurement of kets ``psi`` in per-round basis ``which``."""
    amps = np.einsum("nab,na->nb", bases[which].conj(), psi)
    return _sample(np.abs(amps) ** 2, u)


def _measure_rho(rho, bases, which, u):
    B = bases[which]
    probs = np.real(np.einsum("nab,nac,ncb->nb", B.conj(), rho, B))
    return _sample(np.clip(probs, 0.0, None), u)


# --------------------------------------------------------------------------- #
#                                 Block kernels                               #
# --------------------------------------------------------------------------- #

def _draw_protocol(rng, n, d, config):
    # always draw a full block and truncate, so a round's randomness depends
    # only on (seed, block, position) and not on the total round count
    m = BLOCK_SIZE
    theta = rng.integers(0, 2, m)[:n]
    i = rng.integers(0, d, m)[:n]
    check = (rng.random(m) < config.check_prob)[:n]
    x = rng.integers(0, d, m)[:n]
    y = rng.integers(0, d, m)[:n] if config.encoding == "full" else x.copy()
    alice_basis = rng.integers(0, 2, m)[:n]
    uniforms = rng.random((4, m))[:, :n]
    shifts = rng.integers(1, d, m)[:n]
    return theta, i, check, x, y, alice_basis, uniforms, shifts


def _alice_key(theta, x, y):
    return np.where(theta == 0, x, y)


def _tally(stats, d, theta, i, check, key_a, alice_basis, a, o, eve=None):
    msg = ~check
    bob_key = (o - i) % d
    for t in (0, 1):
        m = msg & (theta == t)
        stats.n_message[t] += m.sum()
        stats.message_errors[t] += (bob_key[m] != key_a[m]).sum()
        np.add.at(stats.key_table[t], (key_a[m], bob_key[m]), 1)
        if eve is not None:
            np.add.at(stats.eve_table[t], (key_a[m], eve[m]), 1)
            np.add.at(stats.bob_eve_table[t], (bob_key[m], eve[m]), 1)
        c = check & (theta == t)
        matched = c & (alice_basis == t)
        stats.n_check[t] += matched.sum()
        stats.n_check_discarded[t] += (c & ~matched).sum()
        fwd = a[matched] != i[matched]
        bwd = o[matched] != a[matched]
        stats.check_fwd_errors[t] += fwd.sum()
        stats.check_bwd_errors[t] += bwd.sum()
        stats.detections[t] += (fwd | bwd).sum()


def _noise_block(config, block, n):
    d = config.d
    rng = _block_rng(config.seed, block)
    theta, i, check, x, y, alice_basis, u, _ = _draw_protocol(rng, n, d, config)
    bases = np.stack([basis_matrix(d, "computational"), basis_matrix(d, "fourier")])
    ch = make_channel(config.noise.kind, d, config.noise.p)
    kraus = np.array(ch.kraus)
    correlated = config.noise.mode == CorrelationMode.CORRELATED.value

    psi = bases[theta, :, i]
    psi, branch = _kraus_step(psi, kraus, u[0])

    a = _measure(psi, bases, alice_basis, u[1])
    resent = bases[alice_basis, :, a]
    encoded = _encode(psi, x, y, d)
    psi = np.where(check[:, None], resent, encoded)

    if correlated:
        # Pauli Kraus operators are sqrt(w) W; the backward pass repeats W
        out = np.einsum("nab,nb->na", kraus[branch], psi)
        psi = out / np.linalg.norm(out, axis=1, keepdims=True)
    else:
        psi, _ = _kraus_step(psi, kraus, u[2])

    o = _measure(psi, bases, theta, u[3])
    return dict(theta=theta, i=i, check=check, x=x, y=y, alice_basis=alice_basis, a=a, o=o)


def _cloning_block(config, block, n):
    d = config.d
    rng = _block_rng(config.seed, block)
    theta, i, check, x, y, alice_basis, u, shifts = _draw_protocol(rng, n, d, config)
    bases = np.stack([basis_matrix(d, "computational"), basis_matrix(d, "fourier")])
    # tracing out Eve's ancilla turns each perfect-clone pass into rho -> rho * G
    G = ancilla_gram(d, config.cloning_theta)

    psi = bases[theta, :, i]
    rho = np.einsum("na,nb->nab", psi, psi.conj()) * G

    a = _measure_rho(rho, bases, alice_basis, u[0])
    resent = bases[alice_basis, :, a]
    rho_check = np.einsum("na,nb->nab", resent, resent.conj())
    rho_msg = _encode_rho(rho, x, y, d)
    rho = np.where(check[:, None, None], rho_check, rho_msg) * G

    o = _measure_rho(rho, bases, theta, u[1])

    key_a = _alice_key(theta, x, y)
    p_ae = mutual_informations(d, config.cloning_theta).P_AE
    hit = u[2] < p_ae
    wrong = (key_a + shifts) % d
    eve = np.where(hit, key_a, wrong)

    return dict(theta=theta, i=i, check=check, x=x, y=y, alice_basis=alice_basis, a=a, o=o, eve=eve)


def _block_stats(config, kernel, block, n):
    r = kernel(config, block, n)
    stats = SimStats(config.d, n)
    key_a = _alice_key(r["theta"], r["x"], r["y"])
    _tally(stats, config.d, r["theta"], r["i"], r["check"], key_a, r["alice_basis"],
           r["a"], r["o"], eve=r.get("eve"))
    return stats


def _run(config, kernel, workers):
    n_blocks = -(-config.rounds // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, config.rounds - b * BLOCK_SIZE) for b in range(n_blocks)]
    jobs = list(enumerate(sizes))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _block_stats(config, kernel, *job), jobs))
    else:
        parts = [_block_stats(config, kernel, *job) for job in jobs]
    total = SimStats(config.d, config.rounds)
    for part in parts:
        total.merge(part)
    return total


def run_lm05_noise(config, workers=1):
    """Simulate the protocol with forward and backward Kraus noise."""
    if config.noise is None:
        raise ValueError("run_lm05_noise needs a noise configuration")
    return _run(config, _noise_block, workers)


def run_lm05_cloning(config, workers=1):
    """Simulate the protocol under the equiangular perfect-cloning attack."""
    if config.cloning_theta is None:
        raise ValueError("run_lm05_cloning needs a cloning angle")
    return _run(config, _cloning_block, workers)


def simulate(config, workers=1):
    if config.noise is not None:
        return run_lm05_noise(config, workers)
    return run_lm05_cloning(config, workers)


def round_records(config, block=0):
    """Per-round records of one block, for inspection and debugging."""
    kernel = _noise_block if config.noise is not None else _cloning_block
    start = block * BLOCK_SIZE
    n = min(BLOCK_SIZE, config.rounds - start)
    if n <= 0:
        raise ValueError(f"block {block} is beyond {config.rounds} rounds")
    r = kernel(config, block, n)
    d = config.d
    key_a = _alice_key(r["theta"], r["x"], r["y"])
    out = []
    for k in range(n):
        if r["check"][k]:
            out.append(RoundRecord(int(r["theta"][k]), int(r["i"][k]), "check",
                                   int(r["a"][k]), int(r["o"][k])))
        else:
            key = (int(r["o"][k]) + d - int(r["i"][k])) % d
            out.append(RoundRecord(int(r["theta"][k]), int(r["i"][k]), "message",
                                   int(key_a[k]), int(r["o"][k]), key))
    return out


def exact_message_error(kind, mode, d, p, basis, encoding="diagonal"):
    """Message-round error rate from exact density matrices, averaged over inputs.

    Independent of the sampling code; used where no closed form exists.
    """
    B = basis_matrix(d, "computational" if basis == 0 else "fourier")
    encodings = [(x, x) for x in range(d)] if encoding == "diagonal" else [
        (x, y) for x in range(d) for y in range(d)
    ]
    err = 0.0
    for i in range(d):
        rho = np.outer(B[:, i], B[:, i].conj())
        for x, y in encodings:
            out = two_way_action(kind, mode, d, p, (x, y), rho)
            probs = np.real(np.einsum("ao,ab,bo->o", B.conj(), out, B))
            key = x if basis == 0 else y
            err += 1.0 - probs[(i + key) % d]
    return float(err / (d * len(encodings)))


def closed_form_targets(config):
    """Analytic values of the :class:`SimStats` frequencies, same indexing.

    A check on computational states is the complementary measurement of a
    Fourier-basis run, so ``Q_t_hat[0]`` pairs with the closed-form check
    rate of basis 1 and vice versa.
    """
    d = config.d
    if config.noise is not None:
        nz = config.noise
        rates = error_rates(nz.kind, nz.mode, d, nz.p)
        qt = np.array([rates.Q_t[1], rates.Q_t[0]])
        targets = {"Q_k_hat": np.array(rates.Q_k), "Q_t_hat": qt}
        if rates.kind.is_pauli:
            # Pauli errors do not depend on the input, so the resent state
            # sees the forward rate again; damping skews Alice's outcome
            targets["Q_t_back_hat"] = qt
        return targets
    th = config.cloning_theta
    mi = mutual_informations(d, th)
    # one cloning pass leaves a Fourier check state intact with this probability
    keep = fourier_clone_norm(CloningParams.equiangular(d, th), "forward", 0)
    qt = np.array([0.0, 1.0 - keep])
    return {
        "P_AB_hat": np.array([1.0, mi.P_AB_fourier]),
        "Q_t_hat": qt,
        "Q_t_back_hat": qt,
        "P_det_hat": float(min_detection_probability(d, th)),
    }


def z_scores(stats, targets):
    """``|observed - target| / stderr`` per statistic.

    A zero standard error (e.g. no errors observed) scores 0 if the target
    matches to 1e-12 and infinity otherwise.
    """
    out = {}
    for name, target in targets.items():
        obs = np.atleast_1d(getattr(stats, name))
        se = np.atleast_1d(stats.stderr(name))
        tgt = np.atleast_1d(target)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.abs(obs - tgt) / se
        exact = np.isclose(obs, tgt, rtol=0, atol=1e-12)
        out[name] = np.where(se > 0, z, np.where(exact, 0.0, np.inf))
    return out
