"""Purified protocol: coarse-grained measurements, exact statistics and key rates.

Register layout for the purified state is ``A, A'', B, B'`` (all dimension
``d``): A holds the qudit Alice received over the forward channel, A'' her
half of the encoding Bell pair, B the qudit Bob receives over the backward
channel and B' the half of Bob's preparation Bell pair he keeps.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .channels import (
    CorrelationMode,
    NoiseKind,
    check_supported,
    correlated_terms,
    make_channel,
)
from .curves import Curve
from .qudit import (
    basis_matrix,
    bell_basis,
    bell_state,
    check_dim,
    conditional_entropy,
    projector,
    skewed_entropy,
    tensor,
    weyl_u,
)

ORACLE_MAX_DIM = 6
CHECK_ORACLE_MAX_DIM = 64


class PreparationBasis(IntEnum):
    COMPUTATIONAL = 0
    FOURIER = 1

    @property
    def probability(self):
        return 0.5


BASES = (PreparationBasis.COMPUTATIONAL, PreparationBasis.FOURIER)


class InternalConsistencyError(RuntimeError):
    pass


# --------------------------------------------------------------------------- #
#                        Coarse-grained measurements                          #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class LabelledBasis:
    """Orthonormal columns of ``vectors`` grouped by ``labels`` into projectors."""

    vectors: np.ndarray
    labels: np.ndarray
    n_outcomes: int

    def projector(self, k):
        cols = self.vectors[:, self.labels == k]
        return cols @ cols.conj().T

    def projectors(self):
        return [self.projector(k) for k in range(self.n_outcomes)]

    def group(self, probs, axis):
        """Sum fine-grained probabilities along ``axis`` into coarse outcomes."""
        out = np.zeros(probs.shape[:axis] + (self.n_outcomes,) + probs.shape[axis + 1:])
        np.add.at(out, (slice(None),) * axis + (self.labels,), probs)
        return out


def _fourier_conj_basis(d):
    # column i is |(d - i)~>, the state whose conjugate is |i~>
    F = basis_matrix(d, "fourier")
    return F[:, (-np.arange(d)) % d]


def _encoder_basis(d, basis):
    idx = np.arange(d * d)
    x, y = idx // d, idx % d
    return LabelledBasis(bell_basis(d), x if basis == 0 else y, d)


def _decoder_basis(d, basis):
    # column (j, k): B in state j, B' in state k; label is the key dit j - k
    idx = np.arange(d * d)
    j, k = idx // d, idx % d
    if basis == 0:
        vecs = np.eye(d * d, dtype=complex)
    else:
        vecs = np.kron(basis_matrix(d, "fourier"), _fourier_conj_basis(d))
    return LabelledBasis(vecs, (j - k) % d, d)


def _alice_check_basis(d, basis):
    # identity on A, basis measurement on A''; label is the A'' outcome
    idx = np.arange(d * d)
    second = _fourier_conj_basis(d) if basis == 0 else np.eye(d, dtype=complex)
    return LabelledBasis(np.kron(np.eye(d), second), idx % d, d)


def _bob_check_basis(d, basis):
    idx = np.arange(d * d)
    first = basis_matrix(d, "fourier") if basis == 0 else np.eye(d, dtype=complex)
    return LabelledBasis(np.kron(first, np.eye(d)), idx // d, d)


@dataclass(frozen=True)
class CoarseMeasurementSet:
    """Rank-d projector families for one preparation basis.

    ``encoders`` act on A A'', ``decoders`` and ``bob_checkers`` on B B',
    ``alice_checkers`` on A A''. In the computational-basis run the check
    measurements are Fourier-basis ones and vice versa.
    """

    d: int
    basis: PreparationBasis
    encoder_basis: LabelledBasis
    decoder_basis: LabelledBasis
    alice_check_basis: LabelledBasis
    bob_check_basis: LabelledBasis

    @property
    def encoders(self):
        return self.encoder_basis.projectors()

    @property
    def decoders(self):
        return self.decoder_basis.projectors()

    @property
    def alice_checkers(self):
        return self.alice_check_basis.projectors()

    @property
    def bob_checkers(self):
        return self.bob_check_basis.projectors()


def coarse_measurements(d, basis):
    d, basis = check_dim(d), PreparationBasis(basis)
    return CoarseMeasurementSet(
        d,
        basis,
        _encoder_basis(d, basis),
        _decoder_basis(d, basis),
        _alice_check_basis(d, basis),
        _bob_check_basis(d, basis),
    )


def purified_encode(rho, x, y):
    """Encode by a Bell measurement on (A, A'') with |phi+> on (A'', A').

    Returns the post-measurement state of A' rescaled by ``d**2``, which is
    ``U_xy rho U_xy^dagger``.
    """
    rho = np.asarray(rho, dtype=complex)
    d = check_dim(rho.shape[0])
    joint = tensor(rho, projector(bell_state(d, 0, 0)))
    bra = np.kron(bell_state(d, x, y).conj()[None, :], np.eye(d))
    return d**2 * bra @ joint @ bra.conj().T


def gamma_overlap(d, basis, atol=1e-9):
    """Largest ``||sqrt(M(x)) sqrt(N(x'))||^2`` over Bob's decoding and check projectors.

    Both families are projectors, so the square roots drop out. Raises
    :class:`InternalConsistencyError` if the result is not ``1/d``.
    """
    ms = coarse_measurements(d, basis)
    gamma = max(
        np.linalg.norm(M @ N, 2) ** 2 for M in ms.decoders for N in ms.bob_checkers
    )
    if abs(gamma - 1.0 / d) > atol:
        raise InternalConsistencyError(f"overlap {gamma!r} differs from 1/d")
    return float(gamma)


# --------------------------------------------------------------------------- #
#                        Closed-form error rates                              #
# --------------------------------------------------------------------------- #

def f_eff(d):
    """Distinct error outcomes under a correlated Pauli channel: d/2 for even d, d for odd."""
    d = check_dim(d)
    return d // 2 if d % 2 == 0 else d


@dataclass(frozen=True)
class ErrorRates:
    """Message (``Q_k``) and check (``Q_t``) error rates indexed by preparation basis."""

    kind: NoiseKind
    mode: CorrelationMode
    d: int
    p: float
    Q_k: tuple
    Q_t: tuple
    d_eff: int

    @property
    def qder(self):
        return 0.5 * (self.Q_k[0] + self.Q_k[1])


def _adc_message_fourier(d, p):
    s = 1.0 - np.sqrt(1.0 - p)
    return (d - 1) / d**3 * (
        4 * (d - 2) * s + p * ((2 * d * (d - 2) + 4) - (d - 2) ** 2 * p - 4 * (d - 2) * s)
    )


def error_rates(kind, mode, d, p):
    kind, mode = check_supported(kind, mode)
    d = check_dim(d)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength must lie in [0, 1], got {p!r}")
    a = (d - 1) / d
    d_eff = d
    if mode is CorrelationMode.INDEPENDENT:
        if kind is NoiseKind.DEPOLARIZING:
            qk = qk1 = a * p * (2 - p)
            qt = qt1 = a * p
        elif kind is NoiseKind.DIT_PHASE_FLIP:
            qk = qk1 = p * (2 * (d - 1) - d * p) / (d - 1)
            qt = qt1 = p
        else:
            qk, qk1 = a * p * (2 - p), _adc_message_fourier(d, p)
            qt, qt1 = (d - 1) / d**2 * (2 - 2 * np.sqrt(1 - p) + (d - 2) * p), a * p
    else:
        d_eff = f_eff(d)
        b = (d_eff - 1) / d_eff
        if kind is NoiseKind.DEPOLARIZING:
            qk = qk1 = b * p
            qt = qt1 = a * p
        else:
            qk = qk1 = b / a * p
            qt = qt1 = p
    return ErrorRates(kind, mode, d, float(p), (float(qk), float(qk1)), (float(qt), float(qt1)), d_eff)


# --------------------------------------------------------------------------- #
#                          Purified-state oracle                              #
# --------------------------------------------------------------------------- #

def _kraus_pairs(kind, mode, d, p):
    """Yield ``(K_forward, K_backward)`` whose rank-1 terms sum to the two-pass channel."""
    if mode is CorrelationMode.INDEPENDENT:
        ks = make_channel(kind, d, p).kraus
        for K1 in ks:
            for K2 in ks:
                yield K1, K2
    else:
        for w, W in correlated_terms(kind, d, p):
            yield np.sqrt(w) * W, W


def _purified_terms(kind, mode, d, p):
    # amplitude tensor T[a, a'', b, b'] = K1[a, b'] K2[b, a''] / d, reshaped (A A'') x (B B')
    for K1, K2 in _kraus_pairs(kind, mode, d, p):
        yield np.einsum("ae,bc->acbe", K1, K2).reshape(d * d, d * d) / d


@dataclass(frozen=True)
class PurifiedStatistics:
    """Exact joint outcome tables of the purified protocol.

    ``q[x, x']`` is the message-run (kappa) distribution of Alice's and Bob's
    key dits; ``q_check`` the check-run (sigma) distribution.
    """

    d: int
    basis: PreparationBasis
    q: np.ndarray
    q_check: np.ndarray

    @property
    def Q_k(self):
        return float(1.0 - np.trace(self.q))

    @property
    def Q_t(self):
        return float(1.0 - np.trace(self.q_check))

    def message_entropy(self):
        return conditional_entropy(self.q)

    def check_entropy(self):
        return conditional_entropy(self.q_check)


def _table(term_iter, left, right):
    fine = 0.0
    for V in term_iter:
        amp = left.vectors.conj().T @ V @ right.vectors.conj()
        fine = fine + np.abs(amp) ** 2
    return right.group(left.group(fine, 0), 1)


def purified_statistics(kind, mode, d, p, basis):
    """Outcome tables from the full four-register purified state.

    The state is ``|phi+>_{B~B'} (x) |phi+>_{A''A'}`` with the forward
    channel taking B~ to A and the backward channel taking A' to B. In the
    correlated mode both passes share the Weyl error. Limited to
    ``d <= ORACLE_MAX_DIM``.
    """
    kind, mode = check_supported(kind, mode)
    d = check_dim(d)
    if d > ORACLE_MAX_DIM:
        raise ValueError(f"purified oracle is limited to d <= {ORACLE_MAX_DIM}")
    ms = coarse_measurements(d, basis)
    q = _table(_purified_terms(kind, mode, d, p), ms.encoder_basis, ms.decoder_basis)
    qt = _table(_purified_terms(kind, mode, d, p), ms.alice_check_basis, ms.bob_check_basis)
    return PurifiedStatistics(d, ms.basis, q, qt)


def check_statistics(kind, mode, d, p, basis):
    """Check-run table from the backward-pass Choi state alone.

    The check projectors act as identity on A and B', so the sigma statistics
    only see the backward channel applied to ``|phi+>_{A''A'}``. This scales
    to dimensions the four-register oracle cannot reach.
    """
    kind, mode = check_supported(kind, mode)
    d = check_dim(d)
    if d > CHECK_ORACLE_MAX_DIM:
        raise ValueError(f"check oracle is limited to d <= {CHECK_ORACLE_MAX_DIM}")
    basis = PreparationBasis(basis)
    alice = np.eye(d, dtype=complex) if basis else _fourier_conj_basis(d)
    bob = np.eye(d, dtype=complex) if basis else basis_matrix(d, "fourier")
    table = np.zeros((d, d))
    for K in make_channel(kind, d, p).kraus:
        # amplitude[a'', b] = K[b, a''] / sqrt(d)
        amp = alice.conj().T @ K.T @ bob.conj() / np.sqrt(d)
        table += np.abs(amp) ** 2
    return table


# --------------------------------------------------------------------------- #
#                           Entropies and rates                               #
# --------------------------------------------------------------------------- #

def adc_printed_check_entropy(d, Q_t):
    """Closed-form candidate for the amplitude-damping Fourier-run check entropy.

    It does not match the exact value and is kept only for the validation
    report; rates use :func:`check_statistics`.
    """
    a = (d - 1) / d
    b = a - Q_t

    def xlog(v):
        return v * np.log2(v) if v > 0 else 0.0

    return float(-(xlog(Q_t) - xlog(b)) + xlog(a))


def conditional_entropies(kind, mode, d, rates, basis):
    """``(S_kappa, S_sigma)`` in bits for one preparation basis.

    The message entropy uses ``Q_k`` spread evenly over ``d_eff - 1`` wrong
    outcomes. The check entropy uses ``Q_t`` the same way, except for the
    amplitude-damping Fourier run where the conditional entropy is read off
    the exact check-run table.
    """
    kind, mode = check_supported(kind, mode)
    basis = PreparationBasis(basis)
    if rates.d_eff == 1:
        s_kappa = 0.0
    else:
        s_kappa = skewed_entropy(rates.d_eff, _unit(1.0 - rates.Q_k[basis]))
    if kind is NoiseKind.AMPLITUDE_DAMPING and basis is PreparationBasis.FOURIER:
        s_sigma = conditional_entropy(check_statistics(kind, mode, d, rates.p, basis))
    else:
        s_sigma = skewed_entropy(d, _unit(1.0 - rates.Q_t[basis]))
    return s_kappa, s_sigma


def _unit(v):
    return min(max(float(v), 0.0), 1.0)


@dataclass(frozen=True)
class CollectiveKeyPoint:
    kind: NoiseKind
    mode: CorrelationMode
    d: int
    p: float
    Q_k: tuple
    Q_t: tuple
    S_kappa: tuple
    S_sigma: tuple
    r_basis: tuple
    r: float
    r_reg: float
    qder_abscissa: float


def collective_key_rate(kind, mode, d, p):
    """Basis-averaged key-rate bound ``log2(1/gamma) - S_sigma - S_kappa``.

    ``gamma = 1/d`` (see :func:`gamma_overlap`); both bases are used with
    probability 1/2 and the check fraction is taken to zero.
    """
    kind, mode = check_supported(kind, mode)
    d = check_dim(d)
    rates = error_rates(kind, mode, d, p)
    s_k, s_s, r_b = [], [], []
    for basis in BASES:
        k, s = conditional_entropies(kind, mode, d, rates, basis)
        s_k.append(k)
        s_s.append(s)
        r_b.append(np.log2(d) - s - k)
    r = 0.5 * (r_b[0] + r_b[1])
    return CollectiveKeyPoint(
        kind, mode, d, float(p), rates.Q_k, rates.Q_t, tuple(s_k), tuple(s_s),
        tuple(float(v) for v in r_b), float(r), float(r / np.log2(d)), rates.qder,
    )


def collective_curve(kind, mode, d, p_grid):
    return [collective_key_rate(kind, mode, d, p) for p in p_grid]


def rate_curve(kind, mode, d, p_grid, regularized=False, label=None):
    pts = collective_curve(kind, mode, d, p_grid)
    y = [pt.r_reg if regularized else pt.r for pt in pts]
    return Curve(label or f"d={d}", np.array([pt.qder_abscissa for pt in pts]), np.array(y), np.asarray(p_grid, float))


def protocol_comparison(kind, mode, d, p_grid):
    """Two parallel d-dimensional runs against one d**2-dimensional run.

    Returns ``(two_parallel, squared)`` curves of total rate in bits against
    each protocol's own message error rate.
    """
    d = check_dim(d)
    p_grid = np.asarray(p_grid, dtype=float)
    small = collective_curve(kind, mode, d, p_grid)
    big = collective_curve(kind, mode, d * d, p_grid)
    two = Curve("2xLM05", np.array([pt.qder_abscissa for pt in small]), np.array([2 * pt.r for pt in small]), p_grid)
    sq = Curve("d2LM05", np.array([pt.qder_abscissa for pt in big]), np.array([pt.r for pt in big]), p_grid)
    return two, sq


def adc_check_entropy_report(dims=(2, 3, 4), ps=(0.1, 0.5), atol=1e-9):
    """Compare :func:`adc_printed_check_entropy` with the exact check entropy.

    Returns a list of dicts with keys ``d, p, printed, oracle, matches``.
    """
    rows = []
    for d in dims:
        for p in ps:
            qt = error_rates(NoiseKind.AMPLITUDE_DAMPING, CorrelationMode.INDEPENDENT, d, p).Q_t[1]
            if d <= ORACLE_MAX_DIM:
                oracle = purified_statistics("adc", "ind", d, p, 1).check_entropy()
            else:
                oracle = conditional_entropy(check_statistics("adc", "ind", d, p, 1))
            printed = adc_printed_check_entropy(d, qt)
            rows.append(dict(d=d, p=p, printed=printed, oracle=oracle, matches=abs(printed - oracle) <= atol))
    return rows


def encoding_average(rho):
    """``(1/d**2) sum_xy U_xy rho U_xy^dagger``; equals I/d for any input."""
    d = rho.shape[0]
    return sum(
        weyl_u(d, x, y) @ rho @ weyl_u(d, x, y).conj().T for x in range(d) for y in range(d)
    ) / d**2
