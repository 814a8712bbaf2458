"""Noise channels and their two-way (forward, encode, backward) action."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qudit import ATOL, apply_operator, check_dim, weyl_u, weyl_w


class NoiseKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    DIT_PHASE_FLIP = "dit-phase-flip"
    AMPLITUDE_DAMPING = "amplitude-damping"

    @property
    def is_pauli(self):
        return self is not NoiseKind.AMPLITUDE_DAMPING


class CorrelationMode(str, Enum):
    INDEPENDENT = "independent"
    CORRELATED = "correlated"


_KIND_ALIASES = {
    "dep": NoiseKind.DEPOLARIZING,
    "dpf": NoiseKind.DIT_PHASE_FLIP,
    "adc": NoiseKind.AMPLITUDE_DAMPING,
}
_MODE_ALIASES = {
    "ind": CorrelationMode.INDEPENDENT,
    "corr": CorrelationMode.CORRELATED,
    "cor": CorrelationMode.CORRELATED,
}


def as_kind(kind):
    """Accept a :class:`NoiseKind`, its value, or a short alias (dep/dpf/adc)."""
    if isinstance(kind, NoiseKind):
        return kind
    key = str(kind).lower()
    if key in _KIND_ALIASES:
        return _KIND_ALIASES[key]
    try:
        return NoiseKind(key)
    except ValueError:
        raise ValueError(f"unknown noise kind {kind!r}") from None


def as_mode(mode):
    if isinstance(mode, CorrelationMode):
        return mode
    key = str(mode).lower()
    if key in _MODE_ALIASES:
        return _MODE_ALIASES[key]
    try:
        return CorrelationMode(key)
    except ValueError:
        raise ValueError(f"unknown correlation mode {mode!r}") from None


class UnsupportedCombinationError(ValueError):
    """Raised for (kind, mode) pairs the analysis does not define."""


def check_supported(kind, mode):
    kind, mode = as_kind(kind), as_mode(mode)
    if mode is CorrelationMode.CORRELATED and not kind.is_pauli:
        raise UnsupportedCombinationError(
            "correlated two-way noise is only defined for the Pauli channels"
        )
    return kind, mode


def _check_strength(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength must lie in [0, 1], got {p!r}")
    return float(p)


def pauli_weights(kind, d, p):
    """Weights ``w[i, j]`` of ``W_ij`` in a Pauli channel's Weyl decomposition."""
    kind, d, p = as_kind(kind), check_dim(d), _check_strength(p)
    w = np.zeros((d, d))
    if kind is NoiseKind.DEPOLARIZING:
        w[:] = p / d**2
        w[0, 0] = 1.0 - p * (d**2 - 1) / d**2
    elif kind is NoiseKind.DIT_PHASE_FLIP:
        w[1:, 1:] = p / (d - 1) ** 2
        w[0, 0] = 1.0 - p
    else:
        raise ValueError("amplitude damping is not a Pauli channel")
    return w


@dataclass(frozen=True)
class KrausChannel:
    """A single-qudit CPTP map in Kraus form.

    For the Pauli kinds ``weights`` holds the Weyl mixture and
    ``kraus[k] = sqrt(weights[labels[k]]) * W_labels[k]``; zero-weight terms
    are dropped. For amplitude damping ``weights`` and ``labels`` are None.
    """

    kind: NoiseKind
    d: int
    p: float
    kraus: tuple
    weights: np.ndarray = None
    labels: tuple = None

    def __call__(self, rho):
        return sum(apply_operator(rho, K) for K in self.kraus)

    def completeness(self):
        return sum(K.conj().T @ K for K in self.kraus)

    def is_trace_preserving(self, atol=ATOL):
        return np.allclose(self.completeness(), np.eye(self.d), atol=atol, rtol=0)

    def is_unital(self, atol=ATOL):
        mixed = np.eye(self.d) / self.d
        return np.allclose(self(mixed), mixed, atol=atol, rtol=0)


def make_channel(kind, d, p):
    """Build the depolarizing, dit-phase-flip or amplitude-damping channel.

    The depolarizing channel ``(1-p) rho + p I/d`` is realised as a twirl over
    all ``d**2`` Weyl operators; the dit-phase flip mixes in the ``(d-1)**2``
    operators ``W_ij`` with ``i, j >= 1``.
    """
    kind, d, p = as_kind(kind), check_dim(d), _check_strength(p)
    if kind.is_pauli:
        w = pauli_weights(kind, d, p)
        labels = tuple((i, j) for i in range(d) for j in range(d) if w[i, j] > 0)
        kraus = tuple(np.sqrt(w[ij]) * weyl_w(d, *ij) for ij in labels)
        return KrausChannel(kind, d, p, kraus, w, labels)
    K0 = np.diag([1.0] + [np.sqrt(1.0 - p)] * (d - 1)).astype(complex)
    kraus = [K0]
    for i in range(1, d):
        K = np.zeros((d, d), dtype=complex)
        K[0, i] = np.sqrt(p)
        kraus.append(K)
    return KrausChannel(kind, d, p, tuple(kraus))


def correlated_terms(kind, d, p):
    """``(weight, W_ij)`` pairs shared by both passes of a correlated channel."""
    ch = make_channel(kind, d, p)
    if not ch.kind.is_pauli:
        raise UnsupportedCombinationError("amplitude damping has no correlated form")
    return [(ch.weights[ij], weyl_w(d, *ij)) for ij in ch.labels]


def two_way_action(kind, mode, d, p, enc, rho, p_back=None):
    """Noisy round trip of a qudit: forward channel, ``U_xy`` encoding, backward channel.

    Parameters
    ----------
    kind, mode : NoiseKind, CorrelationMode (or their aliases)
    d : int
    p : float
        Noise strength shared by both passes.
    enc : (int, int)
        Encoding indices ``(x, y)`` of ``U_xy``.
    rho : (d, d) array
        Input state.
    p_back : float, optional
        Only accepted when equal to ``p``; unequal strengths are rejected.

    Returns
    -------
    (d, d) array
    """
    kind, mode = check_supported(kind, mode)
    if p_back is not None and p_back != p:
        raise ValueError("forward and backward channels must share one strength")
    U = weyl_u(d, *enc)
    if mode is CorrelationMode.INDEPENDENT:
        ch = make_channel(kind, d, p)
        return ch(apply_operator(ch(rho), U))
    out = np.zeros((d, d), dtype=complex)
    for w, W in correlated_terms(kind, d, p):
        out += w * apply_operator(rho, W @ U @ W)
    return out
