"""Individual cloning attack on the two-way protocol.

Eve clones each pass of the travelling qudit with an isometry that copies
computational basis states with fidelity ``F`` (forward) and ``F_back``
(backward). The key-rate functions are restricted to her optimal choice
``F = F_back = 1`` with equal pairwise ancilla overlaps ``cos(theta)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .qudit import NumericalDomainError, check_dim, omega, skewed_entropy

HALF_PI = np.pi / 2
_ANGLE_SLACK = 1e-12


def _check_angle(theta):
    theta = float(theta)
    if not -_ANGLE_SLACK <= theta <= HALF_PI + _ANGLE_SLACK:
        raise ValueError(f"overlap angle must lie in [0, pi/2], got {theta!r}")
    return min(max(theta, 0.0), HALF_PI)


def _angle_matrix(d, value, name):
    if value is None:
        return np.zeros((d, d))
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        a = np.full((d, d), float(a))
    if a.shape != (d, d):
        raise ValueError(f"{name} must be a scalar or a {d}x{d} matrix")
    off = ~np.eye(d, dtype=bool)
    if not np.allclose(a[off], a.T[off]):
        raise ValueError(f"{name} must be symmetric")
    if np.any(a[off] < -_ANGLE_SLACK) or np.any(a[off] > HALF_PI + _ANGLE_SLACK):
        raise ValueError(f"{name} entries must lie in [0, pi/2]")
    return np.clip(a, 0.0, HALF_PI)


@dataclass(frozen=True)
class CloningParams:
    """Eve's cloner: fidelities and ancilla overlap angles for both passes.

    ``theta[j, k]`` sets ``<e_jj|e_kk> = F cos(theta[j, k])`` and ``phi[j, k]``
    sets ``<e_jk|e_kj> = (1 - F)/(d - 1) cos(phi[j, k])``. Primed (``*_back``)
    fields describe the backward-pass ancillas. Diagonals are ignored.
    """

    d: int
    F: float = 1.0
    F_back: float = 1.0
    theta: np.ndarray = None
    phi: np.ndarray = None
    theta_back: np.ndarray = None
    phi_back: np.ndarray = None

    def __post_init__(self):
        d = check_dim(self.d)
        for name in ("F", "F_back"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        for name in ("theta", "phi", "theta_back", "phi_back"):
            object.__setattr__(self, name, _angle_matrix(d, getattr(self, name), name))

    @classmethod
    def equiangular(cls, d, theta, theta_back=None):
        """Optimal cloner ``F = F_back = 1`` with a single overlap angle per pass."""
        theta = _check_angle(theta)
        theta_back = theta if theta_back is None else _check_angle(theta_back)
        return cls(d, 1.0, 1.0, theta=theta, theta_back=theta_back)

    def forward(self):
        return self.F, self.theta, self.phi

    def backward(self):
        return self.F_back, self.theta_back, self.phi_back


def fourier_clone_norm(params, channel, i):
    """Squared norm of Eve's ancilla when Fourier state ``|i~>`` is cloned perfectly.

    This is the non-detection probability of a single pass for that input.
    The ``cos(theta)`` term is summed over ordered pairs ``j != k``, which is
    what makes the norm equal 1 for identical ancillas.
    """
    d = params.d
    if channel == "forward":
        F, theta, phi = params.forward()
    elif channel == "backward":
        F, theta, phi = params.backward()
    else:
        raise ValueError(f"channel must be 'forward' or 'backward', got {channel!r}")
    if not 0 <= i < d:
        raise ValueError(f"index {i} out of range")
    off = ~np.eye(d, dtype=bool)
    j, k = np.indices((d, d))
    phase = omega(d) ** ((2 * i * (k - j)) % d)
    total = d + F * np.cos(theta)[off].sum()
    total += (1 - F) / (d - 1) * np.real((phase * np.cos(phi))[off].sum())
    return float(total / d**2)


def detection_probability(params):
    """Average probability that a check round exposes the cloner.

    Averages ``1 - P_nd(forward) * P_nd(backward)`` over the ``2d`` states of
    both preparation bases. Computational states survive a pass with
    probability ``F`` (``F_back``).
    """
    d = params.d
    nd = d * params.F * params.F_back
    nd += sum(
        fourier_clone_norm(params, "forward", i) * fourier_clone_norm(params, "backward", i)
        for i in range(d)
    )
    return 1.0 - nd / (2 * d)


def min_detection_probability(d, theta):
    """Detection probability of the optimal equiangular cloner.

    >>> round(min_detection_probability(2, np.pi / 2), 12)
    0.375
    """
    d, theta = check_dim(d), _check_angle(theta)
    return float((d - 1) / d**2 * ((d + 1) + (d - 1) * np.cos(theta)) * np.sin(theta / 2) ** 2)


@dataclass(frozen=True)
class MutualInfoTriple:
    I_AB: float
    I_AE: float
    I_BE: float
    P_AB_fourier: float
    P_AE: float
    chi: float
    p_eps: float
    P_BE_computational: float
    P_BE_fourier: float


def guess_angle(d, theta):
    """Eve's discrimination angle: ``cos(chi) = (1 - 2 theta/pi) / sqrt(d)``."""
    return float(np.arccos((1.0 - 2.0 * theta / np.pi) / np.sqrt(d)))


def mutual_informations(d, theta):
    """I_AB, I_AE and I_BE (bits) for the equiangular ``F = F_back = 1`` attack."""
    d, theta = check_dim(d), _check_angle(theta)
    log_d = np.log2(d)
    p_ab = (1.0 + (d - 1) * np.cos(theta) ** 2) / d
    I_AB = log_d - 0.5 * skewed_entropy(d, _unit(p_ab))

    chi = guess_angle(d, theta)
    p_eps = (1.0 + np.cos(2 * chi)) / 2
    p_ae = p_eps**2 + (1.0 - p_eps) ** 2 / (d - 1)
    I_AE = log_d - skewed_entropy(d, _unit(p_ae))

    # computational inputs always reach Bob intact
    p_be_comp = p_ae
    p_be_four = p_ab * p_ae + (1.0 - p_ab) * (1.0 - p_ae) / (d - 1)
    I_BE = log_d - 0.5 * (
        skewed_entropy(d, _unit(p_be_comp)) + skewed_entropy(d, _unit(p_be_four))
    )
    return MutualInfoTriple(
        float(I_AB), float(I_AE), float(I_BE), float(p_ab), float(p_ae), chi,
        float(p_eps), float(p_be_comp), float(p_be_four),
    )


def _unit(p):
    # rounding can push closed-form probabilities a few ulp outside [0, 1]
    return min(max(float(p), 0.0), 1.0)


@dataclass(frozen=True)
class IndividualKeyPoint:
    d: int
    theta: float
    pdet_min: float
    triple: MutualInfoTriple
    r: float
    r_reg: float


def individual_key_rate(d, theta):
    """Key rate ``I_AB - min(I_AE, I_BE)`` at one overlap angle."""
    d, theta = check_dim(d), _check_angle(theta)
    mi = mutual_informations(d, theta)
    r = mi.I_AB - min(mi.I_AE, mi.I_BE)
    return IndividualKeyPoint(d, theta, float(min_detection_probability(d, theta)), mi, r, r / np.log2(d))


def individual_curve(d, thetas):
    return [individual_key_rate(d, t) for t in thetas]


@dataclass(frozen=True)
class ThresholdResult:
    """Where ``I_AB = I_AE``; ``crossed`` is False when no root lies in (0, pi/2]."""

    d: int
    theta: float
    pdet_min: float
    crossed: bool
    at_boundary: bool = False


def _advantage(d, theta):
    mi = mutual_informations(d, theta)
    return mi.I_AB - mi.I_AE


def detection_threshold(d, tol=1e-10, max_iter=200):
    """Minimum detection probability beyond which ``I_AE >= I_AB``.

    Bisection on theta. If ``I_AB > I_AE`` over the whole interval the value
    at ``theta = pi/2`` is returned with ``crossed=False``.
    """
    d = check_dim(d)
    lo, hi = 0.0, HALF_PI
    g_hi = _advantage(d, hi)
    if abs(g_hi) <= tol:
        return ThresholdResult(d, hi, float(min_detection_probability(d, hi)), True, True)
    if g_hi > 0:
        return ThresholdResult(d, hi, float(min_detection_probability(d, hi)), False, True)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _advantage(d, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    theta = 0.5 * (lo + hi)
    return ThresholdResult(d, theta, float(min_detection_probability(d, theta)), True)


@dataclass(frozen=True)
class EnsembleTable:
    """Eve's ancilla-pair labels per encoding ``x``.

    ``ensembles[x]`` lists ``((n, n), (n+x, n+x))``: the forward ancilla
    ``e_nn`` paired with the backward ancilla ``eta_(n+x)(n+x)``.
    """

    d: int
    ensembles: dict = field(default_factory=dict)

    def is_disjoint(self):
        sets = [set(v) for v in self.ensembles.values()]
        return all(not (a & b) for k, a in enumerate(sets) for b in sets[k + 1:])


def eve_ensembles(d):
    d = check_dim(d)
    table = {
        x: [((n, n), ((n + x) % d, (n + x) % d)) for n in range(d)]
        for x in range(d)
    }
    return EnsembleTable(d, table)


def ancilla_gram(d, theta):
    d, theta = check_dim(d), _check_angle(theta)
    c = np.cos(theta)
    return (1.0 - c) * np.eye(d) + c * np.ones((d, d))


def ancilla_states(d, theta, atol=1e-12):
    """Unit ancilla kets ``e_nn`` as columns, with pairwise overlap ``cos(theta)``.

    Built from the symmetric square root of the Gram matrix.
    """
    G = ancilla_gram(d, theta)
    lam, vec = np.linalg.eigh(G)
    if lam.min() < -atol:
        raise NumericalDomainError("ancilla Gram matrix is not positive semidefinite")
    return (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.T


def cloning_isometry(d, theta):
    """Isometry ``|i> -> |i> (x) |e_ii>`` as a ``(d*d, d)`` matrix."""
    E = ancilla_states(d, theta).astype(complex)
    d = E.shape[0]
    V = np.zeros((d * d, d), dtype=complex)
    for i in range(d):
        V[i * d:(i + 1) * d, i] = E[:, i]
    return V
