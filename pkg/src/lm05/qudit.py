"""Dense operator algebra for small qudit registers.

States and operators are plain complex numpy arrays. Multi-register objects
are always accompanied by an explicit ``dims`` list giving the ordered
subsystem dimensions, e.g. ``[d, d, d, d]`` for the A, A'', B, B' layout used
by the purified protocol.
"""

from functools import reduce
from numbers import Integral

import numpy as np

ATOL = 1e-10
"""Default absolute tolerance for all structural checks."""

EIG_CLAMP = 1e-12
"""Eigenvalues within this distance below zero are treated as zero."""

COMPUTATIONAL = "computational"
FOURIER = "fourier"
BASES = (COMPUTATIONAL, FOURIER)


class NumericalDomainError(ValueError):
    """An input violates a numerical invariant (hermiticity, positivity, ...)."""


def check_dim(d):
    """Validate a qudit dimension and return it as ``int``."""
    if isinstance(d, bool) or not isinstance(d, Integral) or d < 2:
        raise ValueError(f"qudit dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _check_index(d, *idx):
    for k in idx:
        if isinstance(k, bool) or not isinstance(k, Integral) or not 0 <= k < d:
            raise ValueError(f"index {k!r} out of range [0, {d - 1}]")


def omega(d):
    """Primitive d-th root of unity, exp(2 pi i / d)."""
    return np.exp(2j * np.pi / check_dim(d))


def _phases(d, exponents):
    # exact reduction mod d keeps large exponents from losing precision
    return np.exp(2j * np.pi * (np.asarray(exponents) % d) / d)


# --------------------------------------------------------------------------- #
#                               Constructors                                  #
# --------------------------------------------------------------------------- #

def basis_vector(d, index):
    d = check_dim(d)
    _check_index(d, index)
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


def fourier_vector(d, index):
    """|index~> = d^(-1/2) sum_k w^(index k) |k>."""
    d = check_dim(d)
    _check_index(d, index)
    k = np.arange(d)
    return _phases(d, index * k) / np.sqrt(d)


def prepare_state(d, basis, index):
    """Return a computational or Fourier basis ket of a single qudit.

    Parameters
    ----------
    d : int
        Qudit dimension.
    basis : {'computational', 'fourier'}
        Which of the two mutually unbiased bases to draw from.
    index : int
        Label in ``[0, d - 1]``.
    """
    if basis == COMPUTATIONAL:
        return basis_vector(d, index)
    if basis == FOURIER:
        return fourier_vector(d, index)
    raise ValueError(f"unknown basis {basis!r}")


def basis_matrix(d, basis):
    """Columns are the kets of ``basis``, so ``basis_matrix(d, b)[:, i]`` is |i>."""
    return np.column_stack([prepare_state(d, basis, i) for i in range(check_dim(d))])


def weyl_u(d, x, y):
    """Heisenberg-Weyl encoding operator ``sum_l w^(l y) |l+x><l|``."""
    d = check_dim(d)
    _check_index(d, x, y)
    l = np.arange(d)
    U = np.zeros((d, d), dtype=complex)
    U[(l + x) % d, l] = _phases(d, l * y)
    return U


def weyl_w(d, i, j):
    """Weyl error operator ``sum_k w^(k i) |k><k+j|`` used by the Pauli channels."""
    d = check_dim(d)
    _check_index(d, i, j)
    k = np.arange(d)
    W = np.zeros((d, d), dtype=complex)
    W[k, (k + j) % d] = _phases(d, k * i)
    return W


def bell_state(d, x, y):
    """Two-qudit Bell ket ``d^(-1/2) sum_l w^(-l y) |l, l+x>``.

    ``bell_state(d, 0, 0)`` is the maximally entangled state |phi+>.
    """
    d = check_dim(d)
    _check_index(d, x, y)
    l = np.arange(d)
    v = np.zeros(d * d, dtype=complex)
    v[l * d + (l + x) % d] = _phases(d, -l * y)
    return v / np.sqrt(d)


def bell_basis(d):
    """Unitary whose column ``x * d + y`` is ``bell_state(d, x, y)``."""
    d = check_dim(d)
    return np.column_stack([bell_state(d, x, y) for x in range(d) for y in range(d)])


def projector(ket):
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


# --------------------------------------------------------------------------- #
#                               Predicates                                    #
# --------------------------------------------------------------------------- #

def is_hermitian(A, atol=ATOL):
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and np.allclose(A, A.conj().T, atol=atol, rtol=0)


def is_unitary(A, atol=ATOL):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    return np.allclose(A.conj().T @ A, np.eye(A.shape[0]), atol=atol, rtol=0)


def is_projector(A, atol=ATOL):
    return is_hermitian(A, atol) and np.allclose(A @ A, A, atol=atol, rtol=0)


def is_normalized(ket, atol=ATOL):
    return abs(np.linalg.norm(ket) - 1.0) <= atol


def is_density_matrix(rho, atol=ATOL):
    rho = np.asarray(rho)
    if not np.all(np.isfinite(rho)) or not is_hermitian(rho, atol):
        return False
    if abs(np.trace(rho).real - 1.0) > atol:
        return False
    return np.linalg.eigvalsh(rho).min() >= -atol


def check_density_matrix(rho, atol=ATOL):
    """Raise :class:`NumericalDomainError` unless ``rho`` is a valid state."""
    if not is_density_matrix(rho, atol):
        raise NumericalDomainError("matrix is not a valid density matrix")
    return rho


def check_probabilities(p, atol=ATOL):
    p = np.asarray(p, dtype=float)
    if np.any(p < -atol) or np.any(p > 1 + atol) or abs(p.sum() - 1.0) > atol:
        raise NumericalDomainError("weights do not form a probability distribution")
    return np.clip(p, 0.0, 1.0)


# --------------------------------------------------------------------------- #
#                          Multilinear algebra                                #
# --------------------------------------------------------------------------- #

def tensor(*ops):
    """Kronecker product of any number of vectors or matrices."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    return reduce(np.kron, ops)


def apply_operator(rho, op):
    """Conjugate a density matrix: ``op @ rho @ op^dagger``."""
    rho, op = np.asarray(rho), np.asarray(op)
    if op.shape[1] != rho.shape[0]:
        raise ValueError(f"dimension mismatch: operator {op.shape} on state {rho.shape}")
    return op @ rho @ op.conj().T


def partial_trace(rho, dims, keep):
    """Reduced state on the registers listed in ``keep``.

    Parameters
    ----------
    rho : (D, D) array
        Operator on the product space with ``D = prod(dims)``.
    dims : sequence of int
        Ordered subsystem dimensions.
    keep : int or sequence of int
        Register indices to retain; the others are traced out. Output keeps
        registers in ascending index order.
    """
    dims = [int(x) for x in dims]
    rho = np.asarray(rho)
    D = int(np.prod(dims))
    if rho.shape != (D, D):
        raise ValueError(f"state shape {rho.shape} does not match dims {dims}")
    keep = sorted({keep} if isinstance(keep, Integral) else set(keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise ValueError(f"register indices {keep} out of range for {len(dims)} registers")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # einsum labels: row index k -> k, column index k -> n + k, traced pairs share a label
    row = list(range(n))
    col = [n + k if k in keep else k for k in range(n)]
    out = list(keep) + [n + k for k in keep]
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return np.einsum(t, row + col, out).reshape(dk, dk)


# --------------------------------------------------------------------------- #
#                                 Entropies                                   #
# --------------------------------------------------------------------------- #

def shannon_entropy(weights):
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = check_probabilities(weights)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def skewed_entropy(d, p):
    """Entropy of ``{p, (1-p)/(d-1), ..., (1-p)/(d-1)}`` in bits.

    >>> round(skewed_entropy(2, 0.75), 6)
    0.811278
    """
    d = check_dim(d)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    h = 0.0
    if p > 0.0:
        h -= p * np.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * np.log2((1.0 - p) / (d - 1))
    return float(h)


def von_neumann_entropy(rho, atol=ATOL):
    """-Tr rho log2 rho, with eigenvalues in [-EIG_CLAMP, 0] clamped to zero."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, atol):
        raise NumericalDomainError("von Neumann entropy needs a Hermitian matrix")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -max(EIG_CLAMP, atol):
        raise NumericalDomainError(f"negative eigenvalue {lam.min():.3e}")
    lam = lam[lam > EIG_CLAMP]
    return float(-np.sum(lam * np.log2(lam)))


def conditional_entropy(joint):
    """H(X'|X) in bits for a joint table ``joint[x, x']``."""
    q = np.asarray(joint, dtype=float)
    q = np.where(np.abs(q) < EIG_CLAMP, 0.0, q)
    if np.any(q < 0):
        raise NumericalDomainError("joint distribution has negative entries")
    px = q.sum(axis=1)
    nz = q > 0
    h_joint = -np.sum(q[nz] * np.log2(q[nz]))
    pxn = px[px > 0]
    return float(h_joint + np.sum(pxn * np.log2(pxn)))


def mutual_information(joint):
    """Plug-in mutual information of a (possibly unnormalised) count table."""
    q = np.asarray(joint, dtype=float)
    total = q.sum()
    if total <= 0:
        return 0.0
    q = q / total
    px, py = q.sum(axis=1), q.sum(axis=0)
    nz = q > 0
    return float(np.sum(q[nz] * np.log2(q[nz] / np.outer(px, py)[nz])))
