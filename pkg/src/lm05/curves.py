"""Sampled rate curves and comparison on a shared abscissa."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Curve:
    """An ordered sample of ``y`` against ``x`` plus the parameter that generated it."""

    label: str
    x: np.ndarray
    y: np.ndarray
    param: np.ndarray = None

    def rising_branch(self):
        """Prefix of the curve up to the first maximum of ``x``.

        Error rates of some channels peak before ``p = 1`` and then fall; only
        the leading branch is a function of ``x``.
        """
        x = np.asarray(self.x, dtype=float)
        stop = int(np.argmax(x)) + 1
        xb, yb = x[:stop], np.asarray(self.y, dtype=float)[:stop]
        if np.any(np.diff(xb) < -1e-12):
            raise ValueError(f"abscissa of {self.label!r} is not monotone on its rising branch")
        return xb, yb

    def at(self, grid):
        xb, yb = self.rising_branch()
        return np.interp(grid, xb, yb)


def common_grid(curves, n=200):
    """Grid over the abscissa range shared by every curve's rising branch."""
    hi = min(c.rising_branch()[0][-1] for c in curves)
    lo = max(c.rising_branch()[0][0] for c in curves)
    if hi <= lo:
        raise ValueError("curves share no abscissa range")
    return np.linspace(lo, hi, n)


def resample(curves, n=200):
    """Return ``(grid, Y)`` with ``Y[k]`` the k-th curve interpolated onto ``grid``."""
    grid = common_grid(curves, n)
    return grid, np.array([c.at(grid) for c in curves])


def pointwise_ordered(curves, n=200, tol=1e-12, positive_only=False):
    """True when the curves are non-decreasing in list order at every grid point."""
    _, Y = resample(curves, n)
    ok = np.diff(Y, axis=0) >= -tol
    if positive_only:
        mask = np.all(Y > 0, axis=0)
        ok = ok[:, mask]
    return bool(np.all(ok))
