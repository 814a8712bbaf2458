import numpy as np
import pytest

from lm05.curves import Curve, common_grid, pointwise_ordered, resample


def test_rising_branch_stops_at_turning_point():
    c = Curve("c", np.array([0.0, 0.5, 1.0, 0.8]), np.array([3.0, 2.0, 1.0, 0.0]))
    x, y = c.rising_branch()
    assert list(x) == [0.0, 0.5, 1.0] and list(y) == [3.0, 2.0, 1.0]


def test_non_monotone_prefix_raises():
    c = Curve("c", np.array([0.0, 0.6, 0.4, 1.0]), np.zeros(4))
    with pytest.raises(ValueError):
        c.rising_branch()


def test_common_grid_and_ordering():
    a = Curve("a", np.linspace(0, 1, 5), np.linspace(1, 0, 5))
    b = Curve("b", np.linspace(0, 2, 5), np.linspace(2, 0, 5))
    grid = common_grid([a, b], 11)
    assert grid[0] == 0.0 and grid[-1] == 1.0
    _, Y = resample([a, b], 11)
    assert np.allclose(Y[0], 1 - grid) and np.allclose(Y[1], 2 - grid)
    assert pointwise_ordered([a, b], 11)
    assert not pointwise_ordered([b, a], 11)


def test_disjoint_curves():
    a = Curve("a", np.array([0.0, 0.0]), np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        common_grid([a, a])
