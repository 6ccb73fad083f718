import numpy as np
import pytest

from adancg import ConfigError, LineSearchFailed, make_quadratic
from adancg.linesearch import backtrack_nc, backtrack_sol, nc_transform, sgn
from adancg.oracle import CountedProblem


def half_square():
    return CountedProblem(make_quadratic([1.0]))


def test_sgn_of_zero_is_one():
    assert sgn(0.0) == 1.0 and sgn(-0.0) == 1.0 and sgn(-3.0) == -1.0


def test_nc_transform_hand_example():
    H = np.diag([1.0, -2.0])
    d_raw, g = np.array([0.0, 2.0]), np.array([0.0, 1.0])
    q = float(d_raw @ H @ d_raw)
    assert q == -8.0
    d = nc_transform(d_raw, q, g)
    assert np.array_equal(d, [0.0, -2.0])
    assert float(d @ H @ d) / float(d @ d) == -2.0 == -np.linalg.norm(d)


def test_nc_transform_orthogonal_gradient_uses_plus_sign():
    d_raw, g = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    d = nc_transform(d_raw, -3.0, g)
    assert np.array_equal(d, -3.0 * d_raw)


def test_nc_transform_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 12))
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        H = (Q * rng.uniform(-3, 3, n)) @ Q.T
        w, V = np.linalg.eigh(H)
        if w[0] >= 0:
            continue
        d_raw = V[:, 0] * rng.uniform(0.1, 10) + 1e-3 * rng.standard_normal(n)
        q = float(d_raw @ H @ d_raw)
        if q >= 0:
            continue
        g = rng.standard_normal(n)
        d = nc_transform(d_raw, q, g)
        nd = np.linalg.norm(d)
        assert d @ g <= 0
        assert abs(d @ H @ d / nd ** 2 + nd) <= 1e-10 * max(1.0, nd)


def test_nc_transform_rejects_nonnegative_curvature():
    with pytest.raises(ConfigError):
        nc_transform(np.ones(2), 0.0, np.ones(2))


def test_backtrack_nc_arithmetic():
    P = half_square()
    x = np.array([1.0])
    # f(0.5) = 0.125 < 0.5 - 0.005 * 0.125
    alpha, j, trials = backtrack_nc(P, x, 0.5, np.array([-0.5]), 0.01, 0.5, 60)
    assert (alpha, j) == (1.0, 0)
    assert trials == {0: 0.125}


def test_backtrack_sol_arithmetic():
    P = half_square()
    alpha, j, _ = backtrack_sol(P, np.array([1.0]), 0.5, np.array([-1.0]), 0.1, 0.01, 0.5, 60)
    assert (alpha, j) == (1.0, 0)


def test_backtrack_sol_reuses_known_trial():
    P = half_square()
    backtrack_sol(P, np.array([1.0]), 0.5, np.array([-1.0]), 0.1, 0.01, 0.5, 60, known={0: 0.0})
    assert P.counters.n_f == 0


@pytest.mark.parametrize("search", ["nc", "sol"])
def test_ascent_direction_fails_at_cap(search):
    P = half_square()
    x, d = np.array([1.0]), np.array([1e-3])
    with pytest.raises(LineSearchFailed) as info:
        if search == "nc":
            backtrack_nc(P, x, 0.5, d, 0.01, 0.5, 10)
        else:
            backtrack_sol(P, x, 0.5, d, 0.1, 0.01, 0.5, 10)
    assert info.value.j == 10
    assert all(v >= 0.5 for v in info.value.trials.values())


def test_backtracking_reduces_until_condition_holds():
    P = half_square()
    x = np.array([1.0])
    alpha, j, trials = backtrack_sol(P, x, 0.5, np.array([-4.0]), 1.0, 0.01, 0.5, 60)
    # f(1-4t) < 0.5 - 0.16 t first holds at t = 1/4
    assert j == 2 and alpha == 0.25
    assert trials[0] >= 0.5 - 0.16 and trials[1] >= 0.5 - 0.08


def test_zero_direction_rejected():
    with pytest.raises(ConfigError):
        backtrack_nc(half_square(), np.ones(1), 0.5, np.zeros(1), 0.01, 0.5, 10)
