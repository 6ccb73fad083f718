import numpy as np
import pytest

from adancg import DegenerateStepError, make_quadratic, make_quartic_test
from adancg.estimators import (
    StepCache, holder_estimate_h0, holder_estimate_h1, taylor_residual_f, taylor_residual_grad,
)


def quartic_1d(x, y):
    # f(t) = t^4 / 12: f' = t^3 / 3, f'' = t^2
    f = lambda t: t ** 4 / 12.0  # noqa: E731
    s = y - x
    return StepCache(x=np.array([x]), y=np.array([y]), f_x=f(x), f_y=f(y),
                     g_x=np.array([x ** 3 / 3.0]), quad_form=x * x * s * s,
                     g_y=np.array([y ** 3 / 3.0]), h_step=np.array([x * x * s]))


def test_h0_quartic_unit_step():
    c = quartic_1d(0.0, 1.0)
    assert taylor_residual_f(c) == pytest.approx(1.0 / 12.0)
    assert holder_estimate_h0(c, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-15)


def test_h0_quartic_double_step():
    c = quartic_1d(0.0, 2.0)
    assert taylor_residual_f(c) == pytest.approx(4.0 / 3.0)
    assert holder_estimate_h0(c, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)


def test_h1_quartic_unit_step():
    c = quartic_1d(0.0, 1.0)
    assert taylor_residual_grad(c) == pytest.approx(1.0 / 3.0)
    assert holder_estimate_h1(c, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)


def full_cache(P, x, y):
    s = y - x
    hs = P.hvp(x, s)
    return StepCache(x, y, P.f(x), P.f(y), P.grad(x), float(s @ hs), P.grad(y), hs)


@pytest.mark.parametrize("nu", [0.3, 1.0])
def test_estimators_vanish_on_quadratics(nu):
    P = make_quadratic([1.0, 2.0, 5.0])
    rng = np.random.default_rng(0)
    for _ in range(50):
        c = full_cache(P, rng.standard_normal(3), rng.standard_normal(3))
        assert holder_estimate_h0(c, nu) <= 1e-12 * (1 + abs(c.f_x) + abs(c.f_y))
        assert holder_estimate_h1(c, nu) <= 1e-12 * (1 + np.linalg.norm(c.g_y))


def test_estimators_bounded_by_quartic_modulus():
    P = make_quartic_test(4)
    rng = np.random.default_rng(1)
    for _ in range(300):
        c = full_cache(P, rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4))
        assert holder_estimate_h0(c, 1.0) <= 6.0 * (1 + 1e-9)
        assert holder_estimate_h1(c, 1.0) <= 6.0 * (1 + 1e-9)


def test_degenerate_step():
    c = quartic_1d(1.0, 1.0)
    with pytest.raises(DegenerateStepError):
        holder_estimate_h0(c, 1.0)
    with pytest.raises(DegenerateStepError):
        holder_estimate_h1(c, 1.0)


def test_h1_needs_gradient_data():
    c = quartic_1d(0.0, 1.0)
    c.g_y = None
    with pytest.raises(ValueError):
        taylor_residual_grad(c)
