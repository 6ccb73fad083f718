import numpy as np
import pytest

from adancg import CgConfig, CgStallError, ConfigError, DType, capped_cg
from adancg.capped_cg import CgDerived, verify_nc_certificate, verify_sol_certificate
from adancg.verify import DenseHessian, dense_damped_solve, random_symmetric


def identity(v):
    return v


def test_identity_one_step_sol():
    out = capped_cg(identity, np.array([1.0, 0.0]), 0.5, 0.5)
    assert out.d_type is DType.SOL
    assert np.allclose(out.d, [-0.5, 0.0], rtol=0, atol=1e-15)
    assert out.iters == 1
    assert verify_sol_certificate(identity, np.array([1.0, 0.0]), 0.5, 0.5, out.d).passed


def test_scaled_sol_fails_certificate():
    g = np.array([1.0, 0.0])
    out = capped_cg(identity, g, 0.5, 0.5)
    rep = verify_sol_certificate(identity, g, 0.5, 0.5, 10.0 * out.d)
    assert not rep.passed
    assert rep.checks["residual"] > 0


def test_initial_negative_curvature():
    H = np.diag([1.0, -2.0])
    hv = lambda v: H @ v  # noqa: E731
    g = np.array([0.0, 1.0])
    out = capped_cg(hv, g, 0.5, 0.5)
    assert out.d_type is DType.NC
    assert np.array_equal(out.d, [0.0, -1.0])
    assert out.iters == 0 and out.hv_products == 1
    rep = verify_nc_certificate(hv, g, 0.5, out.d)
    assert rep.passed and rep.rayleigh == -2.0


def test_nc_certificate_rejects_positive_curvature():
    H = np.diag([1.0, 3.0])
    g = np.array([1.0, 1.0])
    assert not verify_nc_certificate(lambda v: H @ v, g, 1e-3, g).passed


def test_seeded_spd_against_dense_solve():
    rng = np.random.default_rng(42)
    Q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
    H = (Q * rng.uniform(0.1, 5.0, 10)) @ Q.T
    H = 0.5 * (H + H.T)
    g = rng.standard_normal(10)
    g /= np.linalg.norm(g)
    sigma, zeta = 0.1, 0.5
    out = capped_cg(lambda v: H @ v, g, sigma, zeta)
    assert out.d_type is DType.SOL
    Hbar = H + 2 * sigma * np.eye(10)
    radius = zeta * sigma * np.linalg.norm(out.d) / 2
    assert np.linalg.norm(Hbar @ out.d + g) <= radius
    d_star = dense_damped_solve(DenseHessian.of(H), g, sigma)
    assert np.linalg.norm(out.d - d_star) <= radius / np.linalg.eigvalsh(Hbar)[0]


@pytest.mark.parametrize("kind", ["spd", "indefinite", "near_singular", "mildly_indefinite"])
def test_random_sweep(kind):
    rng = np.random.default_rng(len(kind))
    for _ in range(60):
        n = int(rng.integers(2, 40))
        H = random_symmetric(rng, n, kind)
        g = rng.standard_normal(n)
        sigma = float(10 ** rng.uniform(-3, 0))
        zeta = float(rng.uniform(0.05, 0.5))
        hv = lambda v, H=H: H @ v  # noqa: E731
        out = capped_cg(hv, g, sigma, zeta)
        if out.d_type is DType.SOL:
            assert verify_sol_certificate(hv, g, sigma, zeta, out.d).passed
        else:
            assert verify_nc_certificate(hv, g, sigma, out.d).passed
            assert np.linalg.eigvalsh(H)[0] < -sigma


def test_spd_always_sol():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        H = random_symmetric(rng, n, "spd")
        out = capped_cg(lambda v, H=H: H @ v, rng.standard_normal(n), 0.01, 0.3)
        assert out.d_type is DType.SOL


def test_hbar_d_and_work_accounting():
    rng = np.random.default_rng(5)
    H = random_symmetric(rng, 25, "indefinite")
    calls = []

    def hv(v):
        calls.append(1)
        return H @ v

    g = rng.standard_normal(25)
    out = capped_cg(hv, g, 0.05, 0.4)
    assert out.hv_products == len(calls) <= out.iters + 1
    assert np.allclose(out.hbar_d, H @ out.d + 0.1 * out.d, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("track", [True, False])
def test_track_hr_does_not_cost_products(track):
    rng = np.random.default_rng(8)
    H = random_symmetric(rng, 30, "spd")
    g = rng.standard_normal(30)
    out = capped_cg(lambda v: H @ v, g, 0.01, 0.5, CgConfig(track_hr=track))
    assert out.hv_products == out.iters + 1


def test_stall_carries_diagnostics():
    rng = np.random.default_rng(0)
    H = random_symmetric(rng, 40, "spd")
    with pytest.raises(CgStallError) as info:
        capped_cg(lambda v: H @ v, rng.standard_normal(40), 1e-3, 0.01, CgConfig(max_iters=2))
    err = info.value
    assert err.iters == 2 and err.hv_products == 3
    assert err.y_best.shape == (40,) and err.residual > 0


@pytest.mark.parametrize("g, sigma, zeta", [
    (np.zeros(2), 0.5, 0.5), (np.ones(2), 0.0, 0.5), (np.ones(2), 0.5, 1.0),
])
def test_preconditions(g, sigma, zeta):
    with pytest.raises(ConfigError):
        capped_cg(identity, g, sigma, zeta)


def test_max_iters_validated():
    with pytest.raises(ConfigError):
        CgConfig(max_iters=0)


def test_default_cap():
    assert CgConfig().cap(10) == 140


def test_derived_quantities():
    d = CgDerived.from_u(2.0, 1.0, 0.5)
    assert d.kappa == 4.0
    assert d.tau == pytest.approx(2.0 / 3.0)
    assert d.zeta_hat == pytest.approx(0.5 / 12.0)
    assert d.T == pytest.approx(4 * 256 / (1 - np.sqrt(2 / 3)) ** 2)
