"""Dense desk-scale oracles and the property suites run by ``adancg verify``.

Everything here is O(n^3) and meant for small problems only.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import linesearch
from .ancg import AncgConfig, ancg_solve
from .capped_cg import DType, capped_cg, verify_nc_certificate, verify_sol_certificate
from .errors import ConfigError, OracleError
from .estimators import StepCache, holder_estimate_h0, holder_estimate_h1
from .oracle import eval_hvp, fd_check
from .problems import (
    InfeasibilitySpec, RepuSpec, make_infeasibility, make_quadratic, make_quartic_test, make_repu,
)
from .uancg import UancgConfig, uancg_solve

DENSE_DIM_CAP = 2000


@dataclass
class DenseHessian:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.shape != (self.dim, self.dim):
            raise ConfigError(f"expected a {self.dim}x{self.dim} matrix, got {self.entries.shape}")
        scale = max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))
        if np.max(np.abs(self.entries - self.entries.T), initial=0.0) > 1e-12 * scale:
            raise OracleError("dense Hessian is not symmetric")

    @classmethod
    def of(cls, matrix):
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix.shape[0], matrix)

    def hvp(self, v):
        return self.entries @ v


def dense_damped_solve(H, g, sigma):
    """Return ``-(H + 2 sigma I)^{-1} g`` from a dense factorization."""
    g = np.asarray(g, dtype=float)
    M = H.entries + 2.0 * sigma * np.eye(H.dim)
    try:
        d = -np.linalg.solve(M, g)
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"damped system is singular: {exc}") from exc
    res = float(np.linalg.norm(M @ d + g))
    if not res <= 1e-10 * (1.0 + float(np.linalg.norm(g))):
        raise OracleError(f"dense solve residual {res:.3e} too large")
    return d


def min_eigenvalue(H):
    if H.dim > DENSE_DIM_CAP:
        raise ConfigError(f"dense eigen-solve capped at dim {DENSE_DIM_CAP}")
    return float(np.linalg.eigvalsh(H.entries)[0])


def materialize_hessian(problem, x):
    """Assemble ``H(x)`` column by column from Hessian-vector products."""
    n = problem.dim
    if n > DENSE_DIM_CAP:
        raise ConfigError(f"dense Hessian capped at dim {DENSE_DIM_CAP}")
    cols = [eval_hvp(problem, x, e) for e in np.eye(n)]
    M = np.column_stack(cols)
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    defect = float(np.max(np.abs(M - M.T), initial=0.0)) / scale
    if defect > 1e-8:
        raise OracleError(f"{problem.name}: Hessian-vector product is not symmetric "
                          f"(defect {defect:.3e})")
    return DenseHessian(n, 0.5 * (M + M.T))


SPECTRA = ("spd", "indefinite", "near_singular", "mildly_indefinite")


def random_symmetric(rng, n, kind):
    """Random ``Q diag(lam) Q^T`` with a spectrum of the requested kind."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    if kind == "spd":
        lam = rng.uniform(0.01, 10.0, n)
    elif kind == "indefinite":
        lam = rng.uniform(-5.0, 5.0, n)
    elif kind == "near_singular":
        lam = np.concatenate([[1e-9], rng.uniform(0.0, 3.0, n - 1)])
    elif kind == "mildly_indefinite":
        lam = np.concatenate([[-rng.uniform(0.0, 0.05)], rng.uniform(0.0, 5.0, n - 1)])
    else:
        raise ConfigError(f"unknown spectrum kind {kind!r}")
    H = (Q * lam) @ Q.T
    return 0.5 * (H + H.T)


def random_cg_case(seed, n_max=50):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    kind = SPECTRA[seed % len(SPECTRA)]
    H = random_symmetric(rng, n, kind)
    g = rng.standard_normal(n)
    sigma = float(10.0 ** rng.uniform(-3.0, 0.0))
    zeta = float(rng.uniform(0.01, 0.5))
    return H, g, sigma, zeta, kind


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def fail(self, message):
        self.failures.append(message)


def suite_certificates(count=1000, seed=0):
    """Capped-CG certificates on random matrices plus the NC rescaling identity."""
    res = SuiteResult("certificates")
    for s in range(seed, seed + count):
        H, g, sigma, zeta, kind = random_cg_case(s)
        hv = lambda v, H=H: H @ v  # noqa: E731
        calls = [0]

        def counted(v, H=H):
            calls[0] += 1
            return H @ v

        out = capped_cg(counted, g, sigma, zeta)
        res.cases += 1
        tag = f"seed={s} n={g.size} kind={kind} sigma={sigma:.3e} zeta={zeta:.3f}"
        if out.hv_products != calls[0]:
            res.fail(f"work accounting: {tag}")
        if out.hv_products > out.iters + 1:
            res.fail(f"hv_products {out.hv_products} > iters+1 ({out.iters}): {tag}")
        fresh = H @ out.d + 2.0 * sigma * out.d
        if np.linalg.norm(out.hbar_d - fresh) > 1e-8 * (1.0 + np.linalg.norm(out.hbar_d)):
            res.fail(f"hbar_d recurrence drift: {tag}")
        lam_min = float(np.linalg.eigvalsh(H)[0])
        if out.d_type is DType.SOL:
            rep = verify_sol_certificate(hv, g, sigma, zeta, out.d)
            if not rep.passed:
                res.fail(f"SOL certificate (worst slack {rep.worst_slack:.2e}): {tag}")
        else:
            rep = verify_nc_certificate(hv, g, sigma, out.d)
            if not rep.passed:
                res.fail(f"NC certificate (rayleigh {rep.rayleigh:.4g}): {tag}")
            if lam_min >= 0.0:
                res.fail(f"NC returned for PSD matrix: {tag}")
            if not lam_min < -sigma:
                res.fail(f"NC returned but lambda_min {lam_min:.4g} >= -sigma: {tag}")
            if len(res.failures) < 20:
                _check_nc_transform(res, H, g, out.d, tag)
    return res


def _check_nc_transform(res, H, g, d_raw, tag):
    quad = float(d_raw @ H @ d_raw)
    d = linesearch.nc_transform(d_raw, quad, g)
    nd = float(np.linalg.norm(d))
    rayleigh = float(d @ H @ d) / (nd * nd)
    if float(d @ g) > 1e-12 * nd * float(np.linalg.norm(g)):
        res.fail(f"NC certificate after nc_transform: d^T g > 0: {tag}")
    if abs(rayleigh + nd) > 1e-10 * max(1.0, nd):
        res.fail(f"NC certificate after nc_transform: curvature {rayleigh:.6g} != -||d|| "
                 f"({-nd:.6g}): {tag}")


def suite_estimators(pairs=1000, seed=0):
    """Lower-estimator property on the quartic fixture; zeros on quadratics."""
    res = SuiteResult("estimators")
    rng = np.random.default_rng(seed)
    radius = 1.0
    for dim in (1, 3, 10):
        P = make_quartic_test(dim, radius=radius)
        bound = P.hf_hint * (1.0 + 1e-9)
        for _ in range(pairs):
            x = rng.uniform(-radius, radius, dim)
            y = rng.uniform(-radius, radius, dim)
            if np.array_equal(x, y):
                continue
            c = _full_cache(P, x, y)
            h0, h1 = holder_estimate_h0(c, 1.0), holder_estimate_h1(c, 1.0)
            res.cases += 1
            if not (0.0 <= h0 <= bound and 0.0 <= h1 <= bound):
                res.fail(f"quartic dim={dim}: H0={h0:.6g} H1={h1:.6g} > {P.hf_hint}; "
                         f"x={x.tolist()} y={y.tolist()}")
    Q = make_quadratic(np.linspace(0.5, 4.0, 5))
    for _ in range(200):
        x, y = rng.standard_normal(5), rng.standard_normal(5)
        c = _full_cache(Q, x, y)
        res.cases += 1
        for nu in (0.25, 1.0):
            h0, h1 = holder_estimate_h0(c, nu), holder_estimate_h1(c, nu)
            scale = 1.0 + abs(c.f_y) + abs(c.f_x)
            if h0 * np.linalg.norm(y - x) ** (2 + nu) > 1e-12 * scale or h1 > 1e-10 * scale:
                res.fail(f"quadratic estimators not zero: H0={h0:.3e} H1={h1:.3e}")
    return res


def _full_cache(P, x, y):
    s = y - x
    hs = P.hvp(x, s)
    return StepCache(x=x, y=y, f_x=P.f(x), f_y=P.f(y), g_x=P.grad(x),
                     quad_form=float(s @ hs), g_y=P.grad(y), h_step=hs)


def shipped_families(seeds=(1, 2, 3, 4, 5)):
    """Small instances of every shipped problem family, keyed by label."""
    out = {}
    for s in seeds:
        out[f"infeas/seed={s}"] = make_infeasibility(InfeasibilitySpec(8, 3, 2.5, s))
        out[f"repu/seed={s}"] = make_repu(RepuSpec(6, 5, 2.5, s))
    out["quadratic"] = make_quadratic(np.arange(1.0, 6.0))
    out["quartic"] = make_quartic_test(5)
    return out


def suite_fd(points=5, seed=0):
    """Finite-difference agreement for every family at several points."""
    res = SuiteResult("fd")
    rng = np.random.default_rng(seed)
    for label, P in shipped_families().items():
        for _ in range(points):
            x = rng.uniform(-1.5, 1.5, P.dim)
            rep = fd_check(P, x, trials=3, seed=int(rng.integers(0, 2**32)))
            res.cases += 1
            if rep.max_grad_err > 1e-4 or rep.max_hvp_err > 1e-4:
                res.fail(f"{label}: grad_err={rep.max_grad_err:.2e} "
                         f"hvp_err={rep.max_hvp_err:.2e} at x={x.tolist()}")
    return res


def suite_gamma():
    """Descent and gamma dynamics of both adaptive solvers on every family."""
    res = SuiteResult("gamma")
    for label, P in shipped_families().items():
        nu = P.nu_hint if P.nu_hint is not None else 1.0
        r = ancg_solve(P, AncgConfig(nu=nu, grad_tol=1e-6, max_outer=20000))
        res.cases += 1
        fs = [t.f for t in r.trace] + [r.f_final]
        if any(b >= a for a, b in zip(fs, fs[1:])):
            res.fail(f"ancg {label}: objective not strictly decreasing")
        gammas = [t.gamma for t in r.trace] + [t.gamma_after for t in r.trace[-1:]]
        if any(b < a for a, b in zip(gammas, gammas[1:])):
            res.fail(f"ancg {label}: gamma decreased")
        if P.hf_hint is not None and gammas and max(gammas) > max(10.0, P.hf_hint):
            res.fail(f"ancg {label}: gamma {max(gammas):.4g} exceeds max(gamma0, hf_hint)")
        u = uancg_solve(P, UancgConfig(grad_tol=1e-6, max_outer=20000))
        res.cases += 1
        for t in u.trace:
            if t.gamma_after not in (t.gamma, 2.0 * t.gamma):
                res.fail(f"uancg {label} k={t.k}: gamma {t.gamma} -> {t.gamma_after}")
        fs = [t.f for t in u.trace] + [u.f_final]
        if any(b > a for a, b in zip(fs, fs[1:])):
            res.fail(f"uancg {label}: objective increased")
    return res


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "certificates": suite_certificates,
    "estimators": suite_estimators,
    "fd": suite_fd,
    "gamma": suite_gamma,
}
