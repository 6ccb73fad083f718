"""Capped conjugate gradient with negative-curvature detection.

Approximately solves ``(H + 2 sigma I) d = -g`` using only products with
``H``.  Returns either an approximate solution (``SOL``) or a direction of
curvature below ``-sigma`` (``NC``), with the certificates checked by
:func:`verify_sol_certificate` and :func:`verify_nc_certificate`.
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CgStallError, ConfigError


class DType(str, enum.Enum):
    SOL = "SOL"
    NC = "NC"


@dataclass(frozen=True)
class CgConfig:
    """``max_iters=None`` means ``4 * dim + 100``.

    ``track_hr`` adds the ``||H r^j|| / ||r^j||`` ratio to the curvature
    estimate ``U``.  It is obtained from ``r^j = -p^j + beta_j p^{j-1}``
    and the products already held for ``p^j`` and ``p^{j-1}``, so it costs
    no extra Hessian-vector product.
    """

    max_iters: Optional[int] = None
    track_hr: bool = True

    def __post_init__(self):
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")

    def cap(self, dim):
        return self.max_iters if self.max_iters is not None else 4 * dim + 100


@dataclass
class CgOutcome:
    d: np.ndarray
    d_type: DType
    hbar_d: np.ndarray
    iters: int
    hv_products: int
    u_final: float


@dataclass
class CgDerived:
    """Quantities refreshed from the running curvature estimate ``U``."""

    U: float
    kappa: float
    zeta_hat: float
    tau: float
    T: float

    @classmethod
    def from_u(cls, U, sigma, zeta):
        kappa = (U + 2.0 * sigma) / sigma
        sk = math.sqrt(kappa)
        tau = sk / (sk + 1.0)
        T = 4.0 * kappa ** 4 / (1.0 - math.sqrt(tau)) ** 2
        return cls(U, kappa, zeta / (3.0 * kappa), tau, T)


def _ratio(hv, v):
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return 0.0
    return float(np.linalg.norm(hv)) / nv


def _rescale_sol(y, hbar_y, g, sigma, zeta):
    # Exact minimizer of the damped model along y.  Restores
    # y^T g = -y^T Hbar y, which finite-precision CG only keeps up to its
    # loss of orthogonality; curvature and norm bounds are scale-free or
    # implied, the residual bound is rechecked.
    yHy = float(y @ hbar_y)
    c = -float(y @ g) / yHy
    if not c > 0.0:
        return y, hbar_y
    d, hbar_d = c * y, c * hbar_y
    if np.linalg.norm(hbar_d + g) > zeta * sigma * np.linalg.norm(d) / 2.0:
        return y, hbar_y
    return d, hbar_d


def capped_cg(hvp: Callable[[np.ndarray], np.ndarray], g, sigma, zeta, cfg=CgConfig()):
    """Run capped CG on ``(H + 2 sigma I) d = -g``.

    Parameters
    ----------
    hvp : callable
        ``v -> H v`` for a symmetric, possibly indefinite ``H``.
    g : ndarray
        Right-hand side, nonzero.
    sigma : float
        Damping, ``> 0``.
    zeta : float
        Relative accuracy in ``(0, 1)``.
    cfg : CgConfig

    Returns
    -------
    CgOutcome

    Raises
    ------
    CgStallError
        When ``cfg`` caps the iterations before a certificate is found.
    """
    g = np.asarray(g, dtype=float)
    if not sigma > 0.0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if not 0.0 < zeta < 1.0:
        raise ConfigError(f"zeta must lie in (0, 1), got {zeta}")
    norm_g = float(np.linalg.norm(g))
    if norm_g == 0.0:
        raise ConfigError("capped CG needs a nonzero right-hand side")
    max_iters = cfg.cap(g.size)
    two_sigma = 2.0 * sigma
    n_hv = 0

    def hbar(v):
        nonlocal n_hv
        n_hv += 1
        return hvp(v) + two_sigma * v

    y = np.zeros_like(g)
    hbar_y = np.zeros_like(g)
    r = g.copy()
    p = -g
    hbar_p = hbar(p)
    derived = CgDerived.from_u(0.0, sigma, zeta)

    if float(p @ hbar_p) < sigma * float(p @ p):
        return CgOutcome(p, DType.NC, hbar_p, 0, n_hv, 0.0)

    # U only ever grows; the p^0 ratio is fixed from here on.
    u_p0 = _ratio(hbar_p - two_sigma * p, p)
    ys = [y]
    hbar_ys = [hbar_y]
    rr = norm_g * norm_g
    j = 0
    while True:
        if j >= max_iters:
            raise CgStallError(
                f"capped CG reached {max_iters} iterations without a certificate",
                y_best=y, iters=j, hv_products=n_hv, residual=math.sqrt(rr))
        pHp = float(p @ hbar_p)
        alpha = rr / pHp
        y = y + alpha * p
        hbar_y = hbar_y + alpha * hbar_p
        r = r + alpha * hbar_p
        rr_new = float(r @ r)
        beta = rr_new / rr
        p_prev, hbar_p_prev = p, hbar_p
        p = -r + beta * p_prev
        rr = rr_new
        j += 1
        hbar_p = hbar(p) if rr > 0.0 else np.zeros_like(p)
        ys.append(y)
        hbar_ys.append(hbar_y)

        U = max(derived.U, u_p0,
                _ratio(hbar_p - two_sigma * p, p),
                _ratio(hbar_y - two_sigma * y, y))
        if cfg.track_hr:
            hbar_r = -hbar_p + beta * hbar_p_prev
            U = max(U, _ratio(hbar_r - two_sigma * r, r))
        if U != derived.U:
            derived = CgDerived.from_u(U, sigma, zeta)

        norm_r = math.sqrt(rr)
        if float(y @ hbar_y) < sigma * float(y @ y):
            return CgOutcome(y, DType.NC, hbar_y, j, n_hv, derived.U)
        if norm_r <= derived.zeta_hat * norm_g:
            d, hbar_d = _rescale_sol(y, hbar_y, g, sigma, zeta)
            return CgOutcome(d, DType.SOL, hbar_d, j, n_hv, derived.U)
        if float(p @ hbar_p) < sigma * float(p @ p):
            return CgOutcome(p, DType.NC, hbar_p, j, n_hv, derived.U)
        if norm_r > math.sqrt(derived.T) * derived.tau ** (j / 2.0) * norm_g:
            alpha = rr / float(p @ hbar_p)
            y_next = y + alpha * p
            hbar_y_next = hbar_y + alpha * hbar_p
            for i in range(j):
                dy = y_next - ys[i]
                hbar_dy = hbar_y_next - hbar_ys[i]
                if float(dy @ hbar_dy) < sigma * float(dy @ dy):
                    return CgOutcome(dy, DType.NC, hbar_dy, j, n_hv, derived.U)
            # No certifying pair (U underestimated ||H||): keep iterating.


@dataclass
class SolReport:
    passed: bool
    worst_slack: float
    checks: dict


@dataclass
class NcReport:
    passed: bool
    rayleigh: float


def verify_sol_certificate(hvp, g, sigma, zeta, d, rtol=1e-8):
    """Check the four SOL certificates with a fresh product ``H d``.

    Each check ``lhs <= rhs`` contributes the slack
    ``(lhs - rhs) / max(|lhs|, |rhs|, tiny)``; the certificate passes when
    every slack is at most ``rtol``.
    """
    g = np.asarray(g, dtype=float)
    d = np.asarray(d, dtype=float)
    if not np.any(d):
        raise ConfigError("certificate check needs a nonzero direction")
    hbar_d = np.asarray(hvp(d), dtype=float) + 2.0 * sigma * d
    dd = float(d @ d)
    nd = math.sqrt(dd)
    dHd = float(d @ hbar_d)
    dg = float(d @ g)

    def slack(lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1e-300)
        return (lhs - rhs) / scale

    checks = {
        "curvature": slack(sigma * dd, dHd),
        "norm_bound": slack(nd, 1.1 * float(np.linalg.norm(g)) / sigma),
        "orthogonality": abs(slack(dg, -dHd)),
        "residual": slack(float(np.linalg.norm(hbar_d + g)), zeta * sigma * nd / 2.0),
    }
    worst = max(checks.values())
    return SolReport(worst <= rtol, worst, checks)


def verify_nc_certificate(hvp, g, sigma, d, rtol=1e-12):
    """Check ``d^T g <= 0`` and ``d^T H d / ||d||^2 < -sigma``.

    ``rtol`` is a relative slack on both comparisons, scaled by
    ``||d|| ||g||`` and ``max(1, sigma)`` respectively.
    """
    g = np.asarray(g, dtype=float)
    d = np.asarray(d, dtype=float)
    dd = float(d @ d)
    if dd == 0.0:
        raise ConfigError("certificate check needs a nonzero direction")
    rayleigh = float(d @ np.asarray(hvp(d), dtype=float)) / dd
    descent = float(d @ g) <= rtol * math.sqrt(dd) * float(np.linalg.norm(g))
    curvature = rayleigh < -sigma + rtol * max(1.0, sigma)
    return NcReport(descent and curvature, rayleigh)
