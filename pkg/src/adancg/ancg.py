"""Adaptive regularized Newton-CG for a known Hölder exponent ``nu``.

Each iteration solves ``(H + 2 eps I) d = -g`` once by capped CG with
``eps = (gamma ||g||^nu)^(1/(1+nu))``, takes a backtracked step, and
raises ``gamma`` to a local Hölder-modulus estimate computed only from
values the iteration already produced.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._driver import run_outer
from .capped_cg import CgConfig, DType, capped_cg
from .errors import ConfigError, DegenerateStepError
from .estimators import StepCache, holder_estimate_h0, holder_estimate_h1
from .linesearch import backtrack_nc, backtrack_sol, nc_transform
from .results import IterationRecord, SolverState

__all__ = [
    "AncgConfig", "ancg_solve", "ancg_step", "nc_transform", "backtrack_nc", "backtrack_sol",
]


def check_line_search(eta, theta, max_backtracks, eta_max=1.0, eta_closed=False):
    ok_eta = 0.0 < eta <= eta_max if eta_closed else 0.0 < eta < eta_max
    if not ok_eta:
        bracket = "]" if eta_closed else ")"
        raise ConfigError(f"eta must lie in (0, {eta_max}{bracket}, got {eta}")
    if not 0.0 < theta < 1.0:
        raise ConfigError(f"theta must lie in (0, 1), got {theta}")
    if max_backtracks < 1:
        raise ConfigError(f"max_backtracks must be >= 1, got {max_backtracks}")


@dataclass(frozen=True)
class AncgConfig:
    gamma0: float = 10.0
    eta: float = 0.01
    theta: float = 0.5
    nu: Optional[float] = None
    grad_tol: float = 1e-4
    max_outer: int = 100000
    max_backtracks: int = 60
    cg: CgConfig = field(default_factory=CgConfig)

    def __post_init__(self):
        if not self.gamma0 >= 1.0:
            raise ConfigError(f"gamma0 must be >= 1, got {self.gamma0}")
        check_line_search(self.eta, self.theta, self.max_backtracks)
        if self.nu is not None and not 0.0 < self.nu <= 1.0:
            raise ConfigError(f"nu must lie in (0, 1], got {self.nu}")
        if not self.grad_tol > 0.0:
            raise ConfigError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_outer < 1:
            raise ConfigError(f"max_outer must be >= 1, got {self.max_outer}")


def _h0(x, t, d, f_x, f_y, g_x, quad_d, nu):
    # H0 at y = x + t d, reusing f(y) from the line search and d^T H d.
    if not math.isfinite(f_y):
        return None
    try:
        return holder_estimate_h0(StepCache(x, x + t * d, f_x, f_y, g_x, t * t * quad_d), nu)
    except DegenerateStepError:
        return None


def ancg_step(state, oracle, cfg, nu):
    """One outer iteration; ``oracle`` is a :class:`~adancg.oracle.CountedProblem`."""
    t0 = time.perf_counter_ns()
    x, g, f_x, gamma = state.x, state.g_x, state.f_x, state.gamma
    gn = float(np.linalg.norm(g))
    eps = (gamma * gn ** nu) ** (1.0 / (1.0 + nu))
    zeta = min(0.5, gn ** (nu / (1.0 + nu)))
    hv_before = oracle.counters.n_hvp
    out = capped_cg(oracle.hvp_at(x), g, eps, zeta, cfg.cg)
    theta = cfg.theta

    if out.d_type is DType.NC:
        d_raw = out.d
        quad_raw = float(d_raw @ out.hbar_d) - 2.0 * eps * float(d_raw @ d_raw)
        d = nc_transform(d_raw, quad_raw, g)
        c = abs(quad_raw) / float(np.linalg.norm(d_raw)) ** 3
        quad_d = c * c * quad_raw
        alpha, j, trials = backtrack_nc(oracle, x, f_x, d, cfg.eta, theta, cfg.max_backtracks)
        x_new = x + alpha * d
        g_new = oracle.grad(x_new)
        sigma = None
        if j >= 1:
            sigma = _h0(x, theta ** (j - 1), d, f_x, trials[j - 1], g, quad_d, nu)
    else:
        d = out.d
        h_d = out.hbar_d - 2.0 * eps * d
        quad_d = float(d @ h_d)
        alpha, j, trials = backtrack_sol(
            oracle, x, f_x, d, eps, cfg.eta, theta, cfg.max_backtracks)
        x_new = x + alpha * d
        g_new = oracle.grad(x_new)
        if j == 0:
            try:
                sigma = holder_estimate_h1(
                    StepCache(x, x_new, f_x, trials[0], g, quad_d, g_y=g_new, h_step=h_d), nu)
            except DegenerateStepError:
                sigma = None
        else:
            cands = [_h0(x, 1.0, d, f_x, trials[0], g, quad_d, nu),
                     _h0(x, theta ** (j - 1), d, f_x, trials[j - 1], g, quad_d, nu)]
            cands = [s for s in cands if s is not None]
            sigma = max(cands) if cands else None

    gamma_new = gamma if sigma is None else max(gamma, sigma)
    record = IterationRecord(
        k=state.k, f=f_x, grad_norm=gn, d_type=out.d_type.value, epsilon=eps, zeta=zeta,
        alpha=alpha, j=j, sigma=sigma, gamma=gamma, gamma_after=gamma_new,
        cg_iters=out.iters, hv_products=oracle.counters.n_hvp - hv_before,
        wall_ns=time.perf_counter_ns() - t0,
    )
    new_state = SolverState(x=x_new, gamma=gamma_new, k=state.k + 1, f_x=trials[j], g_x=g_new)
    return new_state, record


def resolve_nu(problem, nu):
    nu = nu if nu is not None else problem.nu_hint
    if nu is None:
        raise ConfigError(f"{problem.name}: Hölder exponent nu is required (config or nu_hint)")
    if not 0.0 < nu <= 1.0:
        raise ConfigError(f"nu must lie in (0, 1], got {nu}")
    return float(nu)


def ancg_solve(problem, cfg=AncgConfig(), x0=None):
    """Minimize ``problem`` until ``||grad f|| <= cfg.grad_tol`` or a cap is hit."""
    nu = resolve_nu(problem, cfg.nu)
    return run_outer(problem, lambda s, o: ancg_step(s, o, cfg, nu),
                     cfg.gamma0, cfg.grad_tol, cfg.max_outer, x0=x0)
