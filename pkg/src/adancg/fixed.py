"""Newton-CG with damping frozen at ``eps_target^(nu/(1+nu))``.

A comparator for the adaptive solvers: same capped CG, same line
searches, but no damping adaptation.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._driver import run_outer
from .ancg import check_line_search, resolve_nu
from .capped_cg import CgConfig, DType, capped_cg
from .errors import ConfigError
from .linesearch import backtrack_nc, backtrack_sol, nc_transform
from .results import IterationRecord, SolverState


@dataclass(frozen=True)
class FixedConfig:
    eps_target: float = 1e-4
    nu: Optional[float] = None
    eta: float = 0.01
    theta: float = 0.5
    grad_tol: float = 1e-4
    max_outer: int = 100000
    max_backtracks: int = 60
    cg: CgConfig = field(default_factory=CgConfig)

    def __post_init__(self):
        if not self.eps_target > 0.0:
            raise ConfigError(f"eps_target must be positive, got {self.eps_target}")
        if self.nu is not None and not 0.0 < self.nu <= 1.0:
            raise ConfigError(f"nu must lie in (0, 1], got {self.nu}")
        check_line_search(self.eta, self.theta, self.max_backtracks)
        if not self.grad_tol > 0.0:
            raise ConfigError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_outer < 1:
            raise ConfigError(f"max_outer must be >= 1, got {self.max_outer}")


def fixed_step(state, oracle, cfg, damping):
    t0 = time.perf_counter_ns()
    x, g, f_x = state.x, state.g_x, state.f_x
    gn = float(np.linalg.norm(g))
    zeta = min(0.5, damping)
    hv_before = oracle.counters.n_hvp
    out = capped_cg(oracle.hvp_at(x), g, damping, zeta, cfg.cg)
    if out.d_type is DType.NC:
        quad_raw = float(out.d @ out.hbar_d) - 2.0 * damping * float(out.d @ out.d)
        d = nc_transform(out.d, quad_raw, g)
        alpha, j, trials = backtrack_nc(oracle, x, f_x, d, cfg.eta, cfg.theta, cfg.max_backtracks)
    else:
        d = out.d
        alpha, j, trials = backtrack_sol(
            oracle, x, f_x, d, damping, cfg.eta, cfg.theta, cfg.max_backtracks)
    x_new = x + alpha * d
    g_new = oracle.grad(x_new)
    record = IterationRecord(
        k=state.k, f=f_x, grad_norm=gn, d_type=out.d_type.value, epsilon=damping, zeta=zeta,
        alpha=alpha, j=j, sigma=None, gamma=state.gamma, gamma_after=state.gamma,
        cg_iters=out.iters, hv_products=oracle.counters.n_hvp - hv_before,
        wall_ns=time.perf_counter_ns() - t0,
    )
    return SolverState(x=x_new, gamma=state.gamma, k=state.k + 1, f_x=trials[j], g_x=g_new), record


def fixed_damping(cfg, nu):
    return cfg.eps_target ** (nu / (1.0 + nu))


def fixed_solve(problem, cfg=FixedConfig(), x0=None):
    nu = resolve_nu(problem, cfg.nu)
    damping = fixed_damping(cfg, nu)
    # gamma plays no role here; carried as 1 so traces keep one schema.
    return run_outer(problem, lambda s, o: fixed_step(s, o, cfg, damping),
                     1.0, cfg.grad_tol, cfg.max_outer, x0=x0)
