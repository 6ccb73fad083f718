"""Universal adaptive regularized Newton-CG: no Hölder exponent needed.

The damping is ``eps = sqrt(gamma ||g||)`` throughout, and ``gamma`` only
ever doubles, when an iteration fails to halve the gradient while also
making too little progress.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._driver import run_outer
from .ancg import check_line_search
from .capped_cg import CgConfig, DType, capped_cg
from .errors import ConfigError, NumericalDomainError
from .linesearch import backtrack_nc, backtrack_sol, nc_transform
from .results import IterationRecord, SolverState

LS_PROOF = "proof"
LS_DISPLAYED = "displayed"


@dataclass(frozen=True)
class UancgConfig:
    """``ls_variant="proof"`` backtracks on ``eta * eps * theta^j ||d||^2``;
    ``"displayed"`` uses ``eta * sqrt(eps) * theta^j ||d||^2`` instead.
    """

    gamma0: float = 10.0
    eta: float = 0.01
    theta: float = 0.5
    grad_tol: float = 1e-4
    max_outer: int = 100000
    max_backtracks: int = 60
    cg: CgConfig = field(default_factory=CgConfig)
    ls_variant: str = LS_PROOF

    def __post_init__(self):
        if not self.gamma0 >= 1.0:
            raise ConfigError(f"gamma0 must be >= 1, got {self.gamma0}")
        check_line_search(self.eta, self.theta, self.max_backtracks, eta_max=0.5, eta_closed=True)
        if not self.grad_tol > 0.0:
            raise ConfigError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_outer < 1:
            raise ConfigError(f"max_outer must be >= 1, got {self.max_outer}")
        if self.ls_variant not in (LS_PROOF, LS_DISPLAYED):
            raise ConfigError(f"ls_variant must be 'proof' or 'displayed', got {self.ls_variant!r}")

    @property
    def c_sol(self):
        return self.eta * (1.0 - self.eta) * self.theta / 400.0


def should_double_sol(gamma, gn, gn_new, descent, c_sol):
    return gn_new > gn / 2.0 and descent < c_sol * gamma ** -0.5 * gn ** 1.5


def should_double_nc(gamma, gn, gn_new, alpha, theta):
    return gn_new > gn / 2.0 and alpha < theta / gamma


def uancg_step(state, oracle, cfg):
    t0 = time.perf_counter_ns()
    x, g, f_x, gamma = state.x, state.g_x, state.f_x, state.gamma
    gn = float(np.linalg.norm(g))
    eps = math.sqrt(gamma * gn)
    zeta = min(0.5, math.sqrt(gn))
    hv_before = oracle.counters.n_hvp
    out = capped_cg(oracle.hvp_at(x), g, eps, zeta, cfg.cg)
    theta = cfg.theta

    if out.d_type is DType.NC:
        d_raw = out.d
        quad_raw = float(d_raw @ out.hbar_d) - 2.0 * eps * float(d_raw @ d_raw)
        d = nc_transform(d_raw, quad_raw, g)
        alpha, j, trials = backtrack_nc(oracle, x, f_x, d, cfg.eta, theta, cfg.max_backtracks)
        x_new = x + alpha * d
        f_new = trials[j]
        g_new = oracle.grad(x_new)
        double = should_double_nc(gamma, gn, float(np.linalg.norm(g_new)), alpha, theta)
    else:
        d = out.d
        y = x + d
        try:
            f_y = oracle.f(y)
        except NumericalDomainError:
            f_y = math.inf
        g_y = None
        if f_y <= f_x:
            g_y = oracle.grad(y)
        if g_y is not None and float(np.linalg.norm(g_y)) <= gn / 2.0:
            alpha, j, x_new, f_new, g_new = 1.0, 0, y, f_y, g_y
        else:
            coeff = eps if cfg.ls_variant == LS_PROOF else math.sqrt(eps)
            alpha, j, trials = backtrack_sol(
                oracle, x, f_x, d, coeff, cfg.eta, theta, cfg.max_backtracks, known={0: f_y})
            x_new = x + alpha * d
            f_new = trials[j]
            g_new = g_y if (j == 0 and g_y is not None) else oracle.grad(x_new)
        double = should_double_sol(gamma, gn, float(np.linalg.norm(g_new)), f_x - f_new, cfg.c_sol)

    gamma_new = 2.0 * gamma if double else gamma
    record = IterationRecord(
        k=state.k, f=f_x, grad_norm=gn, d_type=out.d_type.value, epsilon=eps, zeta=zeta,
        alpha=alpha, j=j, sigma=None, gamma=gamma, gamma_after=gamma_new,
        cg_iters=out.iters, hv_products=oracle.counters.n_hvp - hv_before,
        wall_ns=time.perf_counter_ns() - t0,
    )
    return SolverState(x=x_new, gamma=gamma_new, k=state.k + 1, f_x=f_new, g_x=g_new), record


def uancg_solve(problem, cfg=UancgConfig(), x0=None):
    """Minimize ``problem`` without any knowledge of its Hölder exponent."""
    return run_outer(problem, lambda s, o: uancg_step(s, o, cfg),
                     cfg.gamma0, cfg.grad_tol, cfg.max_outer, x0=x0)
