import logging

import numpy as np

from .errors import CgStallError, LineSearchFailed
from .oracle import CountedProblem
from .results import SolveResult, SolverState, Status

log = logging.getLogger("adancg")


def run_outer(problem, step, gamma0, grad_tol, max_outer, x0=None):
    """Iterate ``step(state, oracle) -> (state, record)`` until stationarity or a cap."""
    oracle = CountedProblem(problem)
    x = problem.start() if x0 is None else np.array(x0, dtype=float)
    state = SolverState(x=x, gamma=float(gamma0), k=0, f_x=oracle.f(x), g_x=oracle.grad(x))
    trace = []
    message = ""
    while True:
        gn = float(np.linalg.norm(state.g_x))
        if gn <= grad_tol:
            status = Status.CONVERGED
            break
        if state.k >= max_outer:
            status = Status.MAX_OUTER
            message = f"stopped after {max_outer} outer iterations"
            break
        try:
            state, record = step(state, oracle)
        except LineSearchFailed as exc:
            status, message = Status.LINE_SEARCH_FAILED, str(exc)
            break
        except CgStallError as exc:
            status, message = Status.CG_STALLED, str(exc)
            break
        trace.append(record)
        log.debug("%s k=%d f=%.6e |g|=%.3e %s alpha=%.3g gamma=%.4g", problem.name,
                  record.k, record.f, record.grad_norm, record.d_type, record.alpha,
                  record.gamma_after)
    return SolveResult(
        x_final=state.x, status=status, trace=trace, totals=oracle.counters,
        f_final=state.f_x, grad_norm_final=float(np.linalg.norm(state.g_x)), message=message,
    )
