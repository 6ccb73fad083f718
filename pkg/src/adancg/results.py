"""Per-iteration records and final results shared by all outer solvers."""

import enum
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .oracle import EvalCounters

TRACE_HEADER = (
    "k", "f", "grad_norm", "d_type", "epsilon", "zeta", "alpha", "j", "sigma",
    "gamma_after", "cg_iters", "hv_products", "cum_hv", "wall_ns",
)


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_OUTER = "MaxOuterReached"
    LINE_SEARCH_FAILED = "LineSearchFailed"
    CG_STALLED = "CgStalled"


@dataclass
class IterationRecord:
    """One outer iteration.

    ``gamma`` is the estimate the iteration started from; ``gamma_after``
    the one it hands to the next iteration.
    """

    k: int
    f: float
    grad_norm: float
    d_type: str
    epsilon: float
    zeta: float
    alpha: float
    j: int
    sigma: Optional[float]
    gamma: float
    gamma_after: float
    cg_iters: int
    hv_products: int
    wall_ns: int
    cg_calls: int = 1


@dataclass
class SolverState:
    x: np.ndarray
    gamma: float
    k: int
    f_x: float
    g_x: np.ndarray


@dataclass
class SolveResult:
    x_final: np.ndarray
    status: Status
    trace: List[IterationRecord]
    totals: EvalCounters
    f_final: float = float("nan")
    grad_norm_final: float = float("nan")
    message: str = ""

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    def grad_norms(self):
        """Gradient norms at x^0, x^1, ..., x_final."""
        return [r.grad_norm for r in self.trace] + [self.grad_norm_final]

    @property
    def cg_iters(self):
        return sum(r.cg_iters for r in self.trace)

    @property
    def subproblems(self):
        return sum(r.cg_calls for r in self.trace)


def trace_rows(trace):
    """Yield CSV rows (lists of strings) for a trace, matching TRACE_HEADER."""
    cum = 0
    for r in trace:
        cum += r.hv_products
        yield [
            str(r.k), repr(float(r.f)), repr(float(r.grad_norm)), r.d_type,
            repr(float(r.epsilon)), repr(float(r.zeta)), repr(float(r.alpha)), str(r.j),
            "" if r.sigma is None else repr(float(r.sigma)),
            repr(float(r.gamma_after)), str(r.cg_iters), str(r.hv_products), str(cum),
            str(r.wall_ns),
        ]


def local_order(grad_norms, last=3):
    """Least-squares slope of log||g_{k+1}|| against log||g_k|| over the final steps."""
    g = np.asarray(grad_norms, dtype=float)
    if g.size < last + 1:
        raise ValueError(f"need at least {last + 1} gradient norms, got {g.size}")
    xs = np.log(g[-last - 1:-1])
    ys = np.log(g[-last:])
    return float(np.polyfit(xs, ys, 1)[0])
