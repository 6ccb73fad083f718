"""Matrix-free problem interface and finite-difference self-checks."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, NumericalDomainError
from .rng import Xoshiro256

FD_STEP_GRAD = 1e-6
FD_STEP_HVP = 1e-5


@dataclass(frozen=True)
class ProblemOracle:
    """Read-only access to f, its gradient and Hessian-vector products.

    ``hvp_factory``, when given, maps a point ``x`` to a linear operator
    ``v -> H(x) v`` with any per-point work (active sets, inner products)
    done once; solvers use it inside capped CG where ``x`` is fixed.
    """

    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hvp: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "problem"
    nu_hint: Optional[float] = None
    hf_hint: Optional[float] = None
    hvp_factory: Optional[Callable[[np.ndarray], Callable[[np.ndarray], np.ndarray]]] = None
    x0: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ConfigError(f"dimension must be positive, got {self.dim}")
        if self.nu_hint is not None and not 0.0 < self.nu_hint <= 1.0:
            raise ConfigError(f"nu_hint must lie in (0, 1], got {self.nu_hint}")
        if self.hf_hint is not None and self.hf_hint < 0.0:
            raise ConfigError(f"hf_hint must be nonnegative, got {self.hf_hint}")

    def start(self):
        """Default starting point: ``x0`` if set, else the all-ones vector."""
        if self.x0 is not None:
            return np.array(self.x0, dtype=float)
        return np.ones(self.dim)


@dataclass
class EvalCounters:
    n_f: int = 0
    n_grad: int = 0
    n_hvp: int = 0

    def copy(self):
        return EvalCounters(self.n_f, self.n_grad, self.n_hvp)


def _check_point(problem, x, what="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ConfigError(f"{what} has shape {x.shape}, expected ({problem.dim},)")
    if not np.all(np.isfinite(x)):
        raise NumericalDomainError(f"{what} has non-finite entries", x=x)
    return x


def eval_f(problem, x, counters=None):
    x = _check_point(problem, x)
    value = float(problem.f(x))
    if counters is not None:
        counters.n_f += 1
    if not np.isfinite(value):
        raise NumericalDomainError(f"{problem.name}: f(x) is not finite", x=x)
    return value


def eval_grad(problem, x, counters=None):
    x = _check_point(problem, x)
    g = np.asarray(problem.grad(x), dtype=float)
    if counters is not None:
        counters.n_grad += 1
    if not np.all(np.isfinite(g)):
        raise NumericalDomainError(f"{problem.name}: gradient is not finite", x=x)
    return g


def eval_hvp(problem, x, v, counters=None):
    x = _check_point(problem, x)
    v = _check_point(problem, v, "v")
    hv = np.asarray(problem.hvp(x, v), dtype=float)
    if counters is not None:
        counters.n_hvp += 1
    if not np.all(np.isfinite(hv)):
        raise NumericalDomainError(f"{problem.name}: Hessian-vector product is not finite", x=x)
    return hv


class CountedProblem:
    """Per-run view of a problem that tallies every oracle call."""

    def __init__(self, problem, counters=None):
        self.problem = problem
        self.counters = counters if counters is not None else EvalCounters()

    @property
    def dim(self):
        return self.problem.dim

    def f(self, x):
        return eval_f(self.problem, x, self.counters)

    def grad(self, x):
        return eval_grad(self.problem, x, self.counters)

    def hvp(self, x, v):
        return eval_hvp(self.problem, x, v, self.counters)

    def hvp_at(self, x):
        """Linear operator ``v -> H(x) v`` that counts each product."""
        problem = self.problem
        x = _check_point(problem, x)
        if problem.hvp_factory is not None:
            op = problem.hvp_factory(x)
        else:
            def op(v):
                return problem.hvp(x, v)
        counters = self.counters

        def hvp(v):
            hv = np.asarray(op(v), dtype=float)
            counters.n_hvp += 1
            if not np.all(np.isfinite(hv)):
                raise NumericalDomainError(
                    f"{problem.name}: Hessian-vector product is not finite", x=x)
            return hv

        return hvp


@dataclass
class FdReport:
    max_grad_err: float
    max_hvp_err: float


def fd_check(problem, x, trials=5, seed=0):
    """Central-difference checks of the gradient and Hessian-vector product.

    For each of ``trials`` random unit directions ``u`` the directional
    derivative ``(f(x+hu) - f(x-hu)) / 2h`` is compared with ``g(x)^T u``
    (error scaled by ``max(1, ||g||)``) and ``(g(x+hu) - g(x-hu)) / 2h``
    with ``H(x) u`` (error scaled by ``max(1, ||H u||)``).
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    x = _check_point(problem, x)
    rng = Xoshiro256(seed)
    g = eval_grad(problem, x)
    gscale = max(1.0, float(np.linalg.norm(g)))
    max_grad_err = 0.0
    max_hvp_err = 0.0
    for _ in range(trials):
        u = rng.normals(problem.dim)
        u /= np.linalg.norm(u)
        h = FD_STEP_GRAD
        fd = (eval_f(problem, x + h * u) - eval_f(problem, x - h * u)) / (2.0 * h)
        max_grad_err = max(max_grad_err, abs(fd - float(g @ u)) / gscale)
        h = FD_STEP_HVP
        fd_hv = (eval_grad(problem, x + h * u) - eval_grad(problem, x - h * u)) / (2.0 * h)
        hv = eval_hvp(problem, x, u)
        err = float(np.linalg.norm(fd_hv - hv)) / max(1.0, float(np.linalg.norm(hv)))
        max_hvp_err = max(max_hvp_err, err)
    if not (np.isfinite(max_grad_err) and np.isfinite(max_hvp_err)):
        raise NumericalDomainError("finite-difference check produced non-finite errors", x=x)
    return FdReport(max_grad_err, max_hvp_err)
