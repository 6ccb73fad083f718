"""Adaptive regularized Newton-CG methods for nonconvex optimization."""

from .ancg import AncgConfig, ancg_solve
from .capped_cg import CgConfig, CgOutcome, DType, capped_cg
from .errors import (
    AdancgError, CgStallError, ConfigError, DegenerateStepError, LineSearchFailed,
    NumericalDomainError, OracleError,
)
from .fixed import FixedConfig, fixed_solve
from .oracle import EvalCounters, ProblemOracle, fd_check
from .problems import (
    InfeasibilitySpec, RepuSpec, make_infeasibility, make_quadratic, make_quartic_test, make_repu,
)
from .results import IterationRecord, SolveResult, Status, local_order
from .uancg import UancgConfig, uancg_solve

__all__ = [
    "AdancgError", "AncgConfig", "CgConfig", "CgOutcome", "CgStallError", "ConfigError",
    "DType", "DegenerateStepError", "EvalCounters", "FixedConfig", "InfeasibilitySpec",
    "IterationRecord", "LineSearchFailed", "NumericalDomainError", "OracleError",
    "ProblemOracle", "RepuSpec", "SolveResult", "Status", "UancgConfig", "ancg_solve",
    "capped_cg", "fd_check", "fixed_solve", "local_order", "make_infeasibility",
    "make_quadratic", "make_quartic_test", "make_repu", "uancg_solve",
]
