"""Exception hierarchy shared by the oracles, solvers and CLI."""


class AdancgError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(AdancgError, ValueError):
    """Invalid configuration or violated input precondition."""


class NumericalDomainError(AdancgError, ArithmeticError):
    """An oracle produced a non-finite value."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DegenerateStepError(AdancgError, ArithmeticError):
    """A Taylor-residual estimator was asked for a (numerically) zero step."""


class OracleError(AdancgError):
    """A dense verification oracle could not produce a trustworthy answer."""


class LineSearchFailed(AdancgError):
    """Backtracking exceeded its cap without meeting the descent condition."""

    def __init__(self, message, j=None, trials=None):
        super().__init__(message)
        self.j = j
        self.trials = trials or {}


class CgStallError(AdancgError):
    """Capped CG hit its iteration cap without producing a certificate."""

    def __init__(self, message, y_best=None, iters=0, hv_products=0, residual=None):
        super().__init__(message)
        self.y_best = y_best
        self.iters = iters
        self.hv_products = hv_products
        self.residual = residual
