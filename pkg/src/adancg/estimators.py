"""Taylor residuals and the lower Hölder-modulus estimators built on them."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DegenerateStepError

MIN_STEP = 1e-300


@dataclass
class StepCache:
    """Quantities already computed along the step from ``x`` to ``y``.

    ``quad_form`` is ``(y-x)^T H(x) (y-x)`` and ``h_step`` is ``H(x)(y-x)``.
    """

    x: np.ndarray
    y: np.ndarray
    f_x: float
    f_y: float
    g_x: np.ndarray
    quad_form: float
    g_y: Optional[np.ndarray] = None
    h_step: Optional[np.ndarray] = None

    def step_norm(self):
        s = float(np.linalg.norm(np.asarray(self.y) - np.asarray(self.x)))
        if s < MIN_STEP:
            raise DegenerateStepError(f"step norm {s:.3e} is too small for a Taylor estimate")
        return s


def taylor_residual_f(c):
    """``|f(y) - f(x) - g(x)^T s - s^T H(x) s / 2|`` with ``s = y - x``."""
    s = np.asarray(c.y) - np.asarray(c.x)
    return abs(c.f_y - c.f_x - float(np.asarray(c.g_x) @ s) - 0.5 * c.quad_form)


def taylor_residual_grad(c):
    """``||g(y) - g(x) - H(x) s||``."""
    if c.g_y is None or c.h_step is None:
        raise ConfigError("gradient residual needs g_y and h_step in the cache")
    return float(np.linalg.norm(np.asarray(c.g_y) - np.asarray(c.g_x) - np.asarray(c.h_step)))


def holder_estimate_h0(c, nu):
    s = c.step_norm()
    return 2.0 * taylor_residual_f(c) / s ** (2.0 + nu)


def holder_estimate_h1(c, nu):
    s = c.step_norm()
    return taylor_residual_grad(c) / s ** (1.0 + nu)
