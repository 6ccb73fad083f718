"""Negative-curvature rescaling and the two backtracking rules."""

import math

import numpy as np

from .errors import ConfigError, LineSearchFailed, NumericalDomainError


def sgn(z):
    """Sign with ``sgn(0) = 1``."""
    return 1.0 if z >= 0.0 else -1.0


def nc_transform(d_raw, quad_form, g):
    """Rescale a negative-curvature direction so that its curvature equals ``-||d||``.

    Returns ``-sgn(d_raw^T g) * |quad_form| / ||d_raw||^3 * d_raw``, which
    satisfies ``d^T g <= 0`` and ``d^T H d / ||d||^2 = -||d||``.
    """
    d_raw = np.asarray(d_raw, dtype=float)
    if not quad_form < 0.0:
        raise ConfigError(f"nc_transform needs negative curvature, got d^T H d = {quad_form}")
    nd = float(np.linalg.norm(d_raw))
    if nd == 0.0:
        raise ConfigError("nc_transform needs a nonzero direction")
    scale = abs(quad_form) / nd ** 3
    return -sgn(float(d_raw @ g)) * scale * d_raw


def _trial(problem, x, t, d):
    try:
        return problem.f(x + t * d)
    except NumericalDomainError:
        # Overflow at a far trial point is a rejected trial, not a fatal error.
        return math.inf


def _backtrack(problem, x, f_x, d, theta, max_backtracks, decrease, known=None):
    trials = dict(known or {})
    for j in range(max_backtracks + 1):
        t = theta ** j
        if j not in trials:
            trials[j] = _trial(problem, x, t, d)
        if trials[j] < f_x - decrease(j, t):
            return t, j, trials
    raise LineSearchFailed(
        f"no acceptable step after {max_backtracks} backtracks", j=max_backtracks, trials=trials)


def backtrack_nc(problem, x, f_x, d, eta, theta, max_backtracks):
    """Smallest ``j >= 0`` with ``f(x + theta^j d) < f(x) - eta/2 theta^{2j} ||d||^3``.

    ``problem`` is a counted problem (anything with ``.f``).  Returns
    ``(alpha, j, trials)`` where ``trials`` maps each tried ``j`` to its
    objective value.
    """
    if not np.any(d):
        raise ConfigError("backtracking needs a nonzero direction")
    nd3 = float(np.linalg.norm(d)) ** 3
    return _backtrack(problem, x, f_x, d, theta, max_backtracks,
                      lambda j, t: 0.5 * eta * t * t * nd3)


def backtrack_sol(problem, x, f_x, d, epsilon, eta, theta, max_backtracks, known=None):
    """Smallest ``j >= 0`` with ``f(x + theta^j d) < f(x) - eta eps theta^j ||d||^2``.

    ``known`` supplies already-evaluated trial values keyed by ``j``.
    """
    if not np.any(d):
        raise ConfigError("backtracking needs a nonzero direction")
    if not epsilon > 0.0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    nd2 = float(d @ d)
    return _backtrack(problem, x, f_x, d, theta, max_backtracks,
                      lambda j, t: eta * epsilon * t * nd2, known=known)
