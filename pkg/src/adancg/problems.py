"""Seeded benchmark families and analytic test fixtures.

Draw order (all from one :class:`~adancg.rng.Xoshiro256` stream per seed):

infeasibility
    for each i in 0..m-1: G_i (n*n normals, row-major), b_i (n normals),
    c_i (1 normal); ``A_i = (G_i + G_i^T) / (2 sqrt(n))``.
RePU
    a_1..a_m (m*n normals, row-major), then bbar (m normals);
    ``b_i = |bbar_i|``.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError
from .oracle import ProblemOracle
from .rng import Xoshiro256


@dataclass(frozen=True)
class InfeasibilitySpec:
    n: int
    m: int
    p: float
    seed: int = 0


@dataclass(frozen=True)
class RepuSpec:
    n: int
    m: int
    p: float
    seed: int = 0


def _check_dims(n, m, p):
    if int(n) < 1 or int(m) < 1:
        raise ConfigError(f"n and m must be positive, got n={n}, m={m}")
    if not p > 2.0:
        raise ConfigError(f"exponent p must exceed 2, got {p}")


def infeasibility_data(spec):
    """Generate ``(A, b, c)`` with shapes ``(m, n, n)``, ``(m, n)``, ``(m,)``."""
    _check_dims(spec.n, spec.m, spec.p)
    n, m = spec.n, spec.m
    rng = Xoshiro256(spec.seed)
    A = np.empty((m, n, n))
    b = np.empty((m, n))
    c = np.empty(m)
    scale = 2.0 * math.sqrt(n)
    for i in range(m):
        G = rng.normals((n, n))
        A[i] = (G + G.T) / scale
        b[i] = rng.normals(n)
        c[i] = rng.normal()
    return A, b, c


def infeasibility_from_data(A, b, c, p, name="infeasibility"):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n, _ = A.shape
    _check_dims(n, m, p)

    def parts(x):
        Ax = A @ x
        q = Ax @ x + b @ x + c
        dq = 2.0 * Ax + b
        return q, dq

    def f(x):
        q, _ = parts(x)
        return float(np.sum(np.maximum(q, 0.0) ** p) / m)

    def grad(x):
        q, dq = parts(x)
        w = p * np.maximum(q, 0.0) ** (p - 1.0)
        return (w @ dq) / m

    def hvp_factory(x):
        q, dq = parts(x)
        qp = np.maximum(q, 0.0)
        active = np.flatnonzero(qp > 0.0)
        dq_a = dq[active]
        A_a = A[active]
        w1 = p * (p - 1.0) * qp[active] ** (p - 2.0)
        w2 = 2.0 * p * qp[active] ** (p - 1.0)

        def op(v):
            if active.size == 0:
                return np.zeros(n)
            out = (w1 * (dq_a @ v)) @ dq_a
            out += np.tensordot(w2, A_a @ v, axes=1)
            return out / m

        return op

    def hvp(x, v):
        return hvp_factory(x)(v)

    return ProblemOracle(
        dim=n, f=f, grad=grad, hvp=hvp, hvp_factory=hvp_factory, name=name,
        nu_hint=min(p - 2.0, 1.0),
    )


def make_infeasibility(spec):
    """Infeasibility-detection objective ``(1/m) sum (x^T A_i x + b_i^T x + c_i)_+^p``."""
    A, b, c = infeasibility_data(spec)
    name = f"infeas(n={spec.n},m={spec.m},p={spec.p},seed={spec.seed})"
    return infeasibility_from_data(A, b, c, spec.p, name=name)


def repu_data(spec):
    """Generate ``(a, b)`` with shapes ``(m, n)`` and ``(m,)``."""
    _check_dims(spec.n, spec.m, spec.p)
    rng = Xoshiro256(spec.seed)
    a = rng.normals((spec.m, spec.n))
    b = np.abs(rng.normals(spec.m))
    return a, b


def repu_from_data(a, b, p, name="repu"):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    _check_dims(n, m, p)

    def parts(x):
        u = np.maximum(a @ x, 0.0)
        return u, u ** p - b

    def f(x):
        _, r = parts(x)
        return float(r @ r / m)

    def grad(x):
        u, r = parts(x)
        return (2.0 * p / m) * ((r * u ** (p - 1.0)) @ a)

    def hvp_factory(x):
        u, r = parts(x)
        # d^2/ds^2 of (u^p - b)^2 with u = s_+
        w = (2.0 / m) * ((p * u ** (p - 1.0)) ** 2 + r * p * (p - 1.0) * u ** (p - 2.0))

        def op(v):
            return (w * (a @ v)) @ a

        return op

    def hvp(x, v):
        return hvp_factory(x)(v)

    return ProblemOracle(
        dim=n, f=f, grad=grad, hvp=hvp, hvp_factory=hvp_factory, name=name,
        nu_hint=min(p - 2.0, 1.0),
    )


def make_repu(spec):
    """Single-layer RePU regression ``(1/m) sum ((a_i^T x)_+^p - b_i)^2``."""
    a, b = repu_data(spec)
    name = f"repu(n={spec.n},m={spec.m},p={spec.p},seed={spec.seed})"
    return repu_from_data(a, b, spec.p, name=name)


def make_quadratic(diag):
    """``f(x) = x^T diag(d) x / 2``; constant Hessian, minimizer 0."""
    d = np.array(diag, dtype=float)
    if d.ndim != 1 or d.size == 0 or np.any(~(d > 0.0)):
        raise ConfigError("quadratic diagonal must be a nonempty vector of positive reals")
    return ProblemOracle(
        dim=d.size,
        f=lambda x: 0.5 * float(x @ (d * x)),
        grad=lambda x: d * x,
        hvp=lambda x, v: d * v,
        name=f"quadratic(dim={d.size})",
        nu_hint=1.0,
        hf_hint=0.0,
    )


def make_quartic_test(dim, a_diag=None, radius=1.0):
    """``f(x) = x^T diag(a) x / 2 + sum x_i^4 / 4``.

    The Hessian ``diag(a) + 3 diag(x^2)`` is Lipschitz with modulus
    ``6 * radius`` on the box ``[-radius, radius]^dim``; that value is
    stored in ``hf_hint``.
    """
    a = np.arange(1.0, dim + 1.0) if a_diag is None else np.array(a_diag, dtype=float)
    if a.shape != (dim,) or np.any(~(a > 0.0)):
        raise ConfigError("quartic diagonal must be positive with length dim")
    if not radius > 0.0:
        raise ConfigError(f"radius must be positive, got {radius}")

    def hvp_factory(x):
        h = a + 3.0 * x * x
        return lambda v: h * v

    return ProblemOracle(
        dim=dim,
        f=lambda x: 0.5 * float(x @ (a * x)) + 0.25 * float(np.sum(x ** 4)),
        grad=lambda x: a * x + x ** 3,
        hvp=lambda x, v: (a + 3.0 * x * x) * v,
        hvp_factory=hvp_factory,
        name=f"quartic(dim={dim})",
        nu_hint=1.0,
        hf_hint=6.0 * radius,
    )


def dump_instance(spec, path=None):
    """Serialize a seeded instance (spec plus flattened data) as JSON text."""
    if isinstance(spec, InfeasibilitySpec):
        A, b, c = infeasibility_data(spec)
        doc = {"family": "infeasibility", "spec": asdict(spec),
               "data": {"A": A.ravel().tolist(), "b": b.ravel().tolist(), "c": c.tolist()}}
    elif isinstance(spec, RepuSpec):
        a, b = repu_data(spec)
        doc = {"family": "repu", "spec": asdict(spec),
               "data": {"a": a.ravel().tolist(), "b": b.tolist()}}
    else:
        raise ConfigError(f"cannot dump instance of type {type(spec).__name__}")
    text = json.dumps(doc)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_instance(source):
    """Rebuild a :class:`ProblemOracle` from :func:`dump_instance` output.

    ``source`` is JSON text or a path to a JSON file.
    """
    text = source
    if not source.lstrip().startswith("{"):
        with open(source) as fh:
            text = fh.read()
    doc = json.loads(text)
    family = doc.get("family")
    spec = doc["spec"]
    n, m, p = int(spec["n"]), int(spec["m"]), float(spec["p"])
    data = doc["data"]
    if family == "infeasibility":
        A = np.array(data["A"], dtype=float).reshape(m, n, n)
        b = np.array(data["b"], dtype=float).reshape(m, n)
        c = np.array(data["c"], dtype=float)
        return infeasibility_from_data(A, b, c, p, name=f"infeas(loaded,seed={spec['seed']})")
    if family == "repu":
        a = np.array(data["a"], dtype=float).reshape(m, n)
        b = np.array(data["b"], dtype=float)
        return repu_from_data(a, b, p, name=f"repu(loaded,seed={spec['seed']})")
    raise ConfigError(f"unknown instance family {family!r}")
