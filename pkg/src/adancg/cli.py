"""Benchmark command line: ``adancg run|compare|verify``.

Exit codes: 0 all runs converged (or all suites passed), 1 a verify suite
failed, 2 an outer-iteration cap was hit, 3 a line search failed, 4 the
configuration was invalid, 5 capped CG stalled.
"""

import argparse
import csv
import io
import json
import os
import re
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional

import numpy as np

from .ancg import AncgConfig, ancg_solve
from .capped_cg import CgConfig
from .errors import ConfigError
from .fixed import FixedConfig, fixed_solve
from .problems import (
    InfeasibilitySpec, RepuSpec, _check_dims, make_infeasibility, make_quadratic,
    make_quartic_test, make_repu,
)
from .results import TRACE_HEADER, Status, trace_rows
from .uancg import UancgConfig, uancg_solve

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CODES = {
    Status.MAX_OUTER: 2,
    Status.LINE_SEARCH_FAILED: 3,
    Status.CG_STALLED: 5,
}
EXIT_CONFIG = 4
# Reported when runs end in different ways; the most severe wins.
SEVERITY = (Status.CG_STALLED, Status.LINE_SEARCH_FAILED, Status.MAX_OUTER)

ALGOS = ("ancg", "uancg", "fixed")
PROBLEMS = ("quadratic", "quartic", "infeas", "repu")
SEEDED = ("infeas", "repu")


@dataclass
class RunSpec:
    algo: str = "uancg"
    problem: str = "quadratic"
    n: int = 100
    m: int = 10
    p: float = 2.5
    dim: int = 10
    seeds: List[int] = field(default_factory=lambda: [0])
    tol: float = 1e-4
    gamma0: float = 10.0
    eta: float = 0.01
    theta: float = 0.5
    nu: Optional[float] = None
    max_iters: int = 100000
    out: str = "runs"
    ls_variant: str = "proof"
    track_hr: bool = True

    def validate(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algo {self.algo!r}; choose from {', '.join(ALGOS)}")
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; "
                              f"choose from {', '.join(PROBLEMS)}")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if self.problem in SEEDED:
            _check_dims(self.n, self.m, self.p)
        elif int(self.dim) < 1:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        self.solver_config()
        return self

    def solver_config(self):
        cg = CgConfig(track_hr=self.track_hr)
        if self.algo == "ancg":
            return AncgConfig(gamma0=self.gamma0, eta=self.eta, theta=self.theta, nu=self.nu,
                              grad_tol=self.tol, max_outer=self.max_iters, cg=cg)
        if self.algo == "uancg":
            return UancgConfig(gamma0=self.gamma0, eta=self.eta, theta=self.theta,
                               grad_tol=self.tol, max_outer=self.max_iters, cg=cg,
                               ls_variant=self.ls_variant)
        return FixedConfig(eps_target=self.tol, nu=self.nu, eta=self.eta, theta=self.theta,
                           grad_tol=self.tol, max_outer=self.max_iters, cg=cg)

    def instance(self, seed):
        if self.problem == "infeas":
            return make_infeasibility(InfeasibilitySpec(self.n, self.m, self.p, seed))
        if self.problem == "repu":
            return make_repu(RepuSpec(self.n, self.m, self.p, seed))
        if self.problem == "quartic":
            return make_quartic_test(self.dim)
        return make_quadratic(np.arange(1.0, self.dim + 1.0))

    def label(self, seed):
        tag = self.problem if self.problem not in SEEDED else f"{self.problem}_seed{seed}"
        return f"{self.algo}_{tag}"


SOLVERS = {"ancg": ancg_solve, "uancg": uancg_solve, "fixed": fixed_solve}


@dataclass
class RunOutcome:
    seed: int
    status: Status
    outer: int
    cg_iters: int
    subproblems: int
    n_f: int
    n_grad: int
    n_hvp: int
    wall_s: float
    f_final: float
    grad_norm_final: float
    trace_csv: str


def parse_seeds(text):
    """``"1..10"`` (inclusive) or ``"1,2,5"``."""
    text = str(text).strip()
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    try:
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if b < a:
                raise ConfigError(f"empty seed range {text!r}")
            return list(range(a, b + 1))
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse seed list {text!r}") from exc


def _coerce_seeds(value):
    if isinstance(value, str):
        return parse_seeds(value)
    if isinstance(value, int):
        return [value]
    return [int(s) for s in value]


def spec_from_doc(doc, base=None):
    """Build a RunSpec from a JSON-like mapping over ``base``."""
    known = {f.name for f in fields(RunSpec)}
    doc = dict(doc)
    for key in ("seed", "seed_range"):
        if key in doc:
            doc["seeds"] = doc.pop(key)
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown RunSpec keys: {', '.join(sorted(unknown))}")
    if "seeds" in doc:
        doc["seeds"] = _coerce_seeds(doc["seeds"])
    return replace(base or RunSpec(), **doc)


def _one(spec, seed):
    problem = spec.instance(seed)
    t0 = time.perf_counter()
    res = SOLVERS[spec.algo](problem, spec.solver_config())
    wall = time.perf_counter() - t0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    writer.writerows(trace_rows(res.trace))
    t = res.totals
    return RunOutcome(seed, res.status, len(res.trace), res.cg_iters, res.subproblems,
                      t.n_f, t.n_grad, t.n_hvp, wall, res.f_final, res.grad_norm_final,
                      buf.getvalue())


def execute(spec):
    """Solve every seed of ``spec``; concurrency is capped by SOLVER_THREADS."""
    try:
        threads = max(1, int(os.environ.get("SOLVER_THREADS", "1")))
    except ValueError as exc:
        raise ConfigError("SOLVER_THREADS must be an integer") from exc
    if threads == 1 or len(spec.seeds) == 1:
        return [_one(spec, s) for s in spec.seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: _one(spec, s), spec.seeds))


def exit_code(outcomes):
    statuses = {o.status for o in outcomes}
    for s in SEVERITY:
        if s in statuses:
            return EXIT_CODES[s]
    return EXIT_OK


SUMMARY_HEADER = ("seed", "status", "outer_iters", "cg_iters", "subproblems", "n_f", "n_grad",
                  "n_hvp", "wall_s", "f_final", "grad_norm_final")


def _summary_row(o):
    return [o.seed, o.status.value, o.outer, o.cg_iters, o.subproblems, o.n_f, o.n_grad,
            o.n_hvp, f"{o.wall_s:.6f}", repr(float(o.f_final)), repr(float(o.grad_norm_final))]


def write_run(spec, outcomes):
    os.makedirs(spec.out, exist_ok=True)
    for o in outcomes:
        with open(os.path.join(spec.out, f"{spec.label(o.seed)}.csv"), "w", newline="") as fh:
            fh.write(o.trace_csv)
    path = os.path.join(spec.out, f"{spec.algo}_{spec.problem}_summary.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        w.writerows(_summary_row(o) for o in outcomes)


def _median(xs):
    return statistics.median(xs)


def print_run(spec, outcomes, out=None):
    out = out if out is not None else sys.stdout
    for o in outcomes:
        print(f"{spec.algo} {spec.problem} seed={o.seed} status={o.status.value} "
              f"outer={o.outer} cg_iters={o.cg_iters} n_f={o.n_f} n_grad={o.n_grad} "
              f"n_hvp={o.n_hvp} wall={o.wall_s:.3f}s", file=out)
    print(f"{spec.algo} {spec.problem} runs={len(outcomes)} "
          f"median_subproblems={_median([o.subproblems for o in outcomes])} "
          f"median_hv_products={_median([o.n_hvp for o in outcomes])} "
          f"mean_wall={statistics.fmean(o.wall_s for o in outcomes):.3f}s", file=out)


def cmd_run(spec):
    spec.validate()
    outcomes = execute(spec)
    write_run(spec, outcomes)
    print_run(spec, outcomes)
    return exit_code(outcomes)


COMPARE_HEADER = ("algo", "runs", "converged", "mean_wall_s", "mean_subproblems", "mean_hv",
                  "median_subproblems", "median_hv")


def cmd_compare(specs):
    if len(specs) < 2:
        raise ConfigError("compare needs at least two algorithms")
    base = specs[0]
    for s in specs[1:]:
        if s.seeds != base.seeds:
            raise ConfigError(f"seed lists differ between {base.algo} and {s.algo}")
        if (s.problem, s.n, s.m, s.p, s.dim) != (base.problem, base.n, base.m, base.p, base.dim):
            raise ConfigError("compared runs must share the problem instances")
    for s in specs:
        s.validate()
    rows, codes = [], []
    for s in specs:
        outcomes = execute(s)
        write_run(s, outcomes)
        codes.append(exit_code(outcomes))
        rows.append([
            s.algo, len(outcomes), sum(o.status is Status.CONVERGED for o in outcomes),
            statistics.fmean(o.wall_s for o in outcomes),
            statistics.fmean(o.subproblems for o in outcomes),
            statistics.fmean(o.n_hvp for o in outcomes),
            _median([o.subproblems for o in outcomes]),
            _median([o.n_hvp for o in outcomes]),
        ])
    with open(os.path.join(base.out, f"compare_{base.problem}.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_HEADER)
        w.writerows(rows)
    text = format_table(COMPARE_HEADER, rows)
    with open(os.path.join(base.out, f"compare_{base.problem}.txt"), "w") as fh:
        fh.write(text)
    print(text, end="")
    return max(codes, key=lambda c: (c != 0, c))


def _cell(v):
    return f"{v:.3f}" if isinstance(v, float) else str(v)


def format_table(header, rows):
    cells = [list(header)] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def cmd_verify(suites=None):
    from . import verify

    names = list(verify.SUITES) if not suites else suites
    bad = [n for n in names if n not in verify.SUITES]
    if bad:
        raise ConfigError(f"unknown suite(s) {', '.join(bad)}; "
                          f"choose from {', '.join(verify.SUITES)}")
    ok = True
    for name in names:
        res = verify.SUITES[name]()
        state = "ok" if res.passed else "FAILED"
        print(f"suite {name}: {res.cases} cases, {len(res.failures)} failures [{state}]")
        for msg in res.failures[:5]:
            print(f"  reproducer: {msg}")
        ok = ok and res.passed
    return EXIT_OK if ok else EXIT_VERIFY


OVERRIDES = ("algo", "problem", "n", "m", "p", "dim", "tol", "gamma0", "eta", "theta", "nu",
             "max_iters", "out", "ls_variant", "track_hr")


def build_parser():
    ap = argparse.ArgumentParser(prog="adancg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", choices=PROBLEMS)
        p.add_argument("--n", type=int, help="variables (infeas, repu)")
        p.add_argument("--m", type=int, help="terms (infeas, repu)")
        p.add_argument("--p", type=float, help="exponent, > 2")
        p.add_argument("--dim", type=int, help="dimension (quadratic, quartic)")
        p.add_argument("--seed", type=int)
        p.add_argument("--seeds", help="'a..b' inclusive or comma list")
        p.add_argument("--seed-range", dest="seed_range", help="'a..b' inclusive")
        p.add_argument("--tol", type=float, help="gradient-norm tolerance")
        p.add_argument("--gamma0", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--nu", type=float, help="Hessian Holder exponent (ancg, fixed)")
        p.add_argument("--max-iters", dest="max_iters", type=int, help="outer-iteration cap")
        p.add_argument("--out", help="output directory")
        p.add_argument("--config", help="JSON file with RunSpec fields")
        p.add_argument("--ls-variant", dest="ls_variant", choices=("proof", "displayed"))
        p.add_argument("--track-hr", dest="track_hr", action=argparse.BooleanOptionalAction,
                       default=None)

    run = sub.add_parser("run", help="solve seeded instances with one algorithm")
    run.add_argument("--algo", choices=ALGOS)
    common(run)
    cmp_ = sub.add_parser("compare", help="paired runs of several algorithms")
    cmp_.add_argument("--algos", help="comma list, e.g. ancg,fixed")
    common(cmp_)
    ver = sub.add_parser("verify", help="run the property suites")
    ver.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    return ap


def _flag_doc(args):
    doc = {k: getattr(args, k) for k in OVERRIDES if getattr(args, k, None) is not None}
    seeds = [v for v in (args.seed, args.seeds, args.seed_range) if v is not None]
    if len(seeds) > 1:
        raise ConfigError("give only one of --seed, --seeds, --seed-range")
    if seeds:
        doc["seeds"] = seeds[0]
    return doc


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def specs_from_args(args):
    """RunSpecs for ``run``/``compare``: config file first, flags on top."""
    doc = _load_config(args.config) if args.config else {}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    flags = _flag_doc(args)
    if args.command == "run":
        return [spec_from_doc({**doc, **flags})]
    runs = doc.pop("runs", None)
    algos = doc.pop("algos", None)
    if args.algos:
        algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if runs is not None:
        return [spec_from_doc({**doc, **r, **flags}) for r in runs]
    if not algos:
        raise ConfigError("compare needs --algos or a 'runs'/'algos' entry in the config")
    return [spec_from_doc({**doc, **flags, "algo": a}) for a in algos]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.suite)
        specs = specs_from_args(args)
        if args.command == "run":
            return cmd_run(specs[0])
        return cmd_compare(specs)
    except ConfigError as exc:
        print(f"adancg: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
