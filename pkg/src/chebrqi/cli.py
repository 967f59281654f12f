"""Command-line benchmark harness.

Subcommands::

    run      one solver on one problem
    compare  several solvers on one problem, with a verified flag
    sweep    CRS over a list of inner iteration caps
    replay   rerun from a saved run.json and check the counts

Problems are given as ``beam:<nx>x<ny>``, ``lap1d:<n>[:identity]`` or
``mm:<pathA>,<pathB>``. Exit status is 0 on full convergence, 2 when some
pair did not converge and 1 on errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .dense import dense_oracle
from .krylov import InnerSolveConfig
from .mmio import read_matrix_market
from .problems import BeamSpec, assemble_beam, assemble_laplacian_1d
from .solvers import SolverConfig, cd_solve, crs_solve

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2
SUMMARY_COLUMNS = ["solver", "problem", "nev", "it", "mv", "time_s", "converged"]
COMPARE_COLUMNS = SUMMARY_COLUMNS + ["verified"]
HISTORY_COLUMNS = ["eigenpair_index", "outer_iter", "rel_residual"]
SWEEP_COLUMNS = ["it_max_linear", "it_total", "mv_total", "time_s"]
SOLVERS = ("cd", "crs", "oracle")
ORACLE_VERIFY_MAX_N = 2000
ORACLE_RTOL = 1e-8
PAIRWISE_RTOL = 1e-6


class CliError(Exception):
    pass


@dataclass
class RunRecord:
    solver: str
    problem: str
    cfg: dict
    it_total: int
    mv_total: int
    wall_time: float
    converged: list
    values: np.ndarray
    history: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return len(self.converged) == self.cfg["nev"] and all(self.converged)

    def summary_row(self):
        return [self.solver, self.problem, self.cfg["nev"], self.it_total, self.mv_total,
                f"{self.wall_time:.6f}", int(self.all_converged)]


def load_problem(spec: str):
    """Return ``(A, B)`` for a problem string."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "beam":
            nx, ny = (int(s) for s in rest.lower().split("x"))
            P = assemble_beam(BeamSpec(nx, ny))
            return P.K, P.M
        if kind == "lap1d":
            n, _, mass = rest.partition(":")
            P = assemble_laplacian_1d(int(n), mass or "consistent")
            return P.K, P.M
    except ValueError as exc:
        raise CliError(f"bad problem {spec!r}: {exc}") from None
    if kind == "mm":
        paths = rest.split(",")
        if len(paths) != 2:
            raise CliError(f"mm problem needs two paths, got {rest!r}")
        try:
            A = read_matrix_market(paths[0], "A")
            B = read_matrix_market(paths[1], "B")
        except (OSError, ValueError) as exc:
            raise CliError(str(exc)) from None
        if A.n != B.n:
            raise CliError(f"A is {A.n}x{A.n} but B is {B.n}x{B.n}")
        return A, B
    raise CliError(f"unknown problem {spec!r}; use beam:<nx>x<ny>, lap1d:<n> or mm:<A>,<B>")


def config_from_args(args) -> SolverConfig:
    try:
        inner = InnerSolveConfig(args.inner_method, args.inner_iters)
        return SolverConfig(nev=args.nev, m=args.m, dim_max=args.dim_max, it_max=args.it_max,
                            eps=args.tol, inner=inner, seed=args.seed)
    except ValueError as exc:
        raise CliError(f"invalid configuration: {exc}") from None


def execute(solver: str, problem: str, cfg: SolverConfig, pencil=None) -> RunRecord:
    A, B = pencil if pencil is not None else load_problem(problem)
    if cfg.nev > A.n:
        raise CliError(f"nev={cfg.nev} exceeds the problem size {A.n}")
    if solver == "oracle":
        t0 = time.perf_counter()
        try:
            vals = dense_oracle(A, B).values[:cfg.nev]
        except ValueError as exc:
            raise CliError(str(exc)) from None
        dt = time.perf_counter() - t0
        return RunRecord(solver, problem, cfg.to_dict(), 0, 0, dt, [True] * cfg.nev, vals)
    fn = {"cd": cd_solve, "crs": crs_solve}[solver]
    t0 = time.perf_counter()
    res = fn(A, B, cfg)
    dt = time.perf_counter() - t0
    hist = [(h.pair, h.k, h.residual) for h in res.history]
    return RunRecord(solver, problem, cfg.to_dict(), res.it_total, res.mv_total, dt,
                     [bool(c) for c in res.converged], res.values, hist)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_outputs(out, records):
    os.makedirs(out, exist_ok=True)
    _write_csv(os.path.join(out, "summary.csv"), SUMMARY_COLUMNS, [r.summary_row() for r in records])
    for r in records:
        if r.solver != "oracle":
            _write_csv(os.path.join(out, f"history_{r.solver}.csv"), HISTORY_COLUMNS,
                       [(p, k, f"{res:.17g}") for p, k, res in r.history])


def _snapshot(record: RunRecord, path):
    data = {"solver": record.solver, "problem": record.problem, "cfg": record.cfg,
            "it_total": record.it_total, "mv_total": record.mv_total,
            "values": [float(v) for v in record.values]}
    with open(path, "w", encoding="ascii") as fh:
        json.dump(data, fh, indent=2)


def _status(records) -> int:
    return EXIT_OK if all(r.all_converged for r in records) else EXIT_PARTIAL


def _rel_close(a, b, rtol):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(np.abs(b), np.finfo(float).tiny)))


def verify_records(records, pencil):
    """Verified flags: against the dense oracle for small ``n``, else pairwise."""
    A, B = pencil
    if A.n <= ORACLE_VERIFY_MAX_N:
        ref = dense_oracle(A, B).values[:records[0].cfg["nev"]]
        return [r.all_converged and _rel_close(r.values, ref, ORACLE_RTOL) for r in records]
    ref = records[0].values
    ok = all(_rel_close(r.values, ref, PAIRWISE_RTOL) for r in records)
    return [ok and r.all_converged for r in records]


def cmd_run(args) -> int:
    cfg = config_from_args(args)
    rec = execute(args.solver, args.problem, cfg)
    _write_outputs(args.out, [rec])
    _snapshot(rec, os.path.join(args.out, "run.json"))
    print(f"{rec.solver} {rec.problem}: it={rec.it_total} mv={rec.mv_total} "
          f"time={rec.wall_time:.3f}s converged={sum(rec.converged)}/{cfg.nev}")
    return _status([rec])


def cmd_compare(args) -> int:
    cfg = config_from_args(args)
    solvers = args.solvers.split(",")
    if len(solvers) < 2:
        raise CliError("compare needs at least two solvers")
    for s in solvers:
        if s not in SOLVERS:
            raise CliError(f"unknown solver {s!r}")
    pencil = load_problem(args.problem)
    records = [execute(s, args.problem, cfg, pencil) for s in solvers]
    flags = verify_records(records, pencil)
    _write_outputs(args.out, records)
    _write_csv(os.path.join(args.out, "compare.csv"), COMPARE_COLUMNS,
               [r.summary_row() + [int(f)] for r, f in zip(records, flags)])
    for r, f in zip(records, flags):
        print(f"{r.solver:>6} it={r.it_total:6d} mv={r.mv_total:8d} time={r.wall_time:8.3f}s verified={f}")
    return _status(records)


def _int_list(text):
    try:
        vals = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"bad integer list {text!r}") from None
    if not vals or min(vals) < 1:
        raise CliError(f"inner iteration caps must be positive integers, got {text!r}")
    return vals


def cmd_sweep(args) -> int:
    base = config_from_args(args)
    values = _int_list(args.inner_values)
    pencil = load_problem(args.problem)
    records = []
    for v in values:
        cfg = SolverConfig(**{**base.__dict__, "inner": InnerSolveConfig(base.inner.method, v)})
        rec = execute("crs", args.problem, cfg, pencil)
        records.append(rec)
        print(f"it_max_linear={v:4d} it={rec.it_total:6d} mv={rec.mv_total:8d} time={rec.wall_time:.3f}s")
    for prev, cur in zip(records, records[1:]):
        if cur.it_total > prev.it_total:
            log.info("it_total rose from %d to %d between caps %d and %d", prev.it_total,
                     cur.it_total, prev.cfg["inner_iters"], cur.cfg["inner_iters"])
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "sweep.csv"), SWEEP_COLUMNS,
               [(r.cfg["inner_iters"], r.it_total, r.mv_total, f"{r.wall_time:.6f}") for r in records])
    return _status(records)


def cmd_replay(args) -> int:
    try:
        with open(args.snapshot, encoding="ascii") as fh:
            snap = json.load(fh)
        cfg = SolverConfig.from_dict(snap["cfg"])
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read snapshot {args.snapshot}: {exc}") from None
    rec = execute(snap["solver"], snap["problem"], cfg)
    same = rec.it_total == snap["it_total"] and rec.mv_total == snap["mv_total"]
    print(f"replay it={rec.it_total} mv={rec.mv_total} matches={same}")
    if not same:
        print(f"expected it={snap['it_total']} mv={snap['mv_total']}", file=sys.stderr)
        return EXIT_ERROR
    return _status([rec])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--problem", required=True)
    common.add_argument("--nev", type=int, default=10)
    common.add_argument("--m", type=int, default=30, help="Chebyshev degree")
    common.add_argument("--dim-max", type=int, default=80)
    common.add_argument("--it-max", type=int, default=1000)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--inner-iters", type=int, default=50)
    common.add_argument("--inner-method", choices=["cr", "minres"], default="cr")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="results")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="chebrqi", description="CD / CRS eigensolver benchmarks")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", parents=[common])
    r.add_argument("--solver", choices=SOLVERS, default="crs")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("compare", parents=[common])
    c.add_argument("--solvers", default="cd,crs")
    c.set_defaults(func=cmd_compare)
    s = sub.add_parser("sweep", parents=[common])
    s.add_argument("--inner-values", default="5,10,25,50,100,200")
    s.set_defaults(func=cmd_sweep)
    rp = sub.add_parser("replay")
    rp.add_argument("snapshot")
    rp.add_argument("-v", "--verbose", action="store_true")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
