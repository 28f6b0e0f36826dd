"""Command-line front end.

Three subcommands over the shared problem-file format:

  solve FILE      relax (where applicable) and solve; report bound, solver
                  status, moments, and with --extract the rank certificate
  shadow FILE     support points of the projected relaxation feasible set
                  along evenly spaced directions (pop files)
  liouville FILE  print the generated transport rows of a dynamics file

Reports are `key = value` lines followed by moment tables (`alpha y[alpha]`
rows); numbers carry 12 significant digits.  Exit codes: 0 on a converged
solve, 2 when the solver did not converge, 1 on input errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, TextIO

import numpy as np

from .extraction import Certificate, ExtractionError, certify
from .gmp import resolve_minimal_time, solve_gmp, unscale_time_moments
from .moments import MomentVector
from .problemfile import GMPFileData, ProblemFileError, load_problem
from .relaxation import (
    OrderTooSmallError,
    POPProblem,
    bound_and_moments,
)
from .sdp import SolveOptions, solve
from .spectra import defining_polynomials, shadow_support_points, shadow_table, unit_directions


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


class Report:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def kv(self, key: str, value) -> None:
        if isinstance(value, float):
            self.lines.append(f"{key} = {_fmt(value)}")
        else:
            self.lines.append(f"{key} = {value}")

    def section(self, name: str) -> None:
        self.lines.append("")
        self.lines.append(f"[{name}]")

    def raw(self, line: str) -> None:
        self.lines.append(line)

    def moments(self, y: MomentVector, name: Optional[str] = None) -> None:
        self.section("moments" + (f" {name}" if name else ""))
        for exp, v in zip(y.exponents(), y.values):
            self.raw(" ".join(str(e) for e in exp) + f"  {_fmt(float(v))}")

    def certificate(self, cert: Certificate, name: Optional[str] = None) -> None:
        self.section("certificate" + (f" {name}" if name else ""))
        for line in cert.lines():
            self.raw(line)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _emit(report: Report, out_path: Optional[str], stream: TextIO, runtime: Optional[float]) -> None:
    stream.write(report.text())
    if runtime is not None:
        stream.write(f"runtime_seconds = {_fmt(runtime)}\n")
    if out_path:
        with open(out_path, "w") as f:
            f.write(report.text())


def _status_exit(status: str) -> int:
    return 0 if status == "optimal" else 2


def _options(args) -> SolveOptions:
    return SolveOptions(gap_tol=args.tol, feas_tol=args.tol, max_iter=args.max_iter)


def _minimal_gmp_order(data: GMPFileData) -> int:
    from .gmp import build_gmp_relaxation

    for r in range(1, 24):
        try:
            g, _ = data.instantiate(r)
            build_gmp_relaxation(g, r)
            return r
        except (ValueError, KeyError):
            continue
    raise ValueError("could not find a feasible relaxation order up to 23")


def _solve_pop(pop: POPProblem, args, report: Report) -> int:
    r = args.order if args.order is not None else pop.minimal_order()
    try:
        res = bound_and_moments(pop, r, _options(args))
    except OrderTooSmallError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    sol = res.solution
    report.kv("kind", "pop")
    report.kv("order", r)
    report.kv("status", sol.status)
    report.kv("bound", res.bound)
    report.kv("iterations", sol.iterations)
    report.kv("gap", sol.gap)
    report.kv("primal_residual", sol.primal_residual)
    report.kv("dual_residual", sol.dual_residual)
    report.kv("compactness_certified", str(res.info.compactness_certified).lower())
    report.moments(res.moments)
    if args.extract:
        constraints = [("ineq", q) for q in pop.feasible_set.effective_inequalities()]
        constraints += [("eq", q) for q in pop.feasible_set.equalities]
        try:
            cert = certify(
                res.moments,
                r,
                res.info.r_x,
                seed=args.seed,
                constraints=constraints,
            )
            report.certificate(cert)
        except ExtractionError as e:
            report.section("certificate")
            report.kv("extraction_failed", str(e))
    return _status_exit(sol.status)


def _solve_gmp_file(data: GMPFileData, args, report: Report) -> int:
    r = args.order if args.order is not None else _minimal_gmp_order(data)
    try:
        g, dp = data.instantiate(r)
        res = solve_gmp(g, r, _options(args))
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if dp is not None and dp.dynamics.autonomous and res.solution.status == "optimal":
        res = resolve_minimal_time(dp, r, res, _options(args))
    moments = res.moments
    if dp is not None and not dp.dynamics.autonomous:
        moments = unscale_time_moments(dp, moments)  # report in original time
    sol = res.solution
    report.kv("kind", "gmp")
    report.kv("order", r)
    report.kv("status", sol.status)
    report.kv("bound", res.bound)
    report.kv("iterations", sol.iterations)
    report.kv("gap", sol.gap)
    report.kv("primal_residual", sol.primal_residual)
    report.kv("dual_residual", sol.dual_residual)
    if dp is not None and dp.dynamics.autonomous:
        occ_mass = sum(float(moments[name].mass) for name, _ in dp.cells)
        report.kv("terminal_time", occ_mass)
    for m in g.measures:
        report.moments(moments[m.name], m.name)
    if args.extract:
        for m in g.measures:
            try:
                cert = certify(moments[m.name], r, 1, seed=args.seed)
                report.certificate(cert, m.name)
            except ExtractionError as e:
                report.section(f"certificate {m.name}")
                report.kv("extraction_failed", str(e))
    return _status_exit(sol.status)


def _solve_sdp(prog, args, report: Report) -> int:
    sol = solve(prog, _options(args))
    report.kv("kind", "sdp")
    report.kv("status", sol.status)
    report.kv("objective", sol.dual_obj)
    report.kv("primal_objective", sol.primal_obj)
    report.kv("iterations", sol.iterations)
    report.kv("gap", sol.gap)
    report.kv("primal_residual", sol.primal_residual)
    report.kv("dual_residual", sol.dual_residual)
    report.section("y")
    for k, v in enumerate(sol.y, start=1):
        report.raw(f"{k}  {_fmt(v)}")
    for bi, (blk, Xb) in enumerate(zip(sol.blocks, sol.X), start=1):
        report.section(f"X {bi}")
        if blk.kind == "psd":
            for i in range(blk.size):
                for j in range(i, blk.size):
                    report.raw(f"{i + 1} {j + 1}  {_fmt(Xb[i, j])}")
        else:
            for i in range(blk.size):
                report.raw(f"{i + 1} {i + 1}  {_fmt(Xb[i])}")
    return _status_exit(sol.status)


def _solve_pencil(pencil, args, report: Report) -> int:
    report.kv("kind", "pencil")
    report.kv("side", pencil.side)
    report.kv("variables", pencil.nvars)
    fs = defining_polynomials(pencil)
    report.section("defining_polynomials")
    for k, f in enumerate(fs, start=1):
        report.raw(f"f{k} = {f.to_string()}")
    return 0


def cmd_solve(args) -> int:
    try:
        parsed = load_problem(args.file)
    except (ProblemFileError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    report = Report()
    t0 = time.perf_counter()
    if parsed.kind == "pop":
        code = _solve_pop(parsed.pop, args, report)
    elif parsed.kind == "gmp":
        code = _solve_gmp_file(parsed.gmp, args, report)
    elif parsed.kind == "sdp":
        code = _solve_sdp(parsed.sdp, args, report)
    else:
        code = _solve_pencil(parsed.pencil, args, report)
    if code != 1:
        _emit(report, args.out, sys.stdout, time.perf_counter() - t0)
    return code


def cmd_shadow(args) -> int:
    try:
        parsed = load_problem(args.file)
    except (ProblemFileError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if parsed.kind != "pop":
        print("error: shadow needs a pop file", file=sys.stderr)
        return 1
    pop = parsed.pop
    try:
        i, j = (int(t) - 1 for t in args.proj.split(","))
    except ValueError:
        print("error: --proj takes two comma-separated variable indices", file=sys.stderr)
        return 1
    try:
        points = shadow_support_points(
            pop.feasible_set,
            args.order if args.order is not None else pop.minimal_order(),
            unit_directions(args.directions),
            projection=(i, j),
            options=_options(args),
        )
    except (OrderTooSmallError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    table = shadow_table(points)
    sys.stdout.write(table)
    if args.out:
        with open(args.out, "w") as f:
            f.write(table)
    return 0 if all(p.status == "optimal" for p in points) else 2


def cmd_liouville(args) -> int:
    try:
        parsed = load_problem(args.file)
    except (ProblemFileError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if parsed.kind != "gmp" or parsed.gmp.dynamics is None:
        print("error: liouville needs a gmp file with a [dynamics] section", file=sys.stderr)
        return 1
    data = parsed.gmp
    r = args.order if args.order is not None else _minimal_gmp_order(data)
    try:
        g, dp = data.instantiate(r)
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    spaces = {m.name: m.support.space for m in g.measures}
    report = Report()
    report.kv("kind", "gmp")
    report.kv("order", r)
    report.kv("test_degree", dp.info.test_degree)
    report.kv("trimmed", str(dp.info.trimmed).lower())
    report.kv("rows", dp.info.rows)
    report.section("rows")
    for con in dp.liouville_rows:
        parts = []
        for name, poly in con.terms:
            parts.append(f"<{poly.to_string(spaces[name])}, {name}>")
        lhs = " + ".join(parts) if parts else "0"
        label = f"v = {con.label}: " if con.label else ""
        report.raw(f"{label}{lhs} == {con.rhs}")
    _emit(report, args.out, sys.stdout, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="momentsdp",
        description="moment relaxations, conic solves, certificates and shadows",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="problem file (kind: pop | gmp | sdp | pencil)")
        p.add_argument("--order", type=int, default=None, help="relaxation order r")
        p.add_argument(
            "--tol", type=float, default=1e-6, help="solver gap and feasibility tolerance"
        )
        p.add_argument("--max-iter", type=int, default=200, help="iteration budget")
        p.add_argument("--out", default=None, help="write the report to this path")

    ps = sub.add_parser("solve", help="solve a problem file")
    common(ps)
    ps.add_argument("--extract", action="store_true", help="rank certificate and atoms")
    ps.add_argument("--seed", type=int, default=0, help="seed for atom extraction")
    ps.set_defaults(func=cmd_solve)

    psh = sub.add_parser("shadow", help="support points of the projected relaxation")
    common(psh)
    psh.add_argument("--directions", type=int, default=16, help="number of directions")
    psh.add_argument("--proj", default="1,2", help="two 1-based variable indices, e.g. 1,2")
    psh.set_defaults(func=cmd_shadow)

    pl = sub.add_parser("liouville", help="print generated transport rows")
    common(pl)
    pl.set_defaults(func=cmd_liouville)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
