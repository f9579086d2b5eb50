"""Command-line entry point.

Exit codes: 0 success, 1 invalid problem or failed check, 2 divergence
(overflow for solve/plot, any growth or overflow for validate), 64 usage
error, 66 unreadable input or unwritable output.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import (
    DomainError,
    FDConfigError,
    ProblemSyntaxError,
    ProblemValidationError,
    UnavailableValueError,
    UnsupportedOrderError,
)
from .oracle import FDConfig, compare, fd_solve
from .problem_io import emit_csv, emit_gnuplot, parse_document
from .solver import (
    OVERFLOW,
    build,
    check_divergence,
    evaluate_grid,
    evaluate_on,
    residual,
    tolerance_scale,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DIVERGENCE = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66

RESIDUAL_TOL = 1e-9
COMPARE_TOL = 5e-3
DEFAULT_GRID = 21


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stepfourier",
                     description="Weak solutions of linear PDEs with step-function coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-p", "--problem", required=True, help="problem document (JSON)")
        return p

    def add_grid(p):
        p.add_argument("--nt", type=int, help="time samples over [0, T[ (default 21)")
        p.add_argument("--nx", type=int, help="space samples over the x range (default 21)")
        p.add_argument("--strip-x0", type=float, help="left end of the x range (default -l)")
        p.add_argument("--strip-x1", type=float, help="right end of the x range (default l)")

    p = add("solve", "solve and write the solution grid as CSV")
    p.add_argument("-o", "--output", default="-", help="CSV path, '-' for stdout")
    add_grid(p)

    add("validate", "check the document and predict divergence")

    p = add("residual", "sample the PDE residual at interior points")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)

    p = add("compare", "compare against the finite-difference oracle (order <= 2)")
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-end", type=float, help="comparison time (default T/2)")

    p = add("plot", "write the CSV plus a gnuplot script drawing it")
    p.add_argument("-o", "--output", required=True, help="gnuplot script path")
    p.add_argument("--csv", required=True, help="CSV path (referenced by the script)")
    add_grid(p)
    return parser


def _read(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror}") from None


class _IOFailure(Exception):
    pass


def _grid_field(args, document, sol):
    problem = document.problem
    nt = args.nt or document.settings.grid_nt or DEFAULT_GRID
    nx = args.nx or document.settings.grid_nx or DEFAULT_GRID
    x0 = -problem.l if args.strip_x0 is None else args.strip_x0
    x1 = problem.l if args.strip_x1 is None else args.strip_x1
    return evaluate_grid(sol, nt, nx, (x0, x1))


def _report_notes(notes, stream):
    for note in notes:
        print(note, file=stream)


def _cmd_solve(args, document):
    sol = build(document.problem)
    field = _grid_field(args, document, sol)
    _write(args.output, emit_csv(field))
    _report_notes(sol.notes, sys.stderr)
    return EXIT_DIVERGENCE if any(n.severity == OVERFLOW for n in sol.notes) else EXIT_OK


def _cmd_plot(args, document):
    sol = build(document.problem)
    field = _grid_field(args, document, sol)
    _write(args.csv, emit_csv(field))
    _write(args.output, emit_gnuplot(field, args.csv, document.problem.time_partition[1:-1]))
    _report_notes(sol.notes, sys.stderr)
    return EXIT_DIVERGENCE if any(n.severity == OVERFLOW for n in sol.notes) else EXIT_OK


def _cmd_validate(args, document):
    notes = check_divergence(document.problem)
    problem = document.problem
    print(f"valid: I={problem.I} J={problem.J} order={problem.order} K={problem.initial.K}")
    _report_notes(notes, sys.stdout)
    return EXIT_DIVERGENCE if notes else EXIT_OK


def _cmd_residual(args, document):
    problem = document.problem
    sol = build(problem)
    rng = np.random.default_rng(args.seed)
    cells = [(i, j) for j in range(problem.J) for i in range(problem.I)
             if sol.cell(i, j) is not None and sol.overflow_note(i, j) is None]
    if not cells:
        print("no evaluable cells", file=sys.stderr)
        return EXIT_INVALID
    tp, sp = problem.time_partition, problem.space_partition
    max_analytic = max_fd = 0.0
    for _ in range(args.samples):
        i, j = cells[rng.integers(len(cells))]
        margin = 2.0 * args.dt
        t = rng.uniform(tp[i] + margin, tp[i + 1] - margin)
        x = rng.uniform(sp[j], sp[j + 1])
        if x == sp[j]:
            continue
        analytic, fd = residual(sol, t, x, args.dt)
        max_analytic = max(max_analytic, abs(analytic))
        max_fd = max(max_fd, abs(fd))
    scale = tolerance_scale(sol)
    print(f"scale={scale:.6e}")
    print(f"max analytic residual={max_analytic:.6e} ({max_analytic / scale:.3e} x scale)")
    print(f"max fd residual (dt={args.dt:g})={max_fd:.6e} ({max_fd / scale:.3e} x scale)")
    return EXIT_OK if max_analytic <= RESIDUAL_TOL * scale else EXIT_INVALID


def _cmd_compare(args, document):
    problem = document.problem
    t_end = problem.T / 2 if args.t_end is None else args.t_end
    reference = fd_solve(problem, FDConfig(args.nx, args.dt), t_end)
    spectral = evaluate_on(build(problem), reference.t_values, reference.x_values)
    report = compare(spectral, reference)
    print(report)
    return EXIT_OK if report.max_error <= COMPARE_TOL else EXIT_INVALID


_COMMANDS = {
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "residual": _cmd_residual,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
}


def run(argv=None) -> int:
    try:
        args = _make_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        document = parse_document(_read(args.problem))
        return _COMMANDS[args.command](args, document)
    except _IOFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_NOINPUT
    except ProblemSyntaxError as exc:
        print(f"{args.problem}: syntax error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ProblemValidationError as exc:
        for diagnostic in exc.diagnostics:
            print(f"{args.problem}: {diagnostic}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, FDConfigError, UnsupportedOrderError, UnavailableValueError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())
