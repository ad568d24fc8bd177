"""Command-line front end.

Exit status: 0 on success, 1 when a solver fails, 2 when input is invalid.
"""
import argparse
import json
import math
import sys
from contextlib import contextmanager
from typing import Optional

import numpy as np

from .bounds import (
    as_weight,
    diag_weight,
    envelope_from_weighted_bound,
    hcrb_general,
    hcrb_qubit,
    is_singular,
    nagaoka_curve_qubit,
    ncrb_general,
    ncrb_qubit,
    sld_crb,
)
from .errors import SolverError, ValidationError
from .experiments import Table, random_measurements_table, random_problems_table, write_table
from .luwang import LwurSpec, lwb, lwur_boundary_curve
from .model import EstimationProblem, qfi_data
from .problemfile import load_problem, parse_angle
from .scenarios import RotationsConfig, rotations_problem

EXIT_OK, EXIT_SOLVER, EXIT_INVALID = 0, 1, 2
CURVE_KINDS = ("nagaoka", "lwur", "sld-envelope", "ncrb-envelope")
REPORT_COLUMNS = ("sldcrb", "ncrb", "hcrb", "lwb", "c_tilde", "ncrb_method", "hcrb_method", "iterations")


def weighted_lwb(data, W) -> float:
    """Lu-Wang bound on ``W11 v1 + W22 v2``; needs a diagonal ``W``.

    Rescaling ``v_j -> W_jj v_j`` maps the weighted problem onto the plain
    one with ``F_jj -> F_jj / W_jj``.
    """
    if abs(W[0, 1]) > 0.0 or not (data.qfi[0, 0] > 0 and data.qfi[1, 1] > 0) or math.isnan(data.c_tilde):
        return math.nan
    return lwb(LwurSpec(data.qfi[0, 0] / W[0, 0], data.qfi[1, 1] / W[1, 1], data.c_tilde)).value


def bound_report(problem: EstimationProblem, W) -> Table:
    """All scalar bounds for one problem and weight, as a one-row table.

    Qubits use the closed forms (the Holevo one needs a full-rank state);
    everything else goes through the numerical solver.
    """
    W = as_weight(W)
    data = qfi_data(problem)
    iterations = 0
    if is_singular(data.qfi):
        c_n = c_h = math.inf
        methods = ("singular-qfi", "singular-qfi")
    elif problem.dim == 2 and np.linalg.eigvalsh(problem.rho)[0] > 1e-10:
        c_n, c_h = ncrb_qubit(data.qfi, W), hcrb_qubit(problem, W)
        methods = ("closed-form", "closed-form")
    else:
        h_res = hcrb_general(problem, W)
        c_h, iterations = h_res.value, h_res.diagnostics.iterations
        if problem.dim == 2:
            c_n, methods = ncrb_qubit(data.qfi, W), ("closed-form", "solver")
        else:
            n_res = ncrb_general(problem, W)
            c_n, methods = n_res.value, ("solver", "solver")
            iterations += n_res.diagnostics.iterations
    row = (sld_crb(data.qfi, W), c_n, c_h, weighted_lwb(data, W), data.c_tilde, *methods, iterations)
    return Table(REPORT_COLUMNS, [row])


def _curve_table(problem: EstimationProblem, kind: str, points: int) -> Table:
    data = qfi_data(problem)
    F = data.qfi
    if points < 2:
        raise ValidationError("--points must be at least 2")
    if kind in ("nagaoka", "lwur"):
        if kind == "nagaoka" and problem.dim != 2:
            raise ValidationError("the nagaoka curve is only available for qubit problems (dim 2)")
        if is_singular(F) and kind == "nagaoka":
            raise ValidationError("the nagaoka curve needs a nonsingular QFI")
        lo = np.linalg.inv(F)[0, 0] if kind == "nagaoka" else 1.0 / F[0, 0]
        grid = lo * (1.0 + np.logspace(-3, 1.5, points))
        if kind == "nagaoka":
            curve = nagaoka_curve_qubit(F, grid)
        else:
            curve = lwur_boundary_curve(LwurSpec.from_qfi(data), grid)
    else:
        weights = np.linspace(0.01, 1.99, points)
        if kind == "sld-envelope":
            curve = envelope_from_weighted_bound(lambda W: sld_crb(F, W), weights, method="tangent")
        elif problem.dim == 2:
            curve = envelope_from_weighted_bound(lambda W: ncrb_qubit(F, W), weights, method="tangent")
        else:
            curve = envelope_from_weighted_bound(lambda W: ncrb_general(problem, W).value, weights, method="vertex")
    for flag in curve.flags:
        print(f"note: {flag}", file=sys.stderr)
    return Table(("v1", "v2"), [tuple(p) for p in curve.points])


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(table: Table, args) -> None:
    with _output(args.out) as fh:
        write_table(table, fh, "\t" if args.format == "tsv" else ",")


def _weight(args):
    if getattr(args, "weight_matrix", None):
        try:
            return as_weight(np.array(json.loads(args.weight_matrix), dtype=np.float64))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ValidationError(f"--weight-matrix must be a JSON 2x2 array: {exc}") from None
    return diag_weight(args.weight)


def _rotations_config(args) -> RotationsConfig:
    return RotationsConfig(float(args.r), parse_angle(args.theta), parse_angle(args.phi))


def cmd_bounds(args) -> int:
    _emit(bound_report(load_problem(args.problem), _weight(args)), args)
    return EXIT_OK


def cmd_rotations(args) -> int:
    _emit(bound_report(rotations_problem(_rotations_config(args)), _weight(args)), args)
    return EXIT_OK


def cmd_curve(args) -> int:
    _emit(_curve_table(load_problem(args.problem), args.kind, args.points), args)
    return EXIT_OK


def _report_failures(table: Table) -> None:
    print(f"{table.failures} of {len(table.rows)} rows failed", file=sys.stderr)


def cmd_random_problems(args) -> int:
    table = random_problems_table(args.dim, args.count, args.seed, workers=args.workers)
    _emit(table, args)
    _report_failures(table)
    return EXIT_OK


def cmd_random_measurements(args) -> int:
    table = random_measurements_table(
        _rotations_config(args), args.count, args.seed, rank=args.rank, m=args.outcomes, workers=args.workers
    )
    _emit(table, args)
    _report_failures(table)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(args.criteria or None, stream=sys.stdout)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)} of {len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_SOLVER if failed else EXIT_OK


def _count(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbounds", description="Two-parameter quantum estimation bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", help="output file (default: stdout)")
    out.add_argument("--format", choices=("csv", "tsv"), default="csv")

    weight = argparse.ArgumentParser(add_help=False)
    weight.add_argument("--weight", type=float, default=1.0, help="w in W = diag(w, 2 - w), 0 < w < 2")
    weight.add_argument("--weight-matrix", help="full 2x2 weight as JSON, overrides --weight")

    angles = argparse.ArgumentParser(add_help=False)
    angles.add_argument("--r", required=True, help="Bloch radius in (0, 1]")
    angles.add_argument("--theta", required=True, help="polar angle, radians or e.g. 'pi/4'")
    angles.add_argument("--phi", required=True, help="azimuth, radians or e.g. 'pi/4'")

    workers = argparse.ArgumentParser(add_help=False)
    workers.add_argument("--workers", type=_count, default=1, help="worker processes (output order is fixed)")

    p = sub.add_parser("bounds", parents=[out, weight], help="scalar bounds for a problem file")
    p.add_argument("problem")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rotations", parents=[out, weight, angles], help="scalar bounds for the rotated qubit")
    p.set_defaults(func=cmd_rotations)

    p = sub.add_parser("curve", parents=[out], help="trade-off curve (v1, v2) for a problem file")
    p.add_argument("problem")
    p.add_argument("kind", choices=CURVE_KINDS)
    p.add_argument("--points", type=_count, default=101)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("random-problems", parents=[out, workers], help="bounds over random problems")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--count", type=_count, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random_problems)

    p = sub.add_parser(
        "random-measurements", parents=[out, workers, angles], help="figures of merit of random POVMs"
    )
    p.add_argument("--count", type=_count, default=10_000)
    p.add_argument("--rank", choices=("1", "full"), default="1")
    p.add_argument("--outcomes", type=_count, default=3, help="number of POVM outcomes m")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random_measurements)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--criteria", type=int, nargs="*", help="subset of criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
