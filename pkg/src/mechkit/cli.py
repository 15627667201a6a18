"""Command-line front end.

Subcommands: solve, verify, compare, converge, demo.  Results are canonical
JSON on stdout; ``--csv`` writes delimited output and ``--figures`` renders
matplotlib figures next to it.

Exit codes: 0 success, 1 a verification or usc check failed (report still
emitted), 2 enumeration cap exceeded, 3 file I/O error, 4 schema error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import numeric, reporting
from .allocation import AllocationSet, finite_set
from .convergence import default_grid, infinite_expectation_demo, run_pipeline
from .errors import CapExceededError, SchemaError
from .mechanism import (
    TabularMechanism,
    choose,
    default_verification_grid,
    verify_ic,
    verify_ir,
    verify_monotone_allocation,
    verify_monotone_payment,
    verify_npt,
)
from .numeric import tolerance
from .solver import BREV, SREV, brev, solve_deterministic, solve_monotone, solve_rev, srev

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CAP = 2
EXIT_IO = 3
EXIT_SCHEMA = 4


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _emit(obj) -> None:
    sys.stdout.write(reporting.dumps(obj))


def _figure_path(args, stem: str) -> str | None:
    if args.figures is None:
        return None
    directory = args.figures
    if directory == "":
        directory = os.path.dirname(args.csv) if args.csv else "."
        directory = directory or "."
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, stem + ".png")


def _apply_numeric_mode(args, options: dict) -> None:
    mode = options.get("numeric")
    if args.exact:
        mode = "exact"
    elif args.float:
        mode = "float"
    if mode:
        if mode not in ("exact", "float"):
            raise SchemaError(f"options.numeric must be 'exact' or 'float', got {mode!r}")
        numeric.set_mode(mode)


def _load_instance(args):
    """Read the instance file, fixing the numeric mode before values parse."""
    raw = _load_json(args.instance)
    if not isinstance(raw, dict):
        raise SchemaError("instance must be a JSON object")
    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError("'options' must be an object")
    _apply_numeric_mode(args, options)
    return reporting.instance_from_json(raw)


def _deterministic_counterpart(gamma: AllocationSet) -> AllocationSet:
    from .allocation import make_standard

    table = {
        "cube": "cube_vertices",
        "unit_demand": "unit_demand_det",
        "simplex_eq": "simplex_vertices",
    }
    if gamma.label in table:
        return make_standard(table[gamma.label], gamma.dim)
    if gamma.is_finite:
        return gamma
    return finite_set(gamma.points())


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    gamma, X, options = _load_instance(args)
    cap = args.cap or options.get("cap", 10**7)
    cls = args.cls
    if cls == "rev":
        res = solve_rev(gamma, X)
    elif cls == "drev":
        res = solve_deterministic(_deterministic_counterpart(gamma), X, cap=cap)
    elif cls == "srev":
        _emit({"class": SREV, "optimal_revenue": reporting.number_to_json(srev(X))})
        return EXIT_OK
    elif cls == "brev":
        _emit({"class": BREV, "optimal_revenue": reporting.number_to_json(brev(X))})
        return EXIT_OK
    elif cls == "mono":
        res = solve_monotone(gamma, X, "payment", cap=cap)
    else:  # amono
        res = solve_monotone(gamma, X, "allocation", cap=cap)
    out = reporting.solve_result_to_json(res)
    rows = []
    for x in X.support:
        g, t = choose(res.mechanism, x)
        rows.append(
            {
                "x": reporting.vector_to_json(x),
                "g": reporting.vector_to_json(g),
                "t": reporting.number_to_json(t),
            }
        )
    out["mechanism"]["assignment"] = rows
    _emit(out)
    if args.csv:
        reporting.write_csv(
            args.csv,
            ["class", "optimal_revenue", "certified"],
            [[res.class_label, res.optimal_revenue, res.certified]],
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    gamma, X, options = _load_instance(args)
    mobj = _load_json(args.mechanism)
    if not isinstance(mobj, dict):
        raise SchemaError("mechanism file must hold a JSON object")
    if "mechanism" in mobj:  # accept whole solve-result files
        mobj = mobj["mechanism"]
    mech = reporting.mechanism_from_json(mobj, gamma if "gamma" not in mobj else None)
    if mech.gamma.dim != X.dim:
        raise SchemaError("mechanism and instance dimensions differ")

    reports = {
        "ic": verify_ic(mech, X.support),
        "ir": verify_ir(mech, X.support),
        "npt": verify_npt(mech),
    }
    if "assignment" in mobj:
        table = TabularMechanism(
            tuple(
                (
                    reporting.vector_from_json(row["x"]),
                    reporting.vector_from_json(row["g"]),
                    reporting.number_from_json(row["t"]),
                )
                for row in mobj["assignment"]
            )
        )
        pts = [row[0] for row in table.assignments]
        reports["assignment_ic"] = verify_ic(table, pts)
        reports["assignment_ir"] = verify_ir(table, pts)
    if args.mono in ("payment", "both"):
        grid = default_verification_grid(X) if args.grid is None else default_grid(
            X.dim, X, per_axis=args.grid
        )
        reports["mono_payment"] = verify_monotone_payment(mech, grid)
    if args.mono in ("allocation", "both"):
        grid = default_verification_grid(X) if args.grid is None else default_grid(
            X.dim, X, per_axis=args.grid
        )
        reports["mono_allocation"] = verify_monotone_allocation(mech, grid)

    passed = all(r.passed for r in reports.values())
    _emit(
        {
            "passed": passed,
            "checks": {
                k: reporting.verification_report_to_json(r) for k, r in reports.items()
            },
        }
    )
    return EXIT_OK if passed else EXIT_VERIFICATION


def cmd_compare(args) -> int:
    gamma, X, options = _load_instance(args)
    cap = args.cap or options.get("cap", 10**7)
    if gamma.is_finite:
        raise SchemaError("compare needs a polytope allocation set (for Rev)")
    rev = solve_rev(gamma, X)
    det = solve_deterministic(_deterministic_counterpart(gamma), X, cap=cap)
    mono = solve_monotone(gamma, X, "payment")
    amono = solve_monotone(gamma, X, "allocation")
    values = {
        "Rev": rev.optimal_revenue,
        "DRev": det.optimal_revenue,
        "SRev": srev(X),
        "BRev": brev(X),
        "MonRev_UB": mono.optimal_revenue,
        "AMonRev_UB": amono.optimal_revenue,
    }
    t = tolerance()
    orderings = [("DRev", "Rev"), ("MonRev_UB", "Rev"), ("AMonRev_UB", "Rev")]
    if gamma.label == "cube":
        orderings += [("SRev", "Rev"), ("BRev", "Rev")]
    for lo, hi in orderings:
        if values[lo] > values[hi] + t:
            raise RuntimeError(
                f"ordering violated: {lo}={values[lo]} > {hi}={values[hi]}; solver bug"
            )
    header, row = reporting.compare_csv_row(values)
    line = ",".join(header) + "\n" + ",".join(reporting.csv_cell(c) for c in row)
    print(line)
    if args.csv:
        reporting.write_csv(args.csv, header, [row])
    fig = _figure_path(args, "compare")
    if fig:
        reporting.render_compare_figure(values, fig)
    return EXIT_OK


def cmd_converge(args) -> int:
    gamma, X, options = _load_instance(args)
    family = reporting.family_from_json(_load_json(args.family), gamma)
    grid = None
    per_axis = args.grid if args.grid is not None else options.get("grid")
    if per_axis is not None:
        grid = default_grid(gamma.dim, X, per_axis=per_axis)
    n_max = args.n_max or options.get("n_max", 48)
    usc_tol = args.tol if args.tol is not None else options.get("tol")
    rep = run_pipeline(family, X, grid=grid, n_max=n_max, usc_tol=usc_tol)
    _emit(reporting.convergence_report_to_json(rep))
    if args.csv:
        reporting.write_csv(
            args.csv,
            ["n", "revenue"],
            [[n + 1, r] for n, r in enumerate(rep.revenue_sequence)],
        )
    fig = _figure_path(args, "converge")
    if fig:
        reporting.render_convergence_figure(rep, fig)
    return EXIT_OK if rep.usc_holds else EXIT_VERIFICATION


def cmd_demo(args) -> int:
    if args.exact:
        numeric.set_mode("exact")
    elif args.float:
        numeric.set_mode("float")
    prices = None
    if args.prices:
        prices = [int(p) for p in args.prices.split(",")]
    rep = infinite_expectation_demo(args.truncation, prices)
    _emit(reporting.demo_report_to_json(rep))
    if args.csv:
        reporting.write_csv(
            args.csv,
            ["n", "model_revenue"],
            [[n, r] for n, r in zip(rep.escaping_ns, rep.escaping_model_revenues)],
        )
    fig = _figure_path(args, "demo")
    if fig:
        reporting.render_demo_figure(rep, fig)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="exact rational arithmetic")
    g.add_argument("--float", action="store_true", help="binary64 arithmetic (default)")
    p.add_argument("--tol", type=float, default=None, help="usc slack tolerance override")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for interface compatibility; execution is sequential")
    p.add_argument("--csv", default=None, help="write delimited output to this path")
    p.add_argument("--figures", nargs="?", const="", default=None,
                   help="render figures (optionally into the given directory)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mechkit",
        description="solve and verify revenue-maximizing menu mechanisms",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal revenue for an instance")
    p.add_argument("instance")
    p.add_argument("--class", dest="cls", default="rev",
                   choices=["rev", "drev", "srev", "brev", "mono", "amono"])
    p.add_argument("--cap", type=int, default=None, help="enumeration cap")
    _add_common(p)

    p = sub.add_parser("verify", help="verify a mechanism against an instance")
    p.add_argument("mechanism")
    p.add_argument("instance")
    p.add_argument("--mono", choices=["payment", "allocation", "both"], default=None)
    p.add_argument("--grid", type=int, default=None, help="per-axis grid resolution")
    _add_common(p)

    p = sub.add_parser("compare", help="all revenue classes as one CSV row")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("converge", help="run the limit pipeline for a family")
    p.add_argument("instance")
    p.add_argument("--family", required=True, help="family JSON path")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--grid", type=int, default=None, help="per-axis grid resolution")
    _add_common(p)

    p = sub.add_parser("demo", help="heavy-tail fixed-price demonstration")
    p.add_argument("--truncation", type=int, default=10000)
    p.add_argument("--prices", default=None, help="comma-separated price list")
    _add_common(p)

    return ap


_COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "compare": cmd_compare,
    "converge": cmd_converge,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except json.JSONDecodeError as e:
        print(f"schema error: invalid JSON: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except CapExceededError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
