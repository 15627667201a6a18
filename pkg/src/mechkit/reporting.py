"""JSON/CSV serialization and figure rendering.

Number rendering is byte-stable across platforms: rationals become
``{"num": ..., "den": ...}`` objects, floats become decimal strings with 17
significant digits, and all JSON is emitted with sorted keys.  Everything
written by the CLI reloads to an identical structure.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .allocation import STANDARD_KINDS, AllocationSet, finite_set, make_standard, polytope
from .convergence import (
    ConvergenceReport,
    InfiniteExpectationReport,
    MechanismSequence,
    approach_schedule,
    bundle_price_family,
    escaping_schedule,
    fixed_price_family,
    geometric_schedule,
    menu_list_family,
    truncated_geometric_schedule,
)
from .convexfn import PWLConvex, pwl
from .errors import SchemaError
from .mechanism import Mechanism, Menu, VerificationReport, menu
from .numeric import Number, num
from .solver import DiscreteValuation, SolveResult, discrete_valuation


# ---------------------------------------------------------------------------
# numbers
# ---------------------------------------------------------------------------


def number_to_json(x: Number):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, int):
        return x
    return format(x, ".17g")


def number_from_json(obj) -> Number:
    if isinstance(obj, dict):
        if set(obj) != {"num", "den"}:
            raise SchemaError(f"bad rational object {obj!r}")
        return num(Fraction(obj["num"], obj["den"]))
    if isinstance(obj, bool):
        raise SchemaError("booleans are not numbers")
    if isinstance(obj, (int, float)):
        return num(obj)
    if isinstance(obj, str):
        try:
            return num(obj)
        except (ValueError, TypeError) as e:
            raise SchemaError(f"bad number literal {obj!r}") from e
    raise SchemaError(f"cannot parse a number from {obj!r}")


def vector_to_json(v) -> list:
    return [number_to_json(c) for c in v]


def vector_from_json(obj) -> tuple:
    if not isinstance(obj, list):
        raise SchemaError(f"expected a coordinate list, got {obj!r}")
    return tuple(number_from_json(c) for c in obj)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# allocation sets
# ---------------------------------------------------------------------------


def gamma_to_json(gamma: AllocationSet) -> dict:
    if gamma.label in STANDARD_KINDS:
        return {"kind": gamma.label, "k": gamma.dim}
    out = {"kind": gamma.kind, "k": gamma.dim}
    if gamma.vertices is not None:
        out["vertices"] = [vector_to_json(v) for v in gamma.vertices]
    if gamma.halfspaces is not None:
        out["halfspaces"] = [
            {"normal": vector_to_json(n), "offset": number_to_json(b)}
            for n, b in gamma.halfspaces
        ]
    return out


def gamma_from_json(obj) -> AllocationSet:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("allocation set needs a 'kind' field")
    kind = obj["kind"]
    if kind in STANDARD_KINDS:
        if "k" not in obj:
            raise SchemaError("standard allocation sets need 'k'")
        return make_standard(kind, obj["k"])
    try:
        if kind == "finite":
            if "vertices" not in obj:
                raise SchemaError("finite allocation sets need 'vertices'")
            return finite_set([vector_from_json(v) for v in obj["vertices"]])
        if kind == "polytope":
            verts = obj.get("vertices")
            hs = obj.get("halfspaces")
            return polytope(
                vertices=[vector_from_json(v) for v in verts] if verts else None,
                halfspaces=[
                    (vector_from_json(h["normal"]), number_from_json(h["offset"]))
                    for h in hs
                ]
                if hs
                else None,
                dim=obj.get("k"),
            )
    except (ValueError, KeyError, TypeError) as e:
        raise SchemaError(f"bad allocation set: {e}") from e
    raise SchemaError(f"unknown allocation kind {kind!r}")


# ---------------------------------------------------------------------------
# max-affine functions, menus, mechanisms, distributions, instances
# ---------------------------------------------------------------------------


def pwl_to_json(f: PWLConvex) -> dict:
    return {
        "pieces": [
            {"gradient": vector_to_json(g), "intercept": number_to_json(c)}
            for g, c in f.pieces
        ]
    }


def pwl_from_json(obj) -> PWLConvex:
    if not isinstance(obj, dict) or "pieces" not in obj or not obj["pieces"]:
        raise SchemaError("max-affine function needs a nonempty 'pieces' list")
    pieces = []
    for p in obj["pieces"]:
        if not isinstance(p, dict) or "gradient" not in p or "intercept" not in p:
            raise SchemaError(f"piece needs 'gradient' and 'intercept': {p!r}")
        pieces.append((vector_from_json(p["gradient"]), number_from_json(p["intercept"])))
    return pwl(pieces)


def menu_to_json(mn: Menu) -> list:
    return [
        {"g": vector_to_json(g), "t": number_to_json(t)} for g, t in mn.items
    ]


def menu_from_json(obj, gamma: AllocationSet) -> Menu:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("menu must be a nonempty list of items")
    items = []
    for it in obj:
        if not isinstance(it, dict) or "g" not in it or "t" not in it:
            raise SchemaError(f"menu item needs 'g' and 't': {it!r}")
        items.append((vector_from_json(it["g"]), number_from_json(it["t"])))
    try:
        return menu(items, gamma)
    except ValueError as e:
        raise SchemaError(str(e)) from e


def mechanism_to_json(m: Mechanism) -> dict:
    return {"gamma": gamma_to_json(m.gamma), "menu": menu_to_json(m.menu)}


def mechanism_from_json(obj, gamma: AllocationSet | None = None) -> Mechanism:
    if not isinstance(obj, dict) or "menu" not in obj:
        raise SchemaError("mechanism needs a 'menu' field")
    if gamma is None:
        if "gamma" not in obj:
            raise SchemaError("mechanism needs a 'gamma' field")
        gamma = gamma_from_json(obj["gamma"])
    return Mechanism(menu_from_json(obj["menu"], gamma))


def distribution_to_json(X: DiscreteValuation) -> dict:
    return {
        "support": [vector_to_json(x) for x in X.support],
        "probs": [number_to_json(p) for p in X.probs],
    }


def distribution_from_json(obj) -> DiscreteValuation:
    if not isinstance(obj, dict) or "support" not in obj or "probs" not in obj:
        raise SchemaError("distribution needs 'support' and 'probs'")
    support = [vector_from_json(x) for x in obj["support"]]
    probs = [number_from_json(p) for p in obj["probs"]]
    return discrete_valuation(support, probs)


def instance_to_json(gamma: AllocationSet, X: DiscreteValuation, options: dict | None = None) -> dict:
    out = {"gamma": gamma_to_json(gamma), "distribution": distribution_to_json(X)}
    if options:
        out["options"] = options
    return out


def instance_from_json(obj) -> tuple[AllocationSet, DiscreteValuation, dict]:
    if not isinstance(obj, dict):
        raise SchemaError("instance must be a JSON object")
    if "gamma" not in obj or "distribution" not in obj:
        raise SchemaError("instance needs 'gamma' and 'distribution'")
    gamma = gamma_from_json(obj["gamma"])
    X = distribution_from_json(obj["distribution"])
    options = obj.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError("'options' must be an object")
    if gamma.dim != X.dim:
        raise SchemaError(
            f"allocation set dimension {gamma.dim} does not match support dimension {X.dim}"
        )
    return gamma, X, options


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

_SCHEDULES = {
    "approach": lambda p: approach_schedule(
        p.get("limit", 1), p.get("delta", -1), p.get("power", 1)
    ),
    "geometric": lambda p: geometric_schedule(
        p.get("limit", 1), p.get("delta", -1), p.get("ratio")
    ),
    "truncated_geometric": lambda p: truncated_geometric_schedule(
        p.get("limit", 1), p.get("delta", -1), p.get("cutoff", 30), p.get("ratio")
    ),
    "escaping": lambda p: escaping_schedule(p.get("scale", 1)),
}


def _schedule_from_json(obj):
    if not isinstance(obj, dict) or "type" not in obj:
        raise SchemaError("schedule needs a 'type' field")
    kind = obj["type"]
    if kind == "list":
        prices = [number_from_json(v) for v in obj.get("prices", [])]
        if not prices:
            raise SchemaError("a price list schedule needs 'prices'")
        return lambda n: prices[min(n, len(prices)) - 1]
    if kind not in _SCHEDULES:
        raise SchemaError(f"unknown schedule type {kind!r}")
    params = {
        k: (number_from_json(v) if k in ("limit", "delta", "ratio", "scale") else v)
        for k, v in obj.items()
        if k != "type"
    }
    return _SCHEDULES[kind](params)


def family_from_json(obj, gamma: AllocationSet) -> MechanismSequence:
    if not isinstance(obj, dict) or "family" not in obj:
        raise SchemaError("family needs a 'family' field")
    kind = obj["family"]
    params = obj.get("params", {})
    if kind == "fixed_price":
        return fixed_price_family(gamma, _schedule_from_json(params.get("schedule")))
    if kind == "bundle_price":
        return bundle_price_family(gamma, _schedule_from_json(params.get("schedule")))
    if kind == "menu_list":
        menus = params.get("menus")
        if not menus:
            raise SchemaError("menu_list family needs 'menus'")
        return menu_list_family([menu_from_json(mj, gamma) for mj in menus])
    raise SchemaError(f"unknown family {kind!r}")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def verification_report_to_json(rep: VerificationReport) -> dict:
    return {
        "passed": rep.passed,
        "violations": [
            {
                "kind": v.kind,
                "witness": [vector_to_json(w) for w in v.witness],
                "slack": number_to_json(v.slack),
            }
            for v in rep.violations
        ],
        "notes": list(rep.notes),
    }


def solve_result_to_json(res: SolveResult) -> dict:
    diag = {}
    for k, v in res.diagnostics.items():
        diag[k] = number_to_json(v) if isinstance(v, (Fraction, float)) else v
    return {
        "class": res.class_label,
        "optimal_revenue": number_to_json(res.optimal_revenue),
        "certified": res.certified,
        "mechanism": mechanism_to_json(res.mechanism),
        "diagnostics": diag,
    }


def convergence_report_to_json(rep: ConvergenceReport, include_grid: bool = True) -> dict:
    out = {
        "converged": rep.converged,
        "sup_gap": number_to_json(rep.sup_gap) if rep.sup_gap is not None else None,
        "revenue_sequence": [number_to_json(r) for r in rep.revenue_sequence],
        "usc_holds": rep.usc_holds,
        "usc_slack": number_to_json(rep.usc_slack),
        "pointwise_ok": rep.pointwise_ok,
        "pointwise_violations": [
            {"point": vector_to_json(x), "excess": number_to_json(e)}
            for x, e in rep.pointwise_violations
        ],
        "limit_menu": menu_to_json(rep.limit_mechanism.menu),
        "n_max": rep.n_max,
        "window": rep.window,
    }
    if include_grid:
        out["grid"] = [vector_to_json(x) for x in rep.grid]
        out["limit_values"] = [number_to_json(v) for v in rep.limit_values]
    return out


def demo_report_to_json(rep: InfiniteExpectationReport) -> dict:
    return {
        "truncation": rep.truncation,
        "prices": [
            {
                "price": number_to_json(r.price),
                "model_revenue": number_to_json(r.model_revenue),
                "truncated_revenue": number_to_json(r.truncated_revenue),
                "exact_match": r.exact_match,
            }
            for r in rep.price_rows
        ],
        "escaping": {
            "n": list(rep.escaping_ns),
            "model_revenue": [number_to_json(r) for r in rep.escaping_model_revenues],
            "checked": [
                {"n": n, "revenue": number_to_json(r)} for n, r in rep.escaping_checked
            ],
            "sup_revenue": number_to_json(rep.sup_escaping_revenue),
        },
        "limit_menu": menu_to_json(rep.limit_mechanism.menu),
        "limit_revenue": number_to_json(rep.limit_revenue),
        "truncated_usc_slack": number_to_json(rep.truncated_usc_slack),
    }


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def csv_cell(x) -> str:
    if isinstance(x, Fraction):
        return format(float(x), ".17g")
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(csv_cell(c) for c in row) + "\n")


def compare_csv_row(values: dict) -> tuple[list, list]:
    header = ["Rev", "DRev", "SRev", "BRev", "MonRev_UB", "AMonRev_UB"]
    return header, [values[h] for h in header]


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_convergence_figure(rep: ConvergenceReport, path: str) -> None:
    """Revenue sequence against the limit mechanism's revenue."""
    plt = _pyplot()
    revs = [float(r) for r in rep.revenue_sequence]
    ns = list(range(1, len(revs) + 1))
    limit_rev = float(rep.usc_slack) + max(revs[-rep.window:])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, revs, marker="o", ms=3, lw=1, label="revenue of member n")
    ax.axhline(limit_rev, color="tab:red", lw=1.2, ls="--", label="limit mechanism")
    ax.set_xlabel("n")
    ax.set_ylabel("revenue")
    ax.set_title(f"usc slack = {float(rep.usc_slack):.3g}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare_figure(values: dict, path: str) -> None:
    plt = _pyplot()
    header, row = compare_csv_row(values)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(header, [float(v) for v in row], color="tab:blue")
    ax.set_ylabel("revenue")
    ax.tick_params(axis="x", labelrotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_demo_figure(rep: InfiniteExpectationReport, path: str) -> None:
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    prices = [float(r.price) for r in rep.price_rows]
    model = [float(r.model_revenue) for r in rep.price_rows]
    got = [float(r.truncated_revenue) for r in rep.price_rows]
    ax1.semilogx(prices, model, "k-", lw=1, label="p/(p+1)")
    ax1.semilogx(prices, got, "o", ms=5, mfc="none", label="truncated model")
    ax1.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax1.set_xlabel("price")
    ax1.set_ylabel("revenue")
    ax1.legend(fontsize=8)
    ns = [float(n) for n in rep.escaping_ns]
    revs = [float(r) for r in rep.escaping_model_revenues]
    ax2.semilogx(ns, revs, "o-", ms=3, lw=1, label="escaping price n")
    ax2.axhline(float(rep.limit_revenue), color="tab:red", lw=1.2, ls="--",
                label="limit mechanism")
    ax2.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax2.set_xlabel("n")
    ax2.set_ylabel("revenue")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
