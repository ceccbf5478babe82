"""Command-line entry point: ``nullstate <subcommand> [flags]``.

Every run prints one JSON object ``{"config": ..., "result": ..., "passed": ...}``
or, with ``--output csv``, a ``# config: {...}`` comment line followed by a CSV
table.  Floats are written with 17 significant digits; non-finite floats
become ``null`` in JSON.

Exit status: 0 on success, 1 when a check ran and failed, 2 on usage or
numerical errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import diagrams as dg
from . import limits, params, pde_check, percolation, solutions
from .specfun import ConvergenceError, DomainError, ParameterError

DEFAULT_SEED = 0
DEFAULT_PDE_TOL = 1e-5
DEFAULT_PDE_POINTS = 20

NUMERICAL_ERRORS = (ParameterError, DomainError, ConvergenceError, limits.ClassificationError,
                    pde_check.StepError, ValueError, ArithmeticError, OverflowError)


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def _plain(obj):
    """Convert to JSON-ready builtins (Fractions and numpy scalars become floats)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, (float, Fraction)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item"):
        return _plain(obj.item())
    return str(obj)


def to_json(obj) -> str:
    def enc(o):
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt_float(o) if math.isfinite(o) else "null"
        if isinstance(o, (int, str)):
            return json.dumps(o)
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {enc(v)}" for k, v in o.items()) + "}"
        return "[" + ", ".join(enc(v) for v in o) + "]"

    return enc(_plain(obj))


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}" if prefix else str(i))
    else:
        yield prefix, obj


def _cell(v):
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, list):
        return " ".join(str(_cell(x)) for x in v)
    return "" if v is None else v


def to_csv(rows) -> str:
    """``rows`` is a list of flat dicts (one per line) or a dict (key,value lines)."""
    rows = _plain(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(rows, dict):
        w.writerow(["key", "value"])
        for k, v in _flatten(rows):
            w.writerow([k, _cell(v)])
    else:
        header = list(rows[0]) if rows else []
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r.get(h)) for h in header])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument types


def kappa_arg(text: str):
    """Decimal or rational kappa; rationals stay exact (``8/3``)."""
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if "/" in text:
        return q
    return q if q.denominator == 1 else float(text)


def floats_arg(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


# ---------------------------------------------------------------------------
# subcommands; each returns (result, passed, csv_rows)


def _handle(a, n_default=None):
    return solutions.build(a.solution, kappa=a.kappa, n_pairs=a.n or n_default, c1=a.c1, c2=a.c2,
                           scale=a.scale)


def _default_anchor(n_pairs: int) -> tuple:
    return tuple(float(k) for k in range(2 * n_pairs))


def cmd_params(a):
    out = params.summary(a.kappa)
    return out, None, out


def cmd_diagrams(a):
    rows = []
    for idx, d in enumerate(dg.enumerate_diagrams(a.n)):
        rows.append({"index": idx, "pairs": [list(p) for p in d.pairs],
                     "allowable_sequences": len(dg.allowable_sequences(d))})
    result = {"n_pairs": a.n, "count": len(rows), "catalan": dg.catalan(a.n), "diagrams": rows}
    csv_rows = [dict(r, pairs=";".join(f"{p}-{q}" for p, q in r["pairs"])) for r in rows]
    return result, None, csv_rows


def cmd_eval(a):
    n = len(a.point) // 2 if a.point else None
    f = _handle(a, n)
    value = f(a.point)
    out = {"solution": f.label, "point": a.point, "value": value}
    return out, None, out


def _load_points(path):
    with open(path) as fh:
        data = json.load(fh)
    pts = data["points"] if isinstance(data, dict) else data
    return [tuple(float(x) for x in p) for p in pts]


def cmd_check_pde(a):
    f = _handle(a)
    pts = (_load_points(a.points) if a.points
           else pde_check.random_points(f.n_pairs, a.count, seed=a.seed))
    rep = pde_check.full_report(f, pts, rel_step=a.rel_step,
                                order_points=None if a.order_points == 0 else a.order_points)
    checks = {}
    if f.claims.satisfies_null_state:
        checks["null_state"] = rep.max_null_state <= a.tol
    if f.claims.satisfies_ward:
        checks["ward"] = max(rep.ward) <= a.tol
    elif f.claims.satisfies_ward is False:
        checks["translation_ward"] = rep.ward[0] <= a.tol
    if rep.convergence_order is not None and f.claims.satisfies_null_state:
        n = 2 * f.n_pairs
        claimed = list(range(n)) + ([n, n + 1, n + 2] if f.claims.satisfies_ward else [n])
        orders = [rep.convergence_order[c] for c in claimed if rep.convergence_order[c] is not None]
        checks["order"] = all(o >= a.min_order for o in orders)
    passed = all(checks.values())
    out = {"solution": f.label, "points": [list(p) for p in pts], "report": rep.to_dict(),
           "checks": checks, "tolerance": a.tol}
    csv_rows = [{"point": p["point"], **{f"null_{j + 1}": v for j, v in enumerate(p["null_state"])},
                 **{f"ward_{j + 1}": v for j, v in enumerate(p["ward"])}} for p in rep.per_point]
    return out, passed, csv_rows


def cmd_collapse(a):
    f = _handle(a)
    pt = tuple(a.point) if a.point else _default_anchor(f.n_pairs)
    if a.outer:
        res = limits.collapse_outer(f, pt)
    else:
        res = limits.collapse_interval(f, a.interval, pt)
    out = {"solution": f.label, "point": list(pt), "interval": None if a.outer else a.interval,
           **res.to_dict()}
    if a.classify and not a.outer:
        out["classification"] = limits.classify_interval(f, a.interval, [pt]).to_dict()
    row = {k: out[k] for k in ("kind", "value", "exponent_fit", "stderr")}
    return out, None, [row]


def cmd_dual_vector(a):
    f = _handle(a)
    anchor = tuple(a.anchor) if a.anchor else _default_anchor(f.n_pairs)
    dv = limits.dual_vector(f, anchor)
    diags = dg.enumerate_diagrams(f.n_pairs)
    rows = [{"index": i, "pairs": ";".join(f"{p}-{q}" for p, q in d.pairs), "value": v, "stderr": e}
            for i, (d, v, e) in enumerate(zip(diags, dv.values, dv.stderr))]
    out = {"solution": f.label, "anchor": list(anchor), **dv.to_dict()}
    if f.claims.known_dual_vector is not None:
        out["expected"] = list(f.claims.known_dual_vector)
    return out, None, rows


def cmd_cardy(a):
    rows = [{"R": r, "probability": percolation.cardy_probability(r)} for r in a.ratio]
    out = rows[0] if len(rows) == 1 else {"ratios": rows}
    return out, None, rows


_KIND = {"square-bond": "square_bond", "triangular-site": "triangular_site"}


def cmd_percolate(a):
    kind = _KIND[a.kind]
    if a.ratios:
        specs = [percolation.LatticeSpec.square(a.height, r, a.p) if kind == "square_bond"
                 else percolation.LatticeSpec(kind, int(round(r * (a.height - 1) * math.sqrt(3) / 2)) + 1,
                                              a.height, a.p)
                 for r in a.ratios]
    else:
        specs = [percolation.LatticeSpec(kind, a.width, a.height, a.p)]
    reports = []
    for spec in specs:
        if a.compare:
            reports.append(percolation.compare(spec, a.trials, a.seed, a.threads))
        else:
            b = percolation.run_batch(spec, a.trials, a.seed, a.threads)
            reports.append({"batch": b.to_dict(), "aspect_ratio": spec.aspect_ratio,
                            "p_hat": b.p_hat, "stderr": b.stderr})
    passed = all(r["passed"] for r in reports) if a.compare else None
    out = reports[0] if len(reports) == 1 else {"reports": reports}
    if a.compare:
        csv_rows = [{k: r[k] for k in ("aspect_ratio", "p_hat", "stderr", "cardy", "z")} for r in reports]
        csv_rows = [{"R": r.pop("aspect_ratio"), **r} for r in csv_rows]
    else:
        csv_rows = [{"R": r["aspect_ratio"], "p_hat": r["p_hat"], "stderr": r["stderr"]} for r in reports]
    return out, passed, csv_rows


# ---------------------------------------------------------------------------
# parser


def _common(p, top=False):
    d = argparse.SUPPRESS
    p.add_argument("--output", choices=("json", "csv"), default=d, help="output format (json)")
    p.add_argument("--threads", type=positive_int, default=d, help="worker threads for percolation")
    p.add_argument("--seed", type=int, default=d, help=f"random seed ({DEFAULT_SEED})")


def _solution_flags(p, need_kappa=True, need_n=False):
    p.add_argument("--solution", required=True, choices=sorted(solutions.SOLUTIONS))
    p.add_argument("--kappa", type=kappa_arg, required=False, default=None,
                   help="SLE parameter, decimal or rational such as 8/3")
    p.add_argument("--n", type=positive_int, default=None, help="number of curve pairs N")
    p.add_argument("--c1", type=float, default=1.0, help="s2 coefficient of G1")
    p.add_argument("--c2", type=float, default=0.0, help="s2 coefficient of G2")
    p.add_argument("--scale", type=float, default=1.0, help="constant factor for s1 / constant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nullstate", description=__doc__.split("\n\n")[0])
    _common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("params", help="CFT data at a given kappa")
    p.add_argument("--kappa", type=kappa_arg, required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("diagrams", help="arc diagrams and their allowable sequence counts")
    p.add_argument("--n", type=positive_int, required=True)
    p.set_defaults(func=cmd_diagrams)

    p = sub.add_parser("eval", help="evaluate a solution handle")
    _solution_flags(p)
    p.add_argument("--point", type=floats_arg, required=True, help="x1,...,x2N")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-pde", help="finite-difference residuals of the PDEs and Ward identities")
    _solution_flags(p)
    p.add_argument("--points", help="JSON file holding a list of points (or {'points': [...]})")
    p.add_argument("--count", type=positive_int, default=DEFAULT_PDE_POINTS, help="random points if no file")
    p.add_argument("--tol", type=float, default=DEFAULT_PDE_TOL, help="residual tolerance")
    p.add_argument("--min-order", type=float, default=3.5, help="minimum fitted convergence order")
    p.add_argument("--rel-step", type=float, default=pde_check.DEFAULT_REL_STEP)
    p.add_argument("--order-points", type=int, default=3, help="points used for the order fit (0 = all)")
    p.set_defaults(func=cmd_check_pde)

    p = sub.add_parser("collapse", help="one collapse limit")
    _solution_flags(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--interval", type=positive_int, help="collapse (x_i, x_{i+1}), 1-based")
    g.add_argument("--outer", action="store_true", help="collapse the outermost pair")
    p.add_argument("--point", type=floats_arg, default=None, help="base point (default 0,1,...,2N-1)")
    p.add_argument("--classify", action="store_true", help="also classify the interval")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("dual-vector", help="one limit per arc diagram")
    _solution_flags(p)
    p.add_argument("--anchor", type=floats_arg, default=None, help="anchor point (default 0,1,...,2N-1)")
    p.set_defaults(func=cmd_dual_vector)

    p = sub.add_parser("cardy", help="continuum crossing probability")
    p.add_argument("--ratio", type=floats_arg, required=True, help="aspect ratio(s), comma-separated")
    p.set_defaults(func=cmd_cardy)

    p = sub.add_parser("percolate", help="Monte Carlo crossing probability")
    p.add_argument("--kind", choices=sorted(_KIND), default="square-bond")
    p.add_argument("--width", type=positive_int, default=200)
    p.add_argument("--height", type=positive_int, default=200)
    p.add_argument("--ratios", type=floats_arg, default=None,
                   help="sweep: aspect ratios at fixed height (width derived)")
    p.add_argument("--trials", type=positive_int, default=100_000)
    p.add_argument("--p", type=float, default=0.5, help="open probability")
    p.add_argument("--compare", action="store_true", help="compare with the continuum prediction")
    p.set_defaults(func=cmd_percolate)

    for sp in sub.choices.values():
        _common(sp)
    return parser


def resolve(argv=None) -> argparse.Namespace:
    a = build_parser().parse_args(argv)
    a.output = getattr(a, "output", "json")
    a.threads = getattr(a, "threads", None)
    a.seed = getattr(a, "seed", DEFAULT_SEED)
    return a


def _config(a) -> dict:
    return {k: v for k, v in vars(a).items() if k != "func"}


def main(argv=None) -> int:
    try:
        a = resolve(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    config = _config(a)
    try:
        result, passed, rows = a.func(a)
    except NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"nullstate {a.command}: {type(exc).__name__}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"nullstate {a.command}: {exc}\n")
        return 2
    if a.output == "csv":
        sys.stdout.write(f"# config: {to_json(config)}\n")
        sys.stdout.write(to_csv(rows))
    else:
        sys.stdout.write(to_json({"config": config, "result": result, "passed": passed}) + "\n")
    return 1 if passed is False else 0


if __name__ == "__main__":
    sys.exit(main())
