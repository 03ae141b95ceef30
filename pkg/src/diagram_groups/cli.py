"""Command-line front end.  Every subcommand prints one JSON document on stdout.

Errors are reported as ``{"error": <code>, "detail": <text>}`` with exit
status 2; a subcommand whose asserted check fails exits with status 1.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import thompson
from .action import GroupElement, displacement, min_displacement_scan, vertex_displacement
from .complex import CubeSpec, ball, convexity_report, fmt_fraction
from .diagram import Diagram, Presentation, compose, concat, inverse, reduce
from .errors import DiagramError
from .poset import glb


class InputError(Exception):
    code = "InputError"


def _load(path):
    try:
        if path == "-":
            obj = json.load(sys.stdin)
        else:
            with open(path) as fh:
                obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict) or "top" not in obj:
        raise InputError(f"{path}: expected a diagram object with 'top' and 'cells'")
    try:
        return Diagram.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed diagram ({exc})") from None


def _coords(text):
    try:
        return [Fraction(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad coordinate list {text!r}; use p/q,p/q,...") from None


def _threads():
    raw = os.environ.get("DG_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"DG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError("DG_THREADS must be a positive integer")
    return n


# ---- subcommands ---------------------------------------------------------
# each returns (payload, ok)

def cmd_reduce(a):
    return reduce(_load(a.input)).to_json(), True


def cmd_compose(a):
    return compose(_load(a.a), _load(a.b)).to_json(), True


def cmd_concat(a):
    return concat(_load(a.a), _load(a.b)).to_json(), True


def cmd_inverse(a):
    return inverse(_load(a.input)).to_json(), True


def cmd_glb(a):
    return glb(_load(a.a), _load(a.b)).to_json(), True


def cmd_element(a):
    d = thompson.g_xxx() if a.name == "g" else thompson.g_x()
    return d.diag.to_json(), True


def cmd_ball(a):
    pres = Presentation.thompson() if a.presentation is None else Presentation.from_json(
        json.load(open(a.presentation))
    )
    top = pres.parse_word(a.top)
    g = ball(top, a.max_cells, pres, cap=a.cap)
    if a.count_only:
        return len(g), True
    return {"top": list(top), "max_cells": a.max_cells, "count": len(g),
            "vertices": [v.to_json()["cells"] for v in g.vertices]}, True


def cmd_displacement(a):
    g = GroupElement(_load(a.element))
    u = _load(a.base)
    if a.phi is None:
        if a.coords:
            raise InputError("--coords needs --phi")
        b = vertex_displacement(g, u, refine=a.refine, max_nodes=a.max_nodes)
        return {"point": "vertex", **b.to_json()}, True
    q, flip = CubeSpec.from_any_base(u, _load(a.phi))
    y = _coords(a.coords) if a.coords else [Fraction(1, 2)] * q.dim
    if len(y) != q.dim:
        raise InputError(f"expected {q.dim} coordinates, got {len(y)}")
    if any(t < 0 or t > 1 for t in y):
        raise InputError("coordinates must lie in [0, 1]")
    # coordinates are given relative to the supplied base
    y = [1 - t if flip >> i & 1 else t for i, t in enumerate(y)]
    b = displacement(g, q, y, refine=a.refine, max_nodes=a.max_nodes)
    return {"point": [fmt_fraction(t) for t in y], "dim": q.dim, **b.to_json()}, True


def cmd_scan(a):
    g = GroupElement(_load(a.element))
    r = min_displacement_scan(g, a.ball, a.max_dim, refine=a.refine, max_nodes=a.max_nodes)
    ok = r["exact_at_most_2"] == 0 and r["midpoint_exact_below_9_4"] == 0
    return r, ok


def cmd_farley(a):
    if a.n < 1:
        raise InputError("--n must be positive")
    if not a.upto:
        r = thompson.farley_report(a.n)
        return r, r["match"]
    reports = [thompson.farley_report(n) for n in range(1, a.n + 1)]
    values = [Fraction(r["d_squared"]) for r in reports if r["match"]]
    decreasing = all(x > y for x, y in zip(values, values[1:]))
    ok = all(r["match"] for r in reports) and decreasing
    return {"upto": a.n, "all_match": ok, "strictly_decreasing": decreasing,
            "reports": reports}, ok


def cmd_conjugates(a):
    r = thompson.classify_small_conjugates(a.cap, max_size=a.max_size)
    ok = r["all_four_cells"] and r["two_of_each_type"] and r["closed_under_conjugation"]
    return r, ok


def cmd_check_convexity(a):
    r = convexity_report(a.samples, a.max_w, seed=a.seed, ambient_cells=a.ambient_cells)
    return r, r["all_true"] and r["negative_control_detected"] is not False


def build_parser():
    p = argparse.ArgumentParser(prog="diagram-groups", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn in (("reduce", cmd_reduce), ("inverse", cmd_inverse)):
        s = sub.add_parser(name)
        s.add_argument("input", help="diagram JSON file, or - for stdin")
        s.set_defaults(func=fn)
    for name, fn in (("compose", cmd_compose), ("concat", cmd_concat), ("glb", cmd_glb)):
        s = sub.add_parser(name)
        s.add_argument("a")
        s.add_argument("b")
        s.set_defaults(func=fn)

    s = sub.add_parser("element", help="print a built-in element of F as diagram JSON")
    s.add_argument("name", choices=["g", "g_x"])
    s.set_defaults(func=cmd_element)

    s = sub.add_parser("ball")
    s.add_argument("--top", required=True)
    s.add_argument("--max-cells", type=int, required=True)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--presentation", help="presentation JSON (default <x | x=xx>)")
    s.add_argument("--cap", type=int, default=500_000)
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("displacement")
    s.add_argument("--element", required=True)
    s.add_argument("--base", required=True)
    s.add_argument("--phi")
    s.add_argument("--coords", help="p/q,... measured from --base (default: cube midpoint)")
    s.add_argument("--refine", type=int, default=4)
    s.add_argument("--max-nodes", type=int, default=400)
    s.set_defaults(func=cmd_displacement)

    s = sub.add_parser("scan")
    s.add_argument("--element", required=True)
    s.add_argument("--ball", type=int, required=True)
    s.add_argument("--max-dim", type=int, required=True)
    s.add_argument("--refine", type=int, default=0)
    s.add_argument("--max-nodes", type=int, default=64)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("farley")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--upto", action="store_true")
    s.set_defaults(func=cmd_farley)

    s = sub.add_parser("conjugates")
    s.add_argument("--cap", type=int, required=True)
    s.add_argument("--max-size", type=int, default=200_000)
    s.set_defaults(func=cmd_conjugates)

    s = sub.add_parser("check-convexity")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--max-w", type=int, default=6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ambient-cells", type=int, default=7)
    s.set_defaults(func=cmd_check_convexity)
    return p


def run(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        _threads()
        payload, ok = args.func(args)
    except (DiagramError, InputError) as exc:
        detail = getattr(exc, "detail", None) or str(exc)
        json.dump({"error": exc.code, "detail": detail}, out)
        out.write("\n")
        return 2
    json.dump(payload, out, indent=1, sort_keys=True)
    out.write("\n")
    return 0 if ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
