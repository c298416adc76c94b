"""``gaugeint`` command line.

Every subcommand prints one JSON document (or CSV with ``--format csv``).
Exit status is 0 on success, 2 when the library reports a contract error
(the document then holds ``{"error": {"code": ..., "message": ...}}``) and
1 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .core import Interval, mesh
from .cousin import (
    DEFAULT_STRATEGY,
    IRRATIONAL_FIRST,
    LEFT_ONLY,
    MIDPOINT_FIRST,
    cover_to_partition,
    fine_partition,
    finite_subcover,
    first_uncovered,
)
from .errors import GaugeError, ParseError, PreconditionError, UnknownNameError
from .exact import Tag, parse_tag
from .expr import expr_function, expr_gauge, parse_expr
from .fan import constant_functional, first_bit_functional, random_functional, theta, verify_scf
from .funcs import BUILTINS, BuiltinFn, builtin, poly
from .integrator import DivergenceReport, gauge_integrate, hake_limit, riemann_integrate
from .lindelof import FiniteTree, countable_subcover_reals, has_maximal_path, wellfounded_via_xi

STRATEGIES = {s.name: s for s in (DEFAULT_STRATEGY, MIDPOINT_FIRST, IRRATIONAL_FIRST, LEFT_ONLY)}
MAX_ITEMS = 1_000_000


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# flag parsing ----------------------------------------------------------------


def _exact(text: str) -> Tag:
    return parse_tag(text)


def _positive_fraction(text: str) -> Fraction:
    v = parse_tag(text)
    if not v.is_rational() or v <= 0:
        raise PreconditionError(f"expected a positive rational, got {text!r}")
    return v.a


def _target(vals: Optional[Sequence[str]]) -> Interval:
    if not vals:
        return Interval(0, 1)
    lo, hi = (_exact(v) for v in vals)
    if not lo < hi:
        raise PreconditionError(f"target needs lo < hi, got [{lo}, {hi}]")
    return Interval(lo, hi)


def _fn(text: str):
    """A builtin name, ``poly:c0,c1,...`` or an expression in ``x``."""
    if text in BUILTINS:
        return builtin(text)
    if text.startswith("poly:"):
        return poly([_exact(c).a for c in text[5:].split(",")])
    node = parse_expr(text)
    extra = node.names() - {"x", "sqrt2"} - set(_fn_names())
    if extra:
        raise ParseError(f"function expressions may only use x; found {sorted(extra)}", 0)
    return expr_function(node, text)


def _fn_names():
    from .expr import FUNCTIONS

    return FUNCTIONS


def _modulus(text: str, f):
    """``builtin`` (the function's own modulus) or an expression in ``x, eps``."""
    if text == "builtin":
        mod = getattr(f, "modulus", None)
        if mod is None:
            raise UnknownNameError(f"{getattr(f, 'name', text)} has no builtin gauge modulus")
        return mod
    node = parse_expr(text)
    return lambda eps: expr_gauge(node, eps, text)


def _gauge(text: str, eps: Optional[str]):
    """``builtin:NAME`` or an expression in ``x`` (and ``eps``)."""
    e = _positive_fraction(eps) if eps is not None else None
    if text.startswith("builtin:"):
        name = text[8:]
        b = builtin(name)
        if b.modulus is None:
            raise UnknownNameError(f"builtin {name!r} has no gauge modulus")
        if e is None:
            raise PreconditionError("builtin gauges need --eps")
        return b.modulus(e)
    node = parse_expr(text)
    if "eps" in node.names() and e is None:
        raise PreconditionError("the gauge uses eps; pass --eps")
    return expr_gauge(node, e, text)


_PAIR = re.compile(r"\(\s*([^,()]+(?:\([^()]*\))?[^,()]*)\s*,\s*([^,()]+(?:\([^()]*\))?[^,()]*)\s*\)")


def _intervals(text: str) -> list[Interval]:
    """``"(a,b),(c,d)"`` with exact endpoints."""
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _PAIR.match(text, pos)
        if not m:
            raise ParseError("expected '(lo,hi)'", len(text[:pos].encode()))
        lo, hi = _exact(m.group(1)), _exact(m.group(2))
        if lo > hi:
            raise PreconditionError(f"interval ({lo}, {hi}) has lo > hi")
        out.append(Interval.open(lo, hi))
        pos = m.end()
        rest = text[pos:].lstrip()
        if rest.startswith(","):
            pos = len(text) - len(rest) + 1
            if not text[pos:].strip():
                raise ParseError("trailing ','", len(text[:pos].encode()))
        elif rest:
            raise ParseError("expected ',' between intervals", len(text[: len(text) - len(rest)].encode()))
        else:
            break
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not out:
        raise ParseError("no intervals given", 0)
    return out


def _strategy(name: str):
    try:
        return STRATEGIES[name]
    except KeyError:
        raise UnknownNameError(f"unknown strategy {name!r}; known: {', '.join(sorted(STRATEGIES))}") from None


def _num(v: float):
    """JSON has no inf/nan."""
    v = float(v)
    return v if math.isfinite(v) else None


# subcommands -------------------------------------------------------------------


def _result_doc(r) -> dict:
    return {
        "value": _num(r.value),
        "error_bound": _num(r.error_bound),
        "partitions_used": r.partitions_used,
        "finest_mesh": str(r.finest_mesh),
        "converged": r.converged,
        "method": r.method,
        "message": r.message,
    }


def cmd_integrate(a):
    f = _fn(a.fn)
    phi = _modulus(a.modulus, f)
    r = gauge_integrate(
        f, phi, _target(a.target), _positive_fraction(a.eps_min), _strategy(a.strategy), a.depth_cap,
        eps_max=_positive_fraction(a.eps_max), extrapolate=a.extrapolate, max_pieces=a.max_pieces,
    )
    doc = _result_doc(r)
    doc["raw_value"] = _num(r.raw_value)
    doc["levels"] = [{"eps": str(l["eps"]), "value": _num(l["value"]), "pieces": l["pieces"]} for l in r.levels]
    return doc, doc["levels"]


def cmd_riemann(a):
    f = _fn(a.fn)
    r = riemann_integrate(f, _target(a.target), a.tol, a.n_max)
    doc = _result_doc(r)
    return doc, [doc]


def _items_doc(P, gauge) -> tuple[dict, list]:
    if len(P) > MAX_ITEMS:
        raise PreconditionError(f"partition has {len(P)} pieces; output is limited to {MAX_ITEMS}")
    rows = [{"tag": str(p.tag), "lo": str(p.interval.lo), "hi": str(p.interval.hi)} for p in P]
    from .core import is_fine

    doc = {"items": rows, "count": len(P), "finest_mesh": str(mesh(P)), "fine": is_fine(gauge, P)}
    return doc, rows


def cmd_partition(a):
    g = _gauge(a.gauge, a.eps)
    P = fine_partition(g, _target(a.target), _strategy(a.strategy), a.depth_cap)
    return _items_doc(P, g)


def cmd_subcover(a):
    g = _gauge(a.gauge, a.eps)
    sc = finite_subcover(g, _target(a.target), a.depth_cap, _strategy(a.strategy))
    if len(sc) > MAX_ITEMS:
        raise PreconditionError(f"subcover has {len(sc)} centers; output is limited to {MAX_ITEMS}")
    doc = {"centers": [str(c) for c in sc.centers], "radii": [str(r) for r in sc.radii], "covers": sc.verified}
    rows = [{"center": c, "radius": r} for c, r in zip(doc["centers"], doc["radii"])]
    if a.to_partition:
        pdoc, _ = _items_doc(cover_to_partition(sc), g)
        doc["partition"] = pdoc["items"]
    return doc, rows


def cmd_verify_cover(a):
    ivs = _intervals(a.intervals)
    w = first_uncovered(ivs, _target(a.target))
    doc = {"covers": w is None, "uncovered": None if w is None else str(w)}
    return doc, [doc]


def cmd_hake(a):
    f = _fn(a.fn)
    probes = [_exact(p) for p in a.probes] if a.probes else None
    r = hake_limit(f, probes, a.tol, threshold=a.threshold, min_monotone=a.min_monotone)
    if isinstance(r, DivergenceReport):
        doc = {
            "diverges": r.diverges,
            "converged": False,
            "verdict": r.verdict,
            "reason": r.reason,
            "partials": [_num(v) for v in r.partials],
            "probes": [str(p) for p in r.probes],
        }
        rows = [{"probe": p, "partial": v} for p, v in zip(doc["probes"], doc["partials"])]
        return doc, rows
    doc = _result_doc(r)
    doc["diverges"] = False
    return doc, [doc]


def _functional(text: str):
    if text == "first-bit":
        return first_bit_functional()
    m = re.fullmatch(r"const:(\d+)", text)
    if m:
        return constant_functional(int(m.group(1)))
    m = re.fullmatch(r"random:(\d+)(?::(\d+))?", text)
    if m:
        return random_functional(int(m.group(1)), None if m.group(2) is None else int(m.group(2)))
    raise UnknownNameError(f"unknown functional {text!r}; use const:N, first-bit or random:SEED[:BOUND]")


def cmd_fan(a):
    G = _functional(a.functional)
    seqs = theta(G, a.depth_cap)
    depth = max([G.continuity_bound or 0] + [G(g) for g in seqs])
    doc = {"sequences": [str(s) for s in seqs], "values": [G(s) for s in seqs], "count": len(seqs),
           "verified": verify_scf(seqs, G, depth)}
    rows = [{"sequence": s, "value": v} for s, v in zip(doc["sequences"], doc["values"])]
    return doc, rows


def cmd_lindelof(a):
    g = _gauge(a.gauge, a.eps)
    cs = countable_subcover_reals(g, a.n_max, a.depth_cap)
    blocks = [{"N": N, "indices": cs.block(N), "covers": cs.covers(N)} for N in range(1, a.n_max + 1)]
    pairs = cs.upto(a.n_max)
    doc = {
        "centers": [str(c) for c, _ in pairs],
        "radii": [str(r) for _, r in pairs],
        "provenance": [cs.provenance(i) for i in range(len(pairs))],
        "blocks": blocks,
        "covers": all(b["covers"] for b in blocks),
    }
    rows = [{"index": i, "center": c, "radius": r, "block": n}
            for i, (c, r, n) in enumerate(zip(doc["centers"], doc["radii"], doc["provenance"]))]
    return doc, rows


def _nodes(text: str) -> list[tuple]:
    """``";0;1;0,1"``: sequences separated by ';', the empty string is the root."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if part in ("", "<>"):
            out.append(())
            continue
        try:
            out.append(tuple(int(v) for v in part.split(",")))
        except ValueError:
            raise ParseError(f"bad node {part!r}", len(text[: text.find(part)].encode())) from None
    return out


def cmd_wellfounded(a):
    if a.full:
        tree = FiniteTree(a.branching, a.depth, lambda s: True)
    elif a.nodes is not None:
        tree = FiniteTree.from_nodes(a.branching, a.depth, _nodes(a.nodes))
    else:
        raise UsageError("wellfounded: give --nodes or --full")
    wf = wellfounded_via_xi(tree)
    doc = {"wellfounded": wf, "has_maximal_path": has_maximal_path(tree), "agrees": wf != has_maximal_path(tree)}
    return doc, [doc]


def cmd_compare(a):
    """Gauge integral against a Riemann integral, or against a second modulus."""
    f = _fn(a.fn)
    target = _target(a.target)
    eps = _positive_fraction(a.eps_min)
    g1 = gauge_integrate(f, _modulus(a.modulus, f), target, eps, _strategy(a.strategy), a.depth_cap,
                         eps_max=eps if a.single_level else Fraction(1, 2), max_pieces=a.max_pieces)
    if a.modulus2:
        other = gauge_integrate(f, _modulus(a.modulus2, f), target, eps, _strategy(a.strategy), a.depth_cap,
                                eps_max=eps if a.single_level else Fraction(1, 2), max_pieces=a.max_pieces)
    else:
        other = riemann_integrate(f, target, a.tol)
    diff = abs(g1.value - other.value)
    bound = g1.error_bound + other.error_bound
    doc = {
        "gauge": _result_doc(g1),
        "other": _result_doc(other),
        "difference": _num(diff),
        "error_bound": _num(bound),
        "agrees": diff <= bound,
    }
    return doc, [{"difference": doc["difference"], "error_bound": doc["error_bound"], "agrees": doc["agrees"]}]


# wiring -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gaugeint", description="Gauge integrals, fine partitions and covers.")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, target=True, strategy=True, depth=True):
        if target:
            sp.add_argument("--target", nargs=2, metavar=("LO", "HI"), help="exact endpoints (default 0 1)")
        if strategy:
            sp.add_argument("--strategy", default="default", help=", ".join(sorted(STRATEGIES)))
        if depth:
            sp.add_argument("--depth-cap", type=int, default=None, help="bisection depth (env GAUGEINT_DEPTH_CAP)")
        sp.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    s = sub.add_parser("integrate", help="gauge integral over a dyadic eps schedule")
    s.add_argument("--fn", required=True, help="builtin name, poly:c0,c1,.. or expression in x")
    s.add_argument("--modulus", default="builtin", help="'builtin' or a gauge expression in x and eps")
    s.add_argument("--eps-min", default="1/1024")
    s.add_argument("--eps-max", default="1/2")
    s.add_argument("--extrapolate", action="store_true", help="one Richardson step over the levels")
    s.add_argument("--max-pieces", type=int, default=1 << 30)
    common(s)
    s.set_defaults(run=cmd_integrate)

    s = sub.add_parser("riemann", help="midpoint Riemann integral")
    s.add_argument("--fn", required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--n-max", type=int, default=24)
    common(s, strategy=False, depth=False)
    s.set_defaults(run=cmd_riemann)

    for name, fn, help_ in (("partition", cmd_partition, "a fine tagged partition"),
                            ("subcover", cmd_subcover, "a finite subcover")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--gauge", required=True, help="expression in x (and eps) or builtin:NAME")
        s.add_argument("--eps", default=None)
        if name == "subcover":
            s.add_argument("--to-partition", action="store_true")
        common(s)
        s.set_defaults(run=fn)

    s = sub.add_parser("verify-cover", help="do open intervals cover the target")
    s.add_argument("--intervals", required=True, help='"(lo,hi),(lo,hi),..."')
    common(s, strategy=False, depth=False)
    s.set_defaults(run=cmd_verify_cover)

    s = sub.add_parser("hake", help="limit of integrals over [x, 1] as x decreases")
    s.add_argument("--fn", required=True)
    s.add_argument("--probes", nargs="+", default=None)
    s.add_argument("--tol", type=float, default=1e-2)
    s.add_argument("--threshold", type=float, default=1e6)
    s.add_argument("--min-monotone", type=int, default=5)
    s.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    s.set_defaults(run=cmd_hake)

    s = sub.add_parser("fan", help="finite cylinder cover for a functional on Cantor space")
    s.add_argument("--functional", required=True, help="const:N, first-bit or random:SEED[:BOUND]")
    s.add_argument("--depth-cap", type=int, default=None)
    s.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    s.set_defaults(run=cmd_fan)

    s = sub.add_parser("lindelof", help="countable subcover of the reals, block by block")
    s.add_argument("--gauge", default="1")
    s.add_argument("--eps", default=None)
    s.add_argument("--n-max", type=int, default=2)
    s.add_argument("--depth-cap", type=int, default=None)
    s.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    s.set_defaults(run=cmd_lindelof)

    s = sub.add_parser("wellfounded", help="well-foundedness of a bounded tree through the enumeration")
    s.add_argument("--branching", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--nodes", default=None, help='sequences separated by ";", e.g. ";0;1;0,1"')
    s.add_argument("--full", action="store_true", help="every sequence within the bounds")
    s.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    s.set_defaults(run=cmd_wellfounded)

    s = sub.add_parser("compare", help="gauge vs Riemann, or two moduli")
    s.add_argument("--fn", required=True)
    s.add_argument("--modulus", default="builtin")
    s.add_argument("--modulus2", default=None)
    s.add_argument("--eps-min", default="1/1024")
    s.add_argument("--single-level", action="store_true", help="only run eps = eps-min")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-pieces", type=int, default=1 << 30)
    common(s)
    s.set_defaults(run=cmd_compare)
    return p


def _emit(doc, rows, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return
    rows = rows or [doc]
    keys = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _fail(code: str, message: str, status: int, fmt: str, out, err) -> int:
    err.write(f"gaugeint: {code}: {message}\n")
    _emit({"error": {"code": code, "message": message}}, None, fmt, out)
    return status


def _requested_format(argv: list) -> str:
    # needed before parsing succeeds, so usage errors honour --format too
    for i, x in enumerate(argv):
        if x == "--format=csv" or (x == "--format" and argv[i + 1 : i + 2] == ["csv"]):
            return "csv"
    return "json"


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = _requested_format(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc), 1, fmt, out, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    fmt = args.format
    try:
        doc, rows = args.run(args)
    except UsageError as exc:
        return _fail("usage", str(exc), 1, fmt, out, err)
    except ParseError as exc:
        return _fail(exc.code, str(exc), 1, fmt, out, err)
    except GaugeError as exc:
        return _fail(exc.code, str(exc), 2, fmt, out, err)
    except (ArithmeticError, ValueError, TypeError) as exc:
        return _fail("domain", f"{type(exc).__name__}: {exc}", 2, fmt, out, err)
    _emit(doc, rows, fmt, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
