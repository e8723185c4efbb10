"""Command line interface.

Exit codes: 0 on success, 1 on malformed input, 2 when the mathematics says
no (not reflexive, Clarke conditions violated, a failing verification case).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import fixtures
from .fan import StackyFan
from .hodge import (
    MemoryBudgetExceeded,
    NonStabilization,
    SpectrumRequest,
    UnsupportedDimension,
    koszul_oracle,
    lg_diamond,
    newton_spectrum,
)
from .lattice import LatticeError, dual_tag
from .mirrorledger import derive_hdual, verify_certificate_json
from .nefclarke import NefError, build_lg_model, dual_nef_partition, validate_clarke
from .orbifold import box_elements, clarke_family_side
from .polytope import NewtonLevel, Polytope, PolytopeError, is_reflexive, polar_dual
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2


class InputError(Exception):
    pass


class MathFailure(Exception):
    def __init__(self, message: str, doc: dict | None = None):
        super().__init__(message)
        self.doc = doc


def _load(source: str) -> dict:
    path = Path(source)
    if path.exists():
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: not valid JSON ({exc})") from exc
    try:
        return fixtures.named_document(path.name)
    except KeyError:
        raise InputError(f"{source}: no such file or bundled document") from None


def _polytope(source: str) -> Polytope:
    try:
        return Polytope.from_json(_load(source))
    except (ValueError, LatticeError) as exc:
        raise InputError(str(exc)) from exc


def _fan(source: str) -> tuple[StackyFan, str | None]:
    doc = _load(source)
    try:
        return StackyFan.from_json(doc), doc.get("lattice")
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _nef(source: str):
    try:
        return fixtures.nef_from_json(_load(source))
    except NefError as exc:
        raise MathFailure(f"not a nef partition: {exc}") from exc
    except PolytopeError as exc:
        raise MathFailure(str(exc)) from exc
    except (ValueError, LatticeError) as exc:
        raise InputError(str(exc)) from exc


def _subset(text: str | None, k: int) -> list[int]:
    """Parse a 1-based comma list such as ``1,2``; empty means the empty set."""
    if not text:
        return []
    try:
        out = sorted({int(x) - 1 for x in text.split(",") if x.strip()})
    except ValueError as exc:
        raise InputError(f"bad index list {text!r}") from exc
    if any(not 0 <= i < k for i in out):
        raise InputError(f"indices must lie in 1..{k}")
    return out


def _points(pts) -> str:
    return " ".join("(" + ",".join(str(c) for c in p) + ")" for p in pts)


# ---------------------------------------------------------------------------
# commands; each returns (document, table text)


def cmd_polar(args):
    p = _polytope(args.input)
    try:
        q = polar_dual(p)
    except PolytopeError as exc:
        raise MathFailure(str(exc)) from exc
    doc = q.to_json()
    return doc, f"polar dual ({q.lattice}): {_points(q.vertices)}"


def cmd_reflexive(args):
    p = _polytope(args.input)
    try:
        ok = is_reflexive(p)
    except PolytopeError as exc:
        raise MathFailure(str(exc), {"reflexive": False, "reason": str(exc)}) from exc
    doc = {"reflexive": ok}
    if not ok:
        raise MathFailure("false", doc)
    return doc, "true"


def cmd_lattice_points(args):
    p = _polytope(args.input)
    pts = p.lattice_points()
    doc = {
        "count": len(pts),
        "points": [list(x) for x in pts],
        "interior": len(p.interior_points()),
        "boundary": len(p.boundary_points()),
    }
    text = f"{len(pts)} lattice points ({doc['interior']} interior, {doc['boundary']} boundary)\n{_points(pts)}"
    return doc, text


def cmd_nef_dual(args):
    np = _nef(args.input)
    dual = dual_nef_partition(np)
    doc = {
        "pieces": [p.to_json() for p in dual.pieces],
        "delta_check": dual.delta_check.to_json(),
        "dual_parts": [[list(v) for v in part] for part in dual.nef.parts],
        "minkowski": dual.minkowski_checks,
    }
    lines = [f"check Delta_{i + 1}: {_points(p.vertices)}" for i, p in enumerate(dual.pieces)]
    lines.append(f"check Delta: {_points(dual.delta_check.vertices)}")
    ok = all(dual.minkowski_checks.values())
    lines.append(
        "Minkowski: polar(Delta) = sum check Delta_i; polar(check Delta) = sum Delta_i: " + ("verified" if ok else "FAILED")
    )
    return doc, "\n".join(lines)


def cmd_clarke_check(args):
    sigma, lat = _fan(args.sigma)
    check, lat_check = _fan(args.sigma_check)
    if lat and lat_check and lat_check != dual_tag(lat):
        raise InputError(f"fans live in lattices {lat} and {lat_check}, which are not dual")
    if sigma.rank != check.rank:
        raise InputError("fans have different ranks")
    pair = validate_clarke(sigma, check)
    doc = {"valid": pair.valid, "reason": pair.reason, "detail": _jsonable(pair.detail)}
    if not pair.valid:
        raise MathFailure(f"fail: {pair.reason} {_jsonable(pair.detail)}", doc)
    return doc, "pass: simplicial, quasiprojective, regular and convex"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def cmd_box(args):
    f, _ = _fan(args.input)
    try:
        elems = box_elements(f)
    except ValueError as exc:
        raise MathFailure(str(exc)) from exc
    doc = {"box_elements": [b.to_json() for b in elems]}
    lines = [f"{len(elems)} twisted box elements"]
    for b in elems:
        lines.append(f"  point {tuple(b.point)} in cone {tuple(b.cone)} age {b.age}")
    return doc, "\n".join(lines)


def cmd_orbifold_hodge(args):
    np = _nef(args.input)
    stack = _subset(args.stack, np.k)
    try:
        side = clarke_family_side(np.pieces(), stack)
    except UnsupportedDimension as exc:
        raise MathFailure(str(exc)) from exc
    doc = {
        "stack": [i + 1 for i in stack],
        "fan": side.fan.to_json(),
        "sectors": {",".join(map(str, k)) or "untwisted": [i + 1 for i in v] for k, v in sorted(side.sectors.items())},
        "diamond": side.diamond.to_json(),
    }
    return doc, f"orbifold diamond, stack set {doc['stack']}\n{side.diamond.table()}"


def cmd_lg_hodge(args):
    np = _nef(args.input)
    J = _subset(args.J, np.k)
    try:
        d = lg_diamond(build_lg_model(np, J))
    except UnsupportedDimension as exc:
        raise MathFailure(str(exc)) from exc
    doc = {"J": [j + 1 for j in J], "diamond": d.to_json()}
    return doc, f"LG diamond, J = {doc['J']}\n{d.table()}"


def cmd_spectrum(args):
    if args.power is not None:
        if args.power < 1:
            raise InputError("--power must be positive")
        p = Polytope([(0,), (args.power,)])
    elif args.input:
        p = _polytope(args.input)
    else:
        raise InputError("give a Newton polytope file or --power")
    try:
        nl = NewtonLevel(p)
        spec = newton_spectrum(SpectrumRequest(nl))
    except PolytopeError as exc:
        raise MathFailure(str(exc)) from exc
    doc = {"spectrum": spec.to_json()}
    lines = [f"total {spec.total}"] + [f"  {lam}: {c}" for lam, c in sorted(spec.levels.items())]
    if args.oracle:
        try:
            res = koszul_oracle(nl, args.truncation, seeds=(args.seed, args.seed + 1), memory_budget_mb=args.memory_budget)
        except (NonStabilization, MemoryBudgetExceeded, UnsupportedDimension) as exc:
            raise MathFailure(f"oracle: {exc}", doc) from exc
        agree = res.dimension == spec.total and res.levels == spec.levels
        doc["oracle"] = {
            "dimension": res.dimension,
            "levels": [[str(k), v] for k, v in sorted(res.levels.items())],
            "truncation": res.truncation,
            "seeds": list(res.seeds),
            "agrees": agree,
        }
        lines.append(f"oracle dimension {res.dimension}, histograms agree: {agree}")
        if not agree:
            raise MathFailure("oracle disagrees with the Newton spectrum", doc)
    return doc, "\n".join(lines)


def cmd_mirror(args):
    if args.mirror_cmd == "derive":
        try:
            der = derive_hdual(args.k)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        doc = der.to_json()
        lines = [f"k = {args.k}: {len(der.certificates)} certificates, all re-expand: {der.verified}"]
        lines.append(f"unconditional up to k = {der.unconditional_up_to()}")
        for c in der.certificates:
            hyp = c.hypotheses(der.generators)
            lines.append(f"  {c.label}: {len(c.terms)} terms" + (f", {len(hyp)} hypotheses" if hyp else ""))
        return doc, "\n".join(lines)
    doc = _load(args.input)
    certs = doc.get("certificates", [doc]) if isinstance(doc, dict) else None
    if not certs:
        raise InputError("no certificates in the document")
    try:
        results = [(c.get("label", ""), verify_certificate_json(c)) for c in certs]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certificate: {exc}") from exc
    out = {"results": [{"label": lab, "verified": ok} for lab, ok in results]}
    text = "\n".join(f"{lab}: {'ok' if ok else 'FAIL'}" for lab, ok in results)
    if not all(ok for _, ok in results):
        raise MathFailure("certificate failed to re-expand", out)
    return out, text


def cmd_verify(args):
    params: dict = {"workers": args.workers}
    if args.suite == "transition":
        params.update(limit=args.limit, clarke=args.clarke)
        if args.polygons != "all16":
            params["ids"] = [x for x in args.polygons.split(",") if x]
    elif args.suite == "hlly":
        params.update(dim=args.dim, polygons=args.polygons, segment=args.segment)
    elif args.suite == "cdual":
        params["example"] = args.example
    elif args.suite == "ledger":
        params["k"] = args.k
    try:
        report = run_suite(args.suite, **params)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = report.to_json()
    if not report.passed:
        raise MathFailure(report.table(), doc)
    return doc, report.table()


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are malformed input, so they exit with 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--emit", metavar="PATH", help="also write the JSON document to PATH")
    common.add_argument("--format", choices=("json", "table"), default="table")

    parser = _Parser(prog="clarke-mirror", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (
        ("polar", cmd_polar, "polar dual of a polytope"),
        ("reflexive", cmd_reflexive, "is the polytope reflexive"),
        ("lattice-points", cmd_lattice_points, "enumerate lattice points"),
        ("nef-dual", cmd_nef_dual, "dual nef partition with Minkowski checks"),
        ("box", cmd_box, "box elements and ages of a stacky fan"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("input")
        p.set_defaults(func=fn)

    p = sub.add_parser("clarke-check", parents=[common], help="check the Clarke conditions on two fans")
    p.add_argument("sigma")
    p.add_argument("sigma_check")
    p.set_defaults(func=cmd_clarke_check)

    p = sub.add_parser("orbifold-hodge", parents=[common], help="orbifold diamond of a Clarke family fan")
    p.add_argument("input")
    p.add_argument("--stack", default="", help="1-based parts carrying multiplier 2, e.g. 1,2")
    p.set_defaults(func=cmd_orbifold_hodge)

    p = sub.add_parser("lg-hodge", parents=[common], help="irregular Hodge diamond of an LG model")
    p.add_argument("input")
    p.add_argument("--J", default="", help="1-based parts with the quadratic potential")
    p.set_defaults(func=cmd_lg_hodge)

    p = sub.add_parser("spectrum", parents=[common], help="Newton spectrum of a Laurent or convenient polynomial")
    p.add_argument("input", nargs="?")
    p.add_argument("--power", type=int, help="use t^k on the affine line")
    p.add_argument("--oracle", action="store_true", help="cross-check with the Jacobian-ring oracle")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--truncation", type=int)
    p.add_argument("--memory-budget", type=float, default=256.0, metavar="MB")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("mirror", help="symbolic ledger certificates")
    msub = p.add_subparsers(dest="mirror_cmd", required=True)
    d = msub.add_parser("derive", parents=[common], help="derive hdual certificates up to k")
    d.add_argument("--k", type=int, required=True)
    d.set_defaults(func=cmd_mirror)
    c = msub.add_parser("check", parents=[common], help="re-expand certificates from a JSON file")
    c.add_argument("input")
    c.set_defaults(func=cmd_mirror)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--polygons", default="all16")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--example", default="p1")
    p.add_argument("--limit", type=int)
    p.add_argument("--clarke", action="store_true", help="also build and check the Clarke pair of fans")
    p.add_argument("--segment", action="store_true", help="hlly: add the segment nef partitions")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(doc: dict, args, text: str, stream) -> None:
    rendered = json.dumps(doc, indent=2, sort_keys=True)
    if getattr(args, "emit", None):
        Path(args.emit).write_text(rendered + "\n")
    print(rendered if args.format == "json" else text, file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, text = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MathFailure as exc:
        if exc.doc is not None:
            _emit(exc.doc, args, str(exc), sys.stdout)
        else:
            print(str(exc), file=sys.stdout)
        return EXIT_MATH
    _emit(doc, args, text, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
