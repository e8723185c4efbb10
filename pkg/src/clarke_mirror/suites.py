"""Named verification suites run by ``clarke-mirror verify``.

Each suite returns a :class:`SuiteReport` whose cases are ordered by case
id, whatever order the worker threads finish in.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

from . import fixtures
from .fan import Fan, triangulated_spanning_fan
from .hodge import (
    HodgeDiamond,
    NodalCurveInSurface,
    curve_diamond,
    ev_coinvariant_curve,
    galois_cover_diamond,
    kunneth,
    local_cohomology_diamond,
    poincare_lefschetz,
    riemann_hurwitz_genus,
    surface_log_euler_characteristics,
    toric_diamond,
)
from .lattice import primitive, solve
from .mirrorledger import (
    derive_hdual,
    numeric_mirror_check,
    toric_sum,
    verify_binomial_identities,
)
from .nefclarke import (
    NefPartition,
    cover_spec_from_pieces,
    dual_nef_partition,
    extremal_transition_pair,
    validate_clarke,
)
from .orbifold import box_elements, clarke_family_side, verify_cdual, verify_clarke_family
from .polytope import (
    Polytope,
    cayley_polytope,
    convex_hull,
    cyclic_vertices,
    is_reflexive,
    polar_dual,
    polygon_normal_form,
)

SUITES = ("transition", "toricmirror", "hlly", "cdual", "ledger")


@dataclass
class CaseResult:
    case_id: str
    passed: bool
    summary: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.case_id, "passed": self.passed, "summary": self.summary, "data": self.data}


@dataclass
class SuiteReport:
    suite: str
    params: dict
    cases: list

    @property
    def passed(self) -> bool:
        return bool(self.cases) and all(c.passed for c in self.cases)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "passed": self.passed,
            "counts": {"cases": len(self.cases), "passed": sum(c.passed for c in self.cases)},
            "cases": [c.to_json() for c in self.cases],
        }

    def table(self) -> str:
        width = max([len(c.case_id) for c in self.cases] + [4])
        lines = [f"suite {self.suite}"]
        for c in self.cases:
            lines.append(f"  {c.case_id:<{width}}  {'pass' if c.passed else 'FAIL'}  {c.summary}")
        n = sum(c.passed for c in self.cases)
        lines.append(f"{n}/{len(self.cases)} cases pass: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _run(items: Sequence, fn: Callable, workers: int) -> list[CaseResult]:
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, items))
    else:
        results = [fn(x) for x in items]
    return sorted(results, key=lambda r: r.case_id)


# ---------------------------------------------------------------------------
# toric extremal transitions of polygons


def polygon_edges(p: Polytope) -> list[tuple]:
    v = cyclic_vertices(p)
    return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


def _inner_normal(a: tuple, b: tuple) -> tuple:
    d = (b[0] - a[0], b[1] - a[1])
    nu = primitive((-d[1], d[0]))
    if nu[0] * a[0] + nu[1] * a[1] > 0:
        nu = (-nu[0], -nu[1])
    return nu


@dataclass
class CurveClosure:
    """Closure in a smooth toric surface of a generic curve with given Newton polygon.

    Each edge ``e`` contributes ``len(e)`` branches at infinity.  When the
    inner normal of ``e`` is a ray they meet that divisor in distinct
    points; otherwise they all pass through the fixed point of the cone
    containing the normal, where they are glued.
    """

    genus: int
    ray_points: int
    fixed_point_branches: dict
    normalized_volume: int

    @property
    def weight_zero(self) -> int:
        return sum(b - 1 for b in self.fixed_point_branches.values())

    @property
    def points_at_infinity(self) -> int:
        return self.ray_points + len(self.fixed_point_branches)

    def diamond(self) -> HodgeDiamond:
        return curve_diamond(self.genus, self.weight_zero)

    def euler_characteristic(self) -> int:
        """``chi`` of the torus part (minus the normalized area) plus the added points."""
        return -self.normalized_volume + self.points_at_infinity

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "ray_points": self.ray_points,
            "fixed_point_branches": {",".join(map(str, c)): b for c, b in sorted(self.fixed_point_branches.items())},
            "weight_zero": self.weight_zero,
            "normalized_volume": self.normalized_volume,
        }


def hypersurface_closure(newton: Polytope, ambient: Fan) -> CurveClosure:
    rays = [tuple(r) for r in ambient.rays]
    ray_points = 0
    branches: dict = {}
    for a, b in polygon_edges(newton):
        length = gcd(b[0] - a[0], b[1] - a[1])
        nu = _inner_normal(a, b)
        if nu in rays:
            ray_points += length
            continue
        for cone in ambient.cones:
            cols = [[Fraction(rays[i][t]) for i in cone] for t in range(2)]
            lam = solve(cols, list(nu))
            if lam is not None and all(x > 0 for x in lam):
                branches[tuple(cone)] = branches.get(tuple(cone), 0) + length
                break
        else:
            raise ValueError(f"edge normal {nu} is not in the ambient fan")
    return CurveClosure(len(newton.interior_points()), ray_points, branches, int(newton.normalized_volume()))


@dataclass(frozen=True)
class TransitionCase:
    case_id: str
    delta_II: Polytope
    delta_I_check: Polytope


def transition_pairs(ids: Iterable[str] | None = None, limit: int | None = None) -> list[TransitionCase]:
    """Reflexive ``Delta_II`` inside each fixture polygon taken as ``check Delta_I``.

    Candidates are hulls of subsets of the nonzero lattice points; each
    distinct sub-polygon is kept once per ambient polygon.
    """
    classes = {polygon_normal_form(fixtures.polygon(r["id"])): r["id"] for r in fixtures.polygon_records()}
    wanted = fixtures.polygon_ids() if ids is None else list(ids)
    out = []
    for bid in wanted:
        big = fixtures.polygon(bid)
        pts = [p for p in big.lattice_points() if any(p)]
        seen = set()
        found = []
        for r in range(3, len(pts) + 1):
            for sub in itertools.combinations(pts, r):
                hull = convex_hull(sub)
                if hull.vertices in seen:
                    continue
                seen.add(hull.vertices)
                if not hull.is_full_dimensional or not hull.origin_is_interior() or not is_reflexive(hull):
                    continue
                found.append(hull)
        found.sort(key=lambda h: (len(h.lattice_points()), h.vertices))
        for n, small in enumerate(found):
            cid = f"{bid}:{n:02d}:{classes[polygon_normal_form(small)]}"
            out.append(TransitionCase(cid, small, big))
    return out[:limit] if limit is not None else out


def check_transition(case: TransitionCase, clarke: bool = False) -> CaseResult:
    delta_II = case.delta_II
    delta_I = polar_dual(case.delta_I_check)
    fan_I = triangulated_spanning_fan(delta_I)
    fan_II = triangulated_spanning_fan(delta_II)
    x_II = hypersurface_closure(delta_II, fan_I)
    x_I = hypersurface_closure(delta_I, fan_II)
    left, right = x_II.diamond(), x_I.diamond()
    report = verify_cdual(left, right, 1)
    # Euler characteristic from area and boundary points must match the diamond
    euler = all(
        c.euler_characteristic() == sum((-1) ** n * v for n, t in d.by_degree.items() for v in t.values())
        for c, d in ((x_II, left), (x_I, right))
    )
    # Poincare-Lefschetz: local cohomology of the curve in the surface, reindexed
    lefschetz = all(
        poincare_lefschetz(
            local_cohomology_diamond(toric_diamond(f), NodalCurveInSurface((c.genus,), c.weight_zero), 2), 2
        )
        == c.diamond()
        for c, f in ((x_II, fan_I), (x_I, fan_II))
    )
    data = {
        "delta_II": [list(v) for v in delta_II.vertices],
        "check_delta_I": [list(v) for v in case.delta_I_check.vertices],
        "X_II": x_II.to_json(),
        "X_I": x_I.to_json(),
        "left": left.to_json(),
        "right": right.to_json(),
        "duality": report.passed,
        "euler_route": euler,
        "lefschetz_route": lefschetz,
    }
    ok = report.passed and euler and lefschetz
    if clarke:
        pair = extremal_transition_pair(delta_II, case.delta_I_check)
        data["clarke_pair"] = pair.clarke.valid
        data["gorenstein"] = pair.gorenstein
        ok = ok and pair.clarke.valid and pair.gorenstein
    summary = f"w0(II)={x_II.weight_zero} w0(I)={x_I.weight_zero} h^(p,q)=h^(1-p,q): {report.passed}"
    return CaseResult(case.case_id, ok, summary, data)


def run_transition(ids=None, limit: int | None = None, clarke: bool = False, workers: int = 1) -> SuiteReport:
    cases = transition_pairs(ids, limit)
    results = _run(cases, lambda c: check_transition(c, clarke), workers)
    return SuiteReport("transition", {"polygons": list(ids) if ids else "all16", "limit": limit, "clarke": clarke}, results)


# ---------------------------------------------------------------------------
# double covers over P^1 (HLLY at d = 1)


def rank_one_slices(p: Polytope) -> list[tuple[str, tuple]]:
    """Lines through opposite boundary points of ``p`` or of its polar.

    The intersection with such a line is a copy of the segment ``[-1, 1]``.
    """
    out = []
    for side, poly in (("delta", p), ("dual", polar_dual(p))):
        bnd = set(poly.boundary_points())
        for v in sorted(bnd):
            neg = tuple(-x for x in v)
            if neg in bnd and v > neg:
                out.append((side, v))
    return out


def _branch_total(pieces) -> int:
    return sum(cover_spec_from_pieces(pieces).branch_degrees())


def hlly_curve_diamonds(np: NefPartition) -> tuple[HodgeDiamond, HodgeDiamond]:
    """Double covers of ``P^1`` branched over ``D = sum D_i`` for a nef partition and its dual."""
    dual = dual_nef_partition(np)
    left = ev_coinvariant_curve(0) + ev_coinvariant_curve(_branch_total(np.pieces()))
    right = ev_coinvariant_curve(0) + ev_coinvariant_curve(_branch_total(dual.pieces))
    return left, right


def transition_route_segment() -> dict:
    """The double cover as the anticanonical curve ``X'_{Delta_II}`` of a rank-two transition."""
    seg = fixtures.segment()
    check = polar_dual(seg)
    delta_II = cayley_polytope([check], [1])
    delta_I_check = cayley_polytope([check], [2])
    delta_I = polar_dual(delta_I_check)
    curve = hypersurface_closure(delta_II, triangulated_spanning_fan(delta_I))
    mirror = hypersurface_closure(delta_I, triangulated_spanning_fan(delta_II))
    return {
        "reflexive": is_reflexive(delta_II) and is_reflexive(delta_I_check),
        "inclusion": all(delta_I_check.contains(v) for v in delta_II.vertices),
        "curve": curve.diamond(),
        "mirror": mirror.diamond(),
    }


def check_hlly_segment(k: int) -> CaseResult:
    np = fixtures.segment_nef(k)
    left, right = hlly_curve_diamonds(np)
    rep = verify_cdual(left, right, 1)
    data = {"k": k, "left": left.to_json(), "right": right.to_json(), "duality": rep.passed}
    ok = rep.passed
    if k == 1:
        tr = transition_route_segment()
        agree = tr["curve"] == left and tr["mirror"] == right
        data.update({"transition_reflexive": tr["reflexive"], "transition_inclusion": tr["inclusion"], "transition_agrees": agree})
        ok = ok and tr["reflexive"] and tr["inclusion"] and agree
    return CaseResult(f"segment-k{k}", ok, f"genus {left.get(Fraction(1), 0, 1)} cover, dual pass: {rep.passed}", data)


def check_hlly_polygon(pid: str) -> CaseResult:
    p = fixtures.polygon(pid)
    slices = rank_one_slices(p)
    checks = []
    for side, v in slices:
        for k in (1, 2):
            left, right = hlly_curve_diamonds(fixtures.segment_nef(k))
            checks.append({"side": side, "direction": list(v), "k": k, "passed": verify_cdual(left, right, 1).passed})
    ok = bool(checks) and all(c["passed"] for c in checks)
    return CaseResult(pid, ok, f"{len(slices)} slices, {sum(c['passed'] for c in checks)}/{len(checks)} elliptic checks", {"slices": checks})


def run_hlly(dim: int = 1, polygons: str = "all16", segment: bool = False, workers: int = 1) -> SuiteReport:
    """One case per polygon; ``segment`` adds the two nef partitions of the segment."""
    if dim != 1:
        raise ValueError("the HLLY suite runs at d = 1 only")
    ids = fixtures.polygon_ids() if polygons == "all16" else [x for x in polygons.split(",") if x]
    results = _run(ids, check_hlly_polygon, workers)
    if segment:
        results += [check_hlly_segment(1), check_hlly_segment(2)]
    return SuiteReport("hlly", {"dim": dim, "polygons": polygons, "segment": segment}, results)


# ---------------------------------------------------------------------------
# (Z/2)^k covers of toric bases


def _axis_factors(np: NefPartition) -> list[int] | None:
    """Branch degrees of the factors when every part sits on its own coordinate axis."""
    r = np.delta.rank
    axes = []
    for part in np.parts:
        support = {i for v in part for i, x in enumerate(v) if x}
        if len(support) != 1:
            return None
        axes.append(support.pop())
    if sorted(axes) != list(range(r)):
        return None
    return [2 * len(part) for _, part in sorted(zip(axes, np.parts))]


def _chi_by_p(d: HodgeDiamond) -> dict[int, int]:
    out: dict[int, int] = {}
    for (a, b), v in d.entries.items():
        p, q = a // 2, b // 2
        out[p] = out.get(p, 0) + (-1) ** q * v
    return out


def toric_cover_diamond(np: NefPartition, dual: bool = False) -> HodgeDiamond:
    pieces = dual_nef_partition(np).pieces if dual else np.pieces()
    spec = cover_spec_from_pieces(pieces)
    if spec.base_dim == 1:
        return galois_cover_diamond(spec.branch_degrees(), range(spec.k))
    target = dual_nef_partition(np).nef if dual else np
    factors = _axis_factors(target)
    if factors is None:
        raise ValueError("surface covers are only assembled for products of curves")
    out = HodgeDiamond.point()
    for b in factors:
        out = kunneth(out, galois_cover_diamond([b], [0]))
    return out


def surface_cover_chi(np: NefPartition, dual: bool = False) -> dict[int, int]:
    """``chi(Omega^p)`` of the cover summed over characters, from log forms on the base."""
    pieces = dual_nef_partition(np).pieces if dual else np.pieces()
    spec = cover_spec_from_pieces(pieces)
    total: dict[int, int] = {}
    for r in range(spec.k + 1):
        for K in itertools.combinations(range(spec.k), r):
            parts = [spec.divisors[i] for i in K]
            div: dict = {}
            for part in parts:
                for ray, c in part.items():
                    div[ray] = div.get(ray, 0) + c
            for p, v in surface_log_euler_characteristics(spec.base, div, parts).items():
                total[p] = total.get(p, 0) + v
    return total


def check_toricmirror(name: str, np: NefPartition) -> CaseResult:
    d = np.delta.rank
    left = toric_cover_diamond(np)
    right = toric_cover_diamond(np, dual=True)
    rep = verify_cdual(left, right, d)
    data = {"d": d, "k": np.k, "left": left.to_json(), "right": right.to_json(), "duality": rep.passed}
    ok = rep.passed
    if d == 1:
        spec = cover_spec_from_pieces(np.pieces())
        g = riemann_hurwitz_genus(spec.branch_degrees(), range(np.k))
        data["riemann_hurwitz"] = left.total() == 2 + 2 * g
        ok = ok and data["riemann_hurwitz"]
    else:
        chi = surface_cover_chi(np)
        chi_dual = surface_cover_chi(np, dual=True)
        data["chi_route"] = chi == _chi_by_p(left) and chi_dual == _chi_by_p(right)
        ok = ok and data["chi_route"]
    blocks = tuple((i,) for i in range(1, np.k + 1))
    ledger = numeric_mirror_check(toric_sum(blocks), np, d)
    data["ledger_route"] = ledger.passed
    dual = dual_nef_partition(np)
    big = cayley_polytope(list(dual.pieces), [2] * np.k)
    small = cayley_polytope(list(dual.pieces), [1] * np.k)
    data["transition_polytopes"] = is_reflexive(big) and is_reflexive(small) and all(big.contains(v) for v in small.vertices)
    ok = ok and ledger.passed and data["transition_polytopes"]
    return CaseResult(name, ok, f"d={d} k={np.k} total {left.total()} dual pass: {rep.passed}", data)


def run_toricmirror(workers: int = 1) -> SuiteReport:
    cases = [("segment-k1", fixtures.segment_nef(1)), ("segment-k2", fixtures.segment_nef(2)), ("square-axis", fixtures.square_axis_nef())]
    return SuiteReport("toricmirror", {}, _run(cases, lambda c: check_toricmirror(*c), workers))


# ---------------------------------------------------------------------------
# Clarke duality of orbifold diamonds


def check_cdual_p1() -> CaseResult:
    fans = fixtures.p1_fans()
    pair = validate_clarke(fans["sigma_L_stacky"], fans["sigma_check"])
    plain = validate_clarke(fans["sigma_L_plain"], fans["sigma_check"])
    boxes = box_elements(fans["sigma_L_stacky"])
    np = fixtures.segment_nef(1)
    left = clarke_family_side(np.pieces(), {0})
    right = clarke_family_side(dual_nef_partition(np).pieces, set())
    rep = verify_cdual(left.diamond, right.diamond, 2)
    ages = [str(b.age) for b in boxes]
    ok = pair.valid and plain.reason == "convexity" and ages == ["1/2"] and rep.passed
    data = {
        "clarke_pair": pair.valid,
        "unstacked_failure": plain.reason,
        "box_elements": [b.to_json() for b in boxes],
        "report": rep.to_json(),
        "table": rep.table(),
    }
    return CaseResult("p1", ok, f"box ages {ages}, d = 2: {'PASS' if rep.passed else 'FAIL'}", data)


def check_cdual_family(k: int, J: tuple) -> CaseResult:
    np = fixtures.segment_nef(k)
    rep = verify_clarke_family(np, J)
    name = f"segment-k{k}-J{''.join(str(j + 1) for j in J) or '0'}"
    return CaseResult(name, rep.passed, f"d = {rep.d}: {'PASS' if rep.passed else 'FAIL'}", rep.to_json())


def run_cdual(example: str = "p1", workers: int = 1) -> SuiteReport:
    if example == "p1":
        return SuiteReport("cdual", {"example": example}, [check_cdual_p1()])
    if example != "segments":
        raise ValueError(f"unknown cdual example {example!r}")
    items = [(k, J) for k in (1, 2) for r in range(k + 1) for J in itertools.combinations(range(k), r)]
    results = _run(items, lambda x: check_cdual_family(*x), workers)
    return SuiteReport("cdual", {"example": example}, [check_cdual_p1()] + results)


# ---------------------------------------------------------------------------
# the symbolic ledger


def run_ledger(k: int = 6, workers: int = 1) -> SuiteReport:
    if k < 2:
        raise ValueError("k must be at least 2")
    results = []
    for n in range(2, k + 1):
        rep = verify_binomial_identities(n)
        results.append(CaseResult(f"binomial-{n:02d}", rep.passed, f"{rep.case} identity, T-lemma {rep.t_lemma}", rep.to_json()))
    der = derive_hdual(k)
    top = der.unconditional_up_to()
    doc = der.to_json()
    for cert in der.certificates:
        ok = cert.verify(der.generators)
        hyps = cert.hypotheses(der.generators)
        status = "conditional on " + ", ".join(hyps) if hyps else "unconditional"
        results.append(CaseResult(f"hdual-{cert.label}", ok, status, {"certificate": cert.to_json(der.generators)}))
    results.sort(key=lambda r: r.case_id)
    params = {"k": k, "unconditional_up_to": top, "hypotheses": doc["hypotheses"]}
    return SuiteReport("ledger", params, results)


def run_suite(name: str, **params) -> SuiteReport:
    runners = {
        "transition": run_transition,
        "toricmirror": run_toricmirror,
        "hlly": run_hlly,
        "cdual": run_cdual,
        "ledger": run_ledger,
    }
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}")
    return runners[name](**params)


__all__ = [
    "CaseResult",
    "CurveClosure",
    "SUITES",
    "SuiteReport",
    "TransitionCase",
    "check_cdual_p1",
    "check_hlly_polygon",
    "check_hlly_segment",
    "check_toricmirror",
    "check_transition",
    "hlly_curve_diamonds",
    "hypersurface_closure",
    "polygon_edges",
    "rank_one_slices",
    "run_cdual",
    "run_hlly",
    "run_ledger",
    "run_suite",
    "run_toricmirror",
    "run_transition",
    "surface_cover_chi",
    "toric_cover_diamond",
    "transition_pairs",
    "transition_route_segment",
]
