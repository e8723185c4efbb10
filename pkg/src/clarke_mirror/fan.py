"""Fans, stacky fans and regular triangulations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .lattice import (
    Inequality,
    _normalize,
    determinant,
    dot,
    integer_solution,
    lp_feasible,
    primitive,
    rank,
    solve,
)
from .polytope import Polytope, PolytopeError, _as_point


class FanError(ValueError):
    pass


def _minors_gcd(vectors: Sequence[Sequence[int]]) -> int:
    k = len(vectors)
    d = len(vectors[0])
    g = 0
    for cols in itertools.combinations(range(d), k):
        g = gcd(g, int(determinant([[v[c] for c in cols] for v in vectors])))
    return g


class Fan:
    """A rational polyhedral fan given by rays and maximal cones.

    ``cones`` holds the maximal cones as sorted tuples of ray indices; every
    face is generated on demand by :meth:`all_cones`.
    """

    def __init__(self, rays: Iterable[Sequence[int]], cones: Iterable[Iterable[int]], rank: int | None = None):
        self.rays = tuple(tuple(int(x) for x in r) for r in rays)
        if rank is None:
            if not self.rays:
                raise FanError("rank is required for a fan without rays")
            rank = len(self.rays[0])
        self.rank = rank
        for r in self.rays:
            if len(r) != rank:
                raise FanError("ray of the wrong rank")
            if primitive(r) != r:
                raise FanError(f"ray {r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("duplicate rays")
        self.cones = tuple(sorted({tuple(sorted(set(c))) for c in cones}))
        for c in self.cones:
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise FanError("cone refers to a missing ray")

    def __repr__(self) -> str:
        return f"<Fan rank={self.rank} rays={len(self.rays)} cones={len(self.cones)}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, Fan) and self.rank == other.rank and self._canon() == other._canon()

    def __hash__(self) -> int:
        return hash(self._canon())

    def _canon(self):
        return frozenset(frozenset(self.rays[i] for i in c) for c in self.cones)

    def cone_rays(self, cone: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in cone]

    def cone_faces(self, cone: Sequence[int]) -> set[tuple[int, ...]]:
        """All faces of a cone (including the cone and the zero cone)."""
        vecs = self.cone_rays(cone)
        if rank(vecs) == len(vecs):
            return {tuple(s) for n in range(len(cone) + 1) for s in itertools.combinations(cone, n)}
        # non-simplicial: faces are intersections of facets
        hull = Polytope([(0,) * self.rank] + vecs)
        facet_sets = []
        for f in hull.facets:
            if f.offset == 0:
                facet_sets.append(frozenset(i for i in cone if dot(self.rays[i], f.normal) == 0))
        faces = {frozenset(cone)}
        frontier = set(facet_sets)
        while frontier:
            faces |= frontier
            frontier = {a & b for a in frontier for b in facet_sets} - faces
        return {tuple(sorted(f)) for f in faces}

    def all_cones(self) -> list[tuple[int, ...]]:
        out: set[tuple[int, ...]] = set()
        for c in self.cones:
            out |= self.cone_faces(c)
        return sorted(out, key=lambda c: (len(c), c))

    def is_simplicial(self) -> bool:
        return all(rank(self.cone_rays(c)) == len(c) for c in self.cones)

    def is_full_dimensional(self) -> bool:
        return all(len(c) == self.rank for c in self.cones) and self.is_simplicial()

    def walls(self) -> dict[tuple[int, ...], list[tuple[int, ...]]]:
        """Codimension-one faces of maximal simplicial cones, with their cofaces."""
        out: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for c in self.cones:
            for w in itertools.combinations(c, len(c) - 1):
                out.setdefault(w, []).append(c)
        return out

    def is_complete(self) -> bool:
        """Complete iff full-dimensional simplicial and every wall has two cofaces."""
        if not self.cones or not self.is_full_dimensional():
            return False
        return all(len(v) == 2 for v in self.walls().values())

    def is_unimodular(self, beta: Sequence[int] | None = None) -> bool:
        for c in self.cones:
            vecs = self.cone_rays(c)
            if beta is not None:
                vecs = [tuple(beta[i] * x for x in self.rays[i]) for i in c]
            if len(vecs) == self.rank:
                if abs(determinant(vecs)) != 1:
                    return False
            elif rank(vecs) != len(vecs) or _minors_gcd(vecs) != 1:
                return False
        return True

    def f_vector(self) -> list[int]:
        """Number of cones of each dimension 0..rank."""
        counts = [0] * (self.rank + 1)
        for c in self.all_cones():
            counts[len(c)] += 1
        return counts

    def star(self, cone: Sequence[int]) -> "Fan":
        """The quotient fan of the closed orbit attached to ``cone``.

        Rays are the images of neighbouring rays in ``N / span(cone)``,
        expressed in coordinates of a complement found from the Smith form.
        """
        cone = tuple(sorted(cone))
        if not cone:
            return self
        proj = _quotient_map([self.rays[i] for i in cone], self.rank)
        new_rays: list[tuple[int, ...]] = []
        new_cones = []
        for c in self.cones:
            if not set(cone) <= set(c):
                continue
            idx = []
            for i in c:
                if i in cone:
                    continue
                img = primitive(tuple(dot(row, self.rays[i]) for row in proj))
                if img not in new_rays:
                    new_rays.append(img)
                idx.append(new_rays.index(img))
            new_cones.append(idx)
        order = sorted(range(len(new_rays)), key=lambda i: new_rays[i])
        pos = {old: new for new, old in enumerate(order)}
        return Fan(
            [new_rays[i] for i in order],
            [[pos[i] for i in c] for c in new_cones],
            rank=self.rank - len(cone),
        )

    def to_json(self, beta: Sequence[int] | None = None) -> dict:
        return {
            "rank": self.rank,
            "rays": [list(r) for r in self.rays],
            "beta": list(beta) if beta is not None else [1] * len(self.rays),
            "cones": [list(c) for c in self.cones],
        }


def _quotient_map(vectors: Sequence[Sequence[int]], d: int) -> list[list[int]]:
    """Integer rows giving an isomorphism ``N / saturation(span) -> Z^(d-k)``."""
    from .lattice import smith_normal_form

    # U A V = D with A the (d x k) matrix of column vectors; rows k.. of U
    # vanish on the span and generate the dual of the saturated quotient.
    a = [[v[i] for v in vectors] for i in range(d)]
    u, _, _ = smith_normal_form(a)
    k = rank(vectors)
    return [u[i] for i in range(k, d)]


class StackyFan:
    """A simplicial fan with a positive multiplier on each ray."""

    def __init__(self, fan: Fan, beta: Sequence[int] | None = None):
        if not fan.is_simplicial():
            raise FanError("stacky fans must be simplicial")
        self.fan = fan
        self.beta = tuple(int(b) for b in beta) if beta is not None else (1,) * len(fan.rays)
        if len(self.beta) != len(fan.rays) or any(b < 1 for b in self.beta):
            raise FanError("beta needs one positive integer per ray")

    @property
    def rank(self) -> int:
        return self.fan.rank

    @property
    def rays(self):
        return self.fan.rays

    @property
    def cones(self):
        return self.fan.cones

    def extended_ray(self, i: int) -> tuple[int, ...]:
        return tuple(self.beta[i] * x for x in self.fan.rays[i])

    def extended_rays(self) -> list[tuple[int, ...]]:
        return [self.extended_ray(i) for i in range(len(self.fan.rays))]

    def __repr__(self) -> str:
        return f"<StackyFan rank={self.rank} rays={list(self.rays)} beta={list(self.beta)}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StackyFan):
            return False
        mine = {r: b for r, b in zip(self.rays, self.beta)}
        theirs = {r: b for r, b in zip(other.rays, other.beta)}
        return self.fan == other.fan and mine == theirs

    def __hash__(self) -> int:
        return hash(self.fan)

    def to_json(self) -> dict:
        return self.fan.to_json(self.beta)

    @classmethod
    def from_json(cls, doc: dict) -> "StackyFan":
        try:
            rays = [tuple(int(x) for x in r) for r in doc["rays"]]
            cones = [list(c) for c in doc["cones"]]
            beta = doc.get("beta")
            fan = Fan(rays, cones, rank=int(doc["rank"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed fan document: {exc}") from exc
        return cls(fan, beta)


# ---------------------------------------------------------------------------
# triangulations


@dataclass
class Triangulation:
    """A regular triangulation with the heights that induce it."""

    points: tuple
    simplices: tuple
    heights: tuple
    unimodular: bool

    def simplex_points(self, s: Sequence[int]) -> list[tuple]:
        return [self.points[i] for i in s]

    def verify(self) -> bool:
        """Recompute the lower hull from the heights and compare."""
        again = lower_hull_cells(self.points, self.heights)
        return again == self.simplices


def lower_hull_cells(points: Sequence[tuple], heights: Sequence) -> tuple:
    """Cells of the regular subdivision induced by ``heights``.

    Each cell is returned as the sorted tuple of indices of the points lying
    on that lower facet of the lifted configuration.
    """
    lifted = [tuple(p) + (h,) for p, h in zip(points, heights)]
    hull = Polytope(lifted)
    if not hull.is_full_dimensional:
        if Polytope(points).is_full_dimensional:
            # affine heights induce the trivial subdivision
            return (tuple(range(len(points))),)
        raise PolytopeError("triangulation needs a full-dimensional configuration")
    cells = []
    for f in hull.facets:
        if f.normal[-1] > 0:
            cells.append(tuple(i for i, q in enumerate(lifted) if f.value(q) == 0))
    return tuple(sorted(cells))


def regular_triangulation(
    p: Polytope,
    candidate_points: Iterable | None = None,
    pull: Sequence | None = None,
) -> Triangulation:
    """Placing triangulation with lexicographic insertion order.

    Points are lifted to heights ``B**i`` in lexicographic order, which
    places each point after all smaller ones.  A point listed in ``pull`` is
    instead lifted far below everything, so that every cell contains it (a
    star triangulation).  ``B`` is increased until every cell is a simplex.
    """
    pts = sorted({_as_point(x) for x in (candidate_points if candidate_points is not None else p.vertices)})
    for v in p.vertices:
        if v not in pts:
            raise PolytopeError("candidate points must include every vertex")
    if any(not p.contains(x) for x in pts):
        raise PolytopeError("candidate point outside the polytope")
    pulled = {_as_point(x) for x in (pull or ())}
    d = p.rank
    base = 2
    while True:
        n = len(pts)
        heights = []
        for i, x in enumerate(pts):
            heights.append(-(base ** (n + 1)) if x in pulled else base**i)
        cells = lower_hull_cells(pts, heights)
        if all(len(c) == d + 1 for c in cells):
            break
        base *= 2
        if base > 2**16:
            raise PolytopeError("could not find generic placing heights")
    unimodular = all(
        abs(determinant([[a - b for a, b in zip(pts[i], pts[c[0]])] for i in c[1:]])) == 1 for c in cells
    )
    return Triangulation(tuple(pts), cells, tuple(heights), unimodular)


# ---------------------------------------------------------------------------
# fan constructors


def spanning_fan(p: Polytope) -> Fan:
    """Cones over the proper faces of ``p``; rays at its vertices."""
    if not p.origin_is_interior():
        raise PolytopeError("origin is not an interior point")
    rays = sorted({primitive(v) for v in p.vertices})
    cones = []
    for f in p.facets:
        cones.append([rays.index(primitive(v)) for v in p.facet_vertices(f)])
    return Fan(rays, cones)


def triangulated_spanning_fan(p: Polytope, points: Iterable | None = None) -> Fan:
    """Simplicial refinement of the spanning fan using all boundary points.

    The cones are the cones over the boundary cells of a star triangulation
    of ``p`` centred at the origin.
    """
    if not p.origin_is_interior():
        raise PolytopeError("origin is not an interior point")
    origin = (0,) * p.rank
    cand = [x for x in (points if points is not None else p.boundary_points())]
    cand = sorted({_as_point(x) for x in cand} | {origin})
    tri = regular_triangulation(p, cand, pull=[origin])
    rays = []
    cones = []
    for cell in tri.simplices:
        verts = [tri.points[i] for i in cell if tri.points[i] != origin]
        idx = []
        for v in verts:
            r = primitive(v)
            if r not in rays:
                rays.append(r)
            idx.append(r)
        cones.append(idx)
    rays.sort()
    return Fan(rays, [[rays.index(r) for r in c] for c in cones])


def cayley_fan(base: Fan, bundle_coeffs: Sequence[Sequence[int]]) -> StackyFan:
    """Fan of the total space of ``L_1 + ... + L_k`` over ``T(base)``.

    ``bundle_coeffs[j][i]`` is the lift ``a_i`` of ray ``i`` for summand
    ``j``, so ``L_j = O(-sum_i a_i E_i)``.  Each base cone ``c`` gives the
    cone spanned by ``(rho_i, a_i)`` for ``rho_i`` in ``c`` and the fibre
    rays ``(0, e_j)``.
    """
    k = len(bundle_coeffs)
    if any(len(a) != len(base.rays) for a in bundle_coeffs):
        raise FanError("one coefficient per base ray is required")
    vectors = [tuple(r) + tuple(bundle_coeffs[j][i] for j in range(k)) for i, r in enumerate(base.rays)]
    for j in range(k):
        vectors.append((0,) * base.rank + tuple(int(j == t) for t in range(k)))
    return _stacky_from_vectors(vectors, [list(c) + [len(base.rays) + j for j in range(k)] for c in base.cones])


def _stacky_from_vectors(vectors: Sequence[tuple], cones: Sequence[Sequence[int]]) -> StackyFan:
    """Build a stacky fan whose extended rays are the given (possibly non-primitive) vectors."""
    rays = []
    beta = []
    index = []
    for v in vectors:
        r = primitive(v)
        b = next(x // y for x, y in zip(v, r) if y)
        if r in rays:
            j = rays.index(r)
            if beta[j] != b:
                raise FanError(f"ray {r} given with two multipliers")
        else:
            rays.append(r)
            beta.append(b)
        index.append(rays.index(r))
    order = sorted(range(len(rays)), key=lambda i: rays[i])
    pos = {old: new for new, old in enumerate(order)}
    fan = Fan([rays[i] for i in order], [[pos[index[i]] for i in c] for c in cones])
    return StackyFan(fan, [beta[i] for i in order])


def sigma_family(
    parts: Sequence[Iterable],
    J: Iterable[int],
    base: Fan | None = None,
) -> StackyFan:
    """The stacky fan with extended rays ``rho x a_i e_i`` for ``rho`` in ``A_i``.

    ``a_i = 2`` for ``i`` in ``J`` and 1 otherwise; indices in ``J`` are
    0-based.  Zero points give the fibre rays ``(0, e_i)`` with multiplier
    ``a_i``.  The cones are the lifts of the cones of ``base``, which
    defaults to the triangulated spanning fan of the union of the parts.
    """
    parts = [sorted({_as_point(x) for x in part}) for part in parts]
    k = len(parts)
    J = set(J)
    if not J <= set(range(k)):
        raise FanError("J must be a subset of the part indices")
    r = len(parts[0][0])
    origin = (0,) * r
    owner: dict[tuple, int] = {}
    for i, part in enumerate(parts):
        for x in part:
            if x == origin:
                continue
            if x in owner:
                raise FanError(f"point {x} lies in two parts")
            owner[x] = i
    if base is None:
        hull = Polytope([x for part in parts for x in part])
        base = triangulated_spanning_fan(hull, list(owner))
    scale = [2 if i in J else 1 for i in range(k)]
    vectors = []
    for ray in base.rays:
        x = _owning_point(ray, owner)
        i = owner[x]
        vectors.append(tuple(x) + tuple(scale[i] * int(j == i) for j in range(k)))
    for j in range(k):
        vectors.append(origin + tuple(scale[j] * int(t == j) for t in range(k)))
    n = len(base.rays)
    cones = [list(c) + [n + j for j in range(k)] for c in base.cones]
    return _stacky_from_vectors(vectors, cones)


def _owning_point(ray: tuple, owner: dict) -> tuple:
    hits = [x for x in owner if primitive(x) == ray]
    if len(hits) != 1:
        raise FanError(f"ray {ray} does not correspond to exactly one part point")
    return hits[0]


# ---------------------------------------------------------------------------
# properties


@dataclass
class PropertyRecord:
    """Verified booleans with the witnesses that back them."""

    simplicial: bool
    unimodular: bool
    gorenstein: bool
    quasiprojective: bool
    convex: bool
    complete: bool
    certificates: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "simplicial": self.simplicial,
            "unimodular": self.unimodular,
            "gorenstein": self.gorenstein,
            "quasiprojective": self.quasiprojective,
            "convex": self.convex,
            "complete": self.complete,
        }


def gorenstein_witnesses(f: StackyFan) -> dict | None:
    """Integral ``m_c`` with ``<beta_rho rho, m_c> = 1`` on each maximal cone, or None."""
    out = {}
    for c in f.cones:
        rows = [f.extended_ray(i) for i in c]
        m = integer_solution(rows, [1] * len(rows))
        if m is None:
            return None
        out[c] = tuple(m)
    return out


def verify_gorenstein(f: StackyFan, witnesses: dict) -> bool:
    return all(
        all(dot(f.extended_ray(i), m) == 1 for i in c) for c, m in witnesses.items()
    ) and set(witnesses) == set(f.cones)


def cone_functional(f: StackyFan, cone: Sequence[int], values: Sequence) -> list[Fraction] | None:
    """Linear ``m`` on the span of ``cone`` with prescribed values on its extended rays."""
    return solve([f.extended_ray(i) for i in cone], list(values))


def quasiprojective_heights(fan: Fan):
    """Heights making the piecewise-linear function strictly convex, or None.

    On a full-dimensional fan with convex support it is enough to bend
    strictly across every interior wall, which keeps the LP to one variable
    per ray.  Other fans fall back to the global formulation.
    """
    if fan.is_full_dimensional() and _support_is_convex(fan):
        return _heights_by_walls(fan)
    return _heights_global(fan)


def _support_is_convex(fan: Fan) -> bool:
    for w, cofaces in fan.walls().items():
        if len(cofaces) == 1:
            normal = _wall_normal(fan, w, cofaces[0])
            if any(dot(r, normal) < 0 for r in fan.rays):
                return False
    return True


def _heights_by_walls(fan: Fan):
    n = len(fan.rays)
    cons = []
    for w, cofaces in sorted(fan.walls().items()):
        if len(cofaces) != 2:
            continue
        c1, c2 = cofaces
        (v,) = [i for i in c2 if i not in w]
        lam = _coords_in_cone(fan, c1, v)
        row = [Fraction(0)] * n
        for i, x in zip(c1, lam):
            row[i] += x
        row[v] -= 1
        cons.append(Inequality(tuple(row), -1))
    heights = [Fraction(0)] * n
    if cons:
        res = lp_feasible(cons)
        if not res.feasible:
            return None
        heights = list(res.point)
    functionals = {c: tuple(_normalize(x) for x in solve(fan.cone_rays(c), [heights[i] for i in c])) for c in fan.cones}
    return {"heights": [_normalize(x) for x in heights], "functionals": functionals}


def _coords_in_cone(fan: Fan, cone: Sequence[int], v: int) -> list[Fraction]:
    """Coefficients of ray ``v`` in the basis of the rays of a maximal simplicial cone."""
    cols = [[Fraction(fan.rays[i][t]) for i in cone] for t in range(fan.rank)]
    return solve(cols, list(fan.rays[v]))


def _heights_global(fan: Fan):
    """One height per ray plus one functional per maximal cone, matched on the cone."""
    n = len(fan.rays)
    d = fan.rank
    nvar = n + d * len(fan.cones)
    cons = []
    for ci, c in enumerate(fan.cones):
        off = n + d * ci
        for i in range(n):
            row = [Fraction(0)] * nvar
            for t in range(d):
                row[off + t] = Fraction(fan.rays[i][t])
            row[i] = Fraction(-1)
            if i in c:
                cons.append(Inequality(tuple(row), 0))
                cons.append(Inequality(tuple(-x for x in row), 0))
            else:
                cons.append(Inequality(tuple(row), -1))
    if not cons:
        return {"heights": [], "functionals": {}}
    res = lp_feasible(cons)
    if not res.feasible:
        return None
    pt = res.point
    return {
        "heights": [_normalize(x) for x in pt[:n]],
        "functionals": {
            c: tuple(_normalize(x) for x in pt[n + d * ci : n + d * ci + d]) for ci, c in enumerate(fan.cones)
        },
    }


def convexity_violation(f: StackyFan):
    """Return None if the stacky fan is convex, else a description of the failure.

    Convexity of the union of the simplices ``conv(0, extended rays of c)``
    holds iff the support is convex and the function equal to 1 on every
    extended ray is convex, i.e. for every maximal cone ``sigma`` the linear
    extension ``phi_sigma`` is at most 1 on every extended ray.
    """
    fan = f.fan
    if not fan.is_full_dimensional():
        return ("not full-dimensional", None)
    for w, cofaces in fan.walls().items():
        if len(cofaces) != 1:
            continue
        c = cofaces[0]
        normal = _wall_normal(fan, w, c)
        for i, r in enumerate(fan.rays):
            if dot(r, normal) < 0:
                return ("support", {"wall": w, "ray": i})
    for c in fan.cones:
        m = cone_functional(f, c, [1] * len(c))
        for i in range(len(fan.rays)):
            val = dot(f.extended_ray(i), m)
            if val > 1:
                return ("phi", {"cone": c, "ray": i, "value": _normalize(val)})
    return None


def _wall_normal(fan: Fan, wall: Sequence[int], cone: Sequence[int]) -> tuple:
    from .lattice import nullspace

    ker = nullspace([fan.rays[i] for i in wall], ncols=fan.rank)
    normal = primitive(ker[0])
    inside = next(i for i in cone if i not in wall)
    if dot(fan.rays[inside], normal) < 0:
        normal = tuple(-x for x in normal)
    return normal


def check_properties(f: StackyFan | Fan) -> PropertyRecord:
    if isinstance(f, Fan):
        f = StackyFan(f)
    fan = f.fan
    cert: dict = {}
    simplicial = fan.is_simplicial()
    unimodular = fan.is_unimodular()
    witnesses = gorenstein_witnesses(f)
    if witnesses is not None:
        cert["gorenstein"] = witnesses
    heights = quasiprojective_heights(fan)
    if heights is not None:
        cert["quasiprojective"] = heights
    violation = convexity_violation(f)
    if violation is not None:
        cert["convexity_violation"] = violation
    return PropertyRecord(
        simplicial=simplicial,
        unimodular=unimodular,
        gorenstein=witnesses is not None,
        quasiprojective=heights is not None,
        convex=violation is None,
        complete=fan.is_complete(),
        certificates=cert,
    )


__all__ = [
    "Fan",
    "FanError",
    "PropertyRecord",
    "StackyFan",
    "Triangulation",
    "cayley_fan",
    "check_properties",
    "convexity_violation",
    "gorenstein_witnesses",
    "lower_hull_cells",
    "quasiprojective_heights",
    "regular_triangulation",
    "sigma_family",
    "spanning_fan",
    "triangulated_spanning_fan",
    "verify_gorenstein",
]
