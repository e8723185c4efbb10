"""Rational polytopes in a lattice."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    M_LATTICE,
    N_LATTICE,
    LatticeError,
    _normalize,
    determinant,
    dot,
    dual_tag,
    hermite_normal_form,
    nullspace,
    primitive,
    rank,
    row_echelon,
)


class PolytopeError(ValueError):
    """Raised when an operation's geometric precondition fails."""


def _as_point(p) -> tuple:
    if hasattr(p, "coords"):
        p = p.coords
    return tuple(_normalize(Fraction(x)) for x in p)


def parse_coord(value):
    """Accept ints, Fractions or strings such as ``"-1/2"``."""
    return _normalize(Fraction(value))


@dataclass(frozen=True)
class Facet:
    """``<x, normal> >= -offset`` with ``normal`` primitive integral."""

    normal: tuple
    offset: Fraction

    def value(self, x) -> Fraction:
        return dot(x, self.normal) + self.offset


class Polytope:
    """Convex hull of finitely many rational points.

    ``facets`` and ``equations`` together form the H-representation:
    facets are inequalities ``<x, n> >= -offset``; equations ``<x, n> = c``
    cut out the affine span when the polytope is not full-dimensional.
    """

    def __init__(self, points: Iterable, lattice: str = N_LATTICE, name: str | None = None):
        pts = sorted({_as_point(p) for p in points})
        if not pts:
            raise PolytopeError("a polytope needs at least one point")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise PolytopeError("points of different ranks")
        dual_tag(lattice)
        self.rank = dims.pop()
        self.lattice = lattice
        self.name = name
        self.dim, self.equations, self.facets, self.vertices = _hull(pts, self.rank)

    # -- basic predicates -------------------------------------------------

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.rank

    def contains(self, x) -> bool:
        x = _as_point(x)
        return all(dot(x, n) == c for n, c in self.equations) and all(
            f.value(x) >= 0 for f in self.facets
        )

    def relative_interior_contains(self, x) -> bool:
        x = _as_point(x)
        return all(dot(x, n) == c for n, c in self.equations) and all(
            f.value(x) > 0 for f in self.facets
        )

    def origin_is_interior(self) -> bool:
        return self.is_full_dimensional and all(f.offset > 0 for f in self.facets)

    def is_lattice_polytope(self) -> bool:
        return all(isinstance(c, int) for v in self.vertices for c in v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polytope)
            and self.lattice == other.lattice
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash((self.lattice, self.vertices))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Polytope{label} rank={self.rank} dim={self.dim} vertices={list(self.vertices)}>"

    # -- faces ------------------------------------------------------------

    def facet_vertices(self, facet: Facet) -> list[tuple]:
        return [v for v in self.vertices if facet.value(v) == 0]

    def facet_polytopes(self) -> list["Polytope"]:
        return [Polytope(self.facet_vertices(f), self.lattice) for f in self.facets]

    # -- lattice points ---------------------------------------------------

    def bounding_box(self) -> list[tuple[int, int]]:
        box = []
        for i in range(self.rank):
            coords = [Fraction(v[i]) for v in self.vertices]
            box.append((math.ceil(min(coords)), math.floor(max(coords))))
        return box

    def lattice_points(self) -> list[tuple[int, ...]]:
        """All integral points, in lexicographic order."""
        ranges = [range(lo, hi + 1) for lo, hi in self.bounding_box()]
        return [p for p in itertools.product(*ranges) if self.contains(p)]

    def interior_points(self) -> list[tuple[int, ...]]:
        return [p for p in self.lattice_points() if self.relative_interior_contains(p)]

    def boundary_points(self) -> list[tuple[int, ...]]:
        return [p for p in self.lattice_points() if not self.relative_interior_contains(p)]

    # -- constructions ----------------------------------------------------

    def dilate(self, factor) -> "Polytope":
        return Polytope([tuple(factor * c for c in v) for v in self.vertices], self.lattice)

    def translate(self, vector) -> "Polytope":
        vector = _as_point(vector)
        return Polytope([tuple(a + b for a, b in zip(v, vector)) for v in self.vertices], self.lattice)

    def normalized_volume(self) -> Fraction | int:
        """``dim! * volume`` measured in ambient coordinates (full-dimensional only)."""
        if not self.is_full_dimensional:
            raise PolytopeError("normalized volume needs a full-dimensional polytope")
        total = sum(abs(determinant(_edge_matrix(s))) for s in pulling_triangulation(self))
        return _normalize(total)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "rank": self.rank,
            "lattice": self.lattice,
            "vertices": [[_json_coord(c) for c in v] for v in self.vertices],
        }
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Polytope":
        try:
            rank_ = int(doc["rank"])
            verts = [tuple(parse_coord(c) for c in v) for v in doc["vertices"]]
            lattice = doc.get("lattice", N_LATTICE)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed polytope document: {exc}") from exc
        if any(len(v) != rank_ for v in verts):
            raise ValueError("vertex length does not match rank")
        return cls(verts, lattice, doc.get("name"))


def _json_coord(c):
    return c if isinstance(c, int) else str(c)


def _edge_matrix(simplex: Sequence[tuple]) -> list[list]:
    v0 = simplex[0]
    return [[a - b for a, b in zip(v, v0)] for v in simplex[1:]]


def _hull(pts: list[tuple], d: int):
    """Return ``(dim, equations, facets, vertices)`` for the hull of ``pts``."""
    p0 = pts[0]
    diffs = [[Fraction(a - b) for a, b in zip(p, p0)] for p in pts[1:]]
    if diffs:
        rows, pivots = row_echelon(diffs)
    else:
        rows, pivots = [], []
    r = len(pivots)
    equations = []
    for n in nullspace(rows, ncols=d) if rows else nullspace([], ncols=d):
        n = primitive(n)
        equations.append((n, _normalize(dot(p0, n))))
    equations.sort()
    if r == 0:
        return 0, equations, [], (p0,)
    # project onto the pivot coordinates, which are independent on the span
    proj = [tuple(p[i] for i in pivots) for p in pts]
    small = _full_dim_facets(proj, r)
    facets = []
    for normal, offset in small:
        lifted = [0] * d
        for i, c in zip(pivots, normal):
            lifted[i] = c
        facets.append(Facet(tuple(lifted), offset))
    facets.sort(key=lambda f: (f.normal, f.offset))
    vertices = []
    for p, q in zip(pts, proj):
        active = [n for n, off in small if dot(q, n) + off == 0]
        if active and rank(active) == r:
            vertices.append(p)
    return r, equations, facets, tuple(sorted(vertices))


def _full_dim_facets(pts: list[tuple], d: int) -> list[tuple[tuple, Fraction]]:
    """Facet normals of a full-dimensional point set, by supporting hyperplanes.

    Every facet is spanned by ``d`` affinely independent input points; a
    candidate normal is kept when all points lie weakly on one side.
    """
    found: dict[tuple, Fraction] = {}
    for combo in itertools.combinations(range(len(pts)), d):
        base = pts[combo[0]]
        rows = [[Fraction(a - b) for a, b in zip(pts[i], base)] for i in combo[1:]]
        kernel = nullspace(rows, ncols=d) if rows else nullspace([], ncols=d)
        if len(kernel) != 1:
            continue
        n = primitive(kernel[0])
        c = dot(base, n)
        vals = [dot(p, n) - c for p in pts]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            n = tuple(-x for x in n)
            c = -c
        else:
            continue
        if any(v != 0 for v in vals):
            found.setdefault(n, Fraction(-c))
    return sorted((n, _normalize(off)) for n, off in found.items())


# ---------------------------------------------------------------------------
# public operations


def convex_hull(points: Iterable, lattice: str = N_LATTICE, name: str | None = None) -> Polytope:
    return Polytope(points, lattice, name)


def polar_dual(p: Polytope) -> Polytope:
    """``{m : <n, m> >= -1 for all n in p}``, living in the dual lattice."""
    if not p.origin_is_interior():
        raise PolytopeError("origin is not an interior point")
    verts = [tuple(Fraction(c) / f.offset for c in f.normal) for f in p.facets]
    return Polytope(verts, dual_tag(p.lattice))


def is_reflexive(p: Polytope) -> bool:
    if not p.is_full_dimensional:
        raise PolytopeError("reflexivity needs a full-dimensional polytope")
    if not p.origin_is_interior():
        raise PolytopeError("origin is not an interior point")
    return p.is_lattice_polytope() and polar_dual(p).is_lattice_polytope()


def lattice_points(p: Polytope) -> list[tuple[int, ...]]:
    return p.lattice_points()


def minkowski_sum(a: Polytope, b: Polytope) -> Polytope:
    if a.lattice != b.lattice or a.rank != b.rank:
        raise LatticeError("Minkowski sum of polytopes in different lattices")
    return Polytope(
        [tuple(x + y for x, y in zip(u, v)) for u in a.vertices for v in b.vertices], a.lattice
    )


def cayley_polytope(parts: Sequence[Polytope], scales: Sequence[int]) -> Polytope:
    """``Conv(U_i (s_i P_i) x e_i  U  U_i 0 x (-e_i))`` in rank ``r + k``."""
    if len(parts) != len(scales):
        raise ValueError("one scale per part is required")
    if not parts:
        raise ValueError("need at least one part")
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    r = parts[0].rank
    lattice = parts[0].lattice
    if any(p.rank != r or p.lattice != lattice for p in parts):
        raise LatticeError("Cayley parts live in different lattices")
    k = len(parts)
    points = []
    for i, (part, s) in enumerate(zip(parts, scales)):
        e = tuple(int(j == i) for j in range(k))
        for v in part.vertices:
            points.append(tuple(s * c for c in v) + e)
        points.append((0,) * r + tuple(-x for x in e))
    return Polytope(points, lattice)


def spanning_fan_cones(p: Polytope) -> list[tuple[tuple, ...]]:
    """Vertex sets of the facets, i.e. the maximal cones of the spanning fan."""
    if not p.origin_is_interior():
        raise PolytopeError("origin is not an interior point")
    return [tuple(p.facet_vertices(f)) for f in p.facets]


def pulling_triangulation(p: Polytope) -> list[tuple[tuple, ...]]:
    """Triangulate ``p`` by coning from its first vertex over far facets."""
    if p.dim == 0:
        return [(p.vertices[0],)]
    apex = p.vertices[0]
    simplices = []
    for facet in p.facets:
        if facet.value(apex) == 0:
            continue
        face = Polytope(p.facet_vertices(facet), p.lattice)
        for s in pulling_triangulation(face):
            simplices.append((apex,) + s)
    return simplices


def cyclic_vertices(p: Polytope) -> list[tuple]:
    """Vertices of a polygon in counterclockwise order around its centroid."""
    if p.rank != 2 or not p.is_full_dimensional:
        raise PolytopeError("cyclic order needs a full-dimensional polygon")
    n = len(p.vertices)
    cx = sum(Fraction(v[0]) for v in p.vertices) / n
    cy = sum(Fraction(v[1]) for v in p.vertices) / n
    return sorted(p.vertices, key=lambda v: math.atan2(v[1] - cy, v[0] - cx))


def polygon_normal_form(p: Polytope) -> tuple:
    """Invariant of a lattice polygon up to ``GL(2, Z)`` fixing the origin.

    The least Hermite form of the vertex matrix over all cyclic
    relabellings and reflections.
    """
    verts = cyclic_vertices(p)
    n = len(verts)
    best = None
    for seq in (verts, verts[::-1]):
        for r in range(n):
            order = seq[r:] + seq[:r]
            h = hermite_normal_form([[v[0] for v in order], [v[1] for v in order]])
            key = tuple(tuple(row) for row in h)
            if best is None or key < best:
                best = key
    return best


# ---------------------------------------------------------------------------
# Newton levels


class NewtonLevel:
    """The gauge function of a polytope containing the origin.

    ``nu(x) = min{t >= 0 : x in t * P}``; it is ``None`` outside the cone
    spanned by ``P`` (relevant when the origin is a vertex).
    """

    def __init__(self, polytope: Polytope):
        if not polytope.is_full_dimensional:
            raise PolytopeError("Newton level needs a full-dimensional polytope")
        if not polytope.contains((0,) * polytope.rank):
            raise PolytopeError("Newton polytope must contain the origin")
        self.polytope = polytope
        self._cone = [f.normal for f in polytope.facets if f.offset == 0]
        self._far = [f for f in polytope.facets if f.offset > 0]

    @property
    def convenient(self) -> bool:
        """True when the origin is a vertex rather than an interior point."""
        return bool(self._cone)

    def __call__(self, x) -> Fraction | None:
        x = _as_point(x)
        if any(dot(x, n) < 0 for n in self._cone):
            return None
        vals = [Fraction(-dot(x, f.normal)) / f.offset for f in self._far]
        return max([Fraction(0)] + vals)

    def points_up_to(self, bound) -> list[tuple[tuple[int, ...], Fraction]]:
        """Lattice points with level at most ``bound``, with their levels."""
        region = self.polytope.dilate(bound)
        out = []
        for m in region.lattice_points():
            lv = self(m)
            if lv is not None and lv <= bound:
                out.append((m, lv))
        return out


def nu_weighted_count(nl: NewtonLevel, levels: Iterable, truncation: int | None) -> dict:
    """Number of lattice points at each requested level, capped by ``truncation``."""
    if truncation is None:
        raise ValueError("a truncation bound is required")
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    counts: dict = {}
    for _, lv in nl.points_up_to(truncation):
        counts[lv] = counts.get(lv, 0) + 1
    return {Fraction(lv): counts.get(Fraction(lv), 0) for lv in levels}


__all__ = [
    "Facet",
    "M_LATTICE",
    "N_LATTICE",
    "NewtonLevel",
    "Polytope",
    "PolytopeError",
    "cayley_polytope",
    "convex_hull",
    "cyclic_vertices",
    "is_reflexive",
    "lattice_points",
    "minkowski_sum",
    "nu_weighted_count",
    "polar_dual",
    "polygon_normal_form",
    "pulling_triangulation",
    "spanning_fan_cones",
]
