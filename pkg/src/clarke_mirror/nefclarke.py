"""Nef partitions, Clarke dual pairs, and the cover / LG data built from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .fan import (
    Fan,
    StackyFan,
    _stacky_from_vectors,
    check_properties,
    convexity_violation,
    quasiprojective_heights,
    sigma_family,
    triangulated_spanning_fan,
)
from .lattice import Inequality, dot, lp_feasible, rank
from .polytope import (
    Polytope,
    PolytopeError,
    _as_point,
    is_reflexive,
    minkowski_sum,
    polar_dual,
    spanning_fan_cones,
)


class NefError(ValueError):
    """Raised when a vertex partition is not a nef partition."""

    def __init__(self, message: str, cone=None):
        super().__init__(message)
        self.cone = cone


def polytope_from_inequalities(rows: Sequence[tuple[Sequence, Fraction]], lattice: str) -> Polytope:
    """Bounded polytope ``{x : <a, x> >= b for (a, b) in rows}`` by vertex enumeration."""
    d = len(rows[0][0])
    verts = set()
    for combo in itertools.combinations(rows, d):
        mat = [list(a) for a, _ in combo]
        if rank(mat) < d:
            continue
        from .lattice import solve

        x = solve(mat, [b for _, b in combo])
        if x is not None and all(dot(a, x) >= b for a, b in rows):
            verts.add(_as_point(x))
    if not verts:
        raise PolytopeError("inequalities describe an empty or unbounded set")
    return Polytope(verts, lattice)


@dataclass
class NefPartition:
    """A partition of the vertices of a reflexive polytope with its certificates.

    ``psi[i][cone]`` is the linear functional representing the convex
    piecewise-linear ``psi_i`` on that maximal cone of the spanning fan.
    """

    delta: Polytope
    parts: tuple
    psi: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.parts)

    def pieces(self) -> list[Polytope]:
        """``Delta_i = conv(S_i + {0})``."""
        origin = (0,) * self.delta.rank
        return [Polytope(list(p) + [origin], self.delta.lattice) for p in self.parts]

    def part_index(self, vertex) -> int:
        v = _as_point(vertex)
        for i, part in enumerate(self.parts):
            if v in part:
                return i
        raise KeyError(vertex)

    def to_json(self, polytope_name: str | None = None) -> dict:
        doc = {
            "parts": [[self.delta.vertices.index(v) for v in part] for part in self.parts],
        }
        if polytope_name:
            doc["polytope"] = polytope_name
        else:
            doc["polytope"] = self.delta.to_json()
        return doc


def validate_nef_partition(delta: Polytope, parts: Iterable[Iterable]) -> NefPartition:
    """Find the convex functions ``psi_i`` by one LP per part and cone.

    ``parts`` may list vertex coordinates or indices into ``delta.vertices``.
    """
    if not is_reflexive(delta):
        raise NefError("nef partitions need a reflexive polytope")
    resolved = []
    for part in parts:
        pts = []
        for v in part:
            pts.append(delta.vertices[v] if isinstance(v, int) else _as_point(v))
        resolved.append(tuple(sorted(set(pts))))
    flat = [v for p in resolved for v in p]
    if sorted(flat) != sorted(delta.vertices) or len(flat) != len(set(flat)):
        raise NefError("parts must partition the vertex set")
    if any(not p for p in resolved):
        raise NefError("parts must be nonempty")
    cones = spanning_fan_cones(delta)
    verts = delta.vertices
    psi = []
    for part in resolved:
        target = {v: (1 if v in part else 0) for v in verts}
        per_cone = {}
        for cone in cones:
            cons = []
            for v in verts:
                row = tuple(Fraction(x) for x in v)
                if v in cone:
                    cons.append(Inequality(row, target[v]))
                    cons.append(Inequality(tuple(-x for x in row), -target[v]))
                else:
                    # convexity: the cone's functional stays below psi elsewhere
                    cons.append(Inequality(row, target[v]))
            res = lp_feasible(cons)
            if not res.feasible:
                raise NefError("no convex piecewise-linear function for a part", cone=cone)
            # facet vertices span, so the functional is unique; it must be integral
            if any(Fraction(x).denominator != 1 for x in res.point):
                raise NefError("psi is not integral on a cone", cone=cone)
            per_cone[cone] = tuple(res.point)
        psi.append(per_cone)
    return NefPartition(delta, tuple(resolved), psi)


@dataclass
class DualNefPartition:
    pieces: list
    delta_check: Polytope
    nef: NefPartition
    minkowski_checks: dict


def dual_nef_partition(np: NefPartition) -> DualNefPartition:
    """The pieces ``check Delta_i`` and their hull, with both Minkowski identities checked."""
    pieces = np.pieces()
    r = np.delta.rank
    lat = polar_dual(np.delta).lattice
    checks = []
    for i in range(np.k):
        rows = []
        for j, piece in enumerate(pieces):
            for v in piece.vertices:
                rows.append((v, Fraction(-1 if i == j else 0)))
        checks.append(polytope_from_inequalities(rows, lat))
    hull = Polytope([v for p in checks for v in p.vertices], lat)
    total = checks[0]
    for p in checks[1:]:
        total = minkowski_sum(total, p)
    back = pieces[0]
    for p in pieces[1:]:
        back = minkowski_sum(back, p)
    result = {
        "polar_is_sum_of_checks": total == polar_dual(np.delta),
        "polar_of_hull_is_sum_of_pieces": back == polar_dual(hull),
    }
    if not all(result.values()):
        raise AssertionError(f"Minkowski identity failed: {result}")
    nonzero = [v for v in hull.vertices if any(v)]
    dual_parts = [[v for v in nonzero if checks[i].contains(v)] for i in range(np.k)]
    dual = validate_nef_partition(hull, dual_parts)
    return DualNefPartition(checks, hull, dual, result)


# ---------------------------------------------------------------------------
# Clarke pairs


@dataclass
class ClarkePair:
    """Outcome of :func:`validate_clarke`; ``valid`` is False with a reason on failure."""

    sigma: StackyFan
    sigma_check: StackyFan
    valid: bool
    reason: str | None = None
    detail: object = None
    certificate: dict = field(default_factory=dict)


def validate_clarke(sigma: StackyFan, sigma_check: StackyFan) -> ClarkePair:
    """Check the Clarke conditions on a pair of stacky fans in dual lattices.

    Regularity is checked on all pairs of rays, which suffices because the
    supports are the cones they span.
    """
    if isinstance(sigma, Fan):
        sigma = StackyFan(sigma)
    if isinstance(sigma_check, Fan):
        sigma_check = StackyFan(sigma_check)
    if sigma.rank != sigma_check.rank:
        raise ValueError("fans of different rank cannot be paired")
    cert: dict = {"assumption": "regularity checked on extended-ray pairs"}
    for name, f in (("sigma", sigma), ("sigma_check", sigma_check)):
        if not f.fan.is_simplicial():
            return ClarkePair(sigma, sigma_check, False, "simplicial", name)
        heights = quasiprojective_heights(f.fan)
        if heights is None:
            return ClarkePair(sigma, sigma_check, False, "quasiprojective", name)
        cert[f"{name}_heights"] = heights
    for i, n in enumerate(sigma.rays):
        for j, m in enumerate(sigma_check.rays):
            if dot(n, m) < 0:
                return ClarkePair(sigma, sigma_check, False, "regularity", (i, j))
    for name, f in (("sigma", sigma), ("sigma_check", sigma_check)):
        bad = convexity_violation(f)
        if bad is not None:
            return ClarkePair(sigma, sigma_check, False, "convexity", (name, bad))
    return ClarkePair(sigma, sigma_check, True, None, None, cert)


def clarke_family_pair(np: NefPartition, J: Iterable[int]) -> ClarkePair:
    """The pair built from ``2A_J, A_{J^c}`` and ``check A_J, 2 check A_{J^c}``."""
    J = set(J)
    dual = dual_nef_partition(np)
    A = [piece.lattice_points() for piece in np.pieces()]
    A_check = [piece.lattice_points() for piece in dual.pieces]
    left = sigma_family(A, J)
    right = sigma_family(A_check, set(range(np.k)) - J)
    return validate_clarke(left, right)


def anticanonical_total_space(p: Polytope) -> StackyFan:
    """Fan of ``Tot(K)`` over the crepant resolution attached to ``p``."""
    base = triangulated_spanning_fan(p)
    vectors = [tuple(r) + (1,) for r in base.rays] + [(0,) * base.rank + (1,)]
    n = len(base.rays)
    return _stacky_from_vectors(vectors, [list(c) + [n] for c in base.cones])


@dataclass
class TransitionPair:
    sigma_I: StackyFan
    sigma_II: StackyFan
    clarke: ClarkePair
    gorenstein: bool
    unimodular: bool


def extremal_transition_pair(delta_II: Polytope, delta_I_check: Polytope) -> TransitionPair:
    """Cayley fans of ``Tot(K)`` over the resolutions of ``Delta_I`` and ``Delta_II``."""
    if not (is_reflexive(delta_II) and is_reflexive(delta_I_check)):
        raise PolytopeError("both polytopes must be reflexive")
    if not all(delta_I_check.contains(v) for v in delta_II.vertices):
        raise PolytopeError("Delta_II is not contained in check Delta_I")
    delta_I = polar_dual(delta_I_check)
    sig_I = anticanonical_total_space(delta_I)
    sig_II = anticanonical_total_space(delta_II)
    props = [check_properties(sig_I), check_properties(sig_II)]
    if not all(p.unimodular for p in props):
        raise PolytopeError("triangulation is not unimodular")
    pair = validate_clarke(sig_I, sig_II)
    return TransitionPair(
        sig_I,
        sig_II,
        pair,
        gorenstein=all(p.gorenstein for p in props),
        unimodular=all(p.unimodular for p in props),
    )


# ---------------------------------------------------------------------------
# cover and LG data


@dataclass(frozen=True)
class CoverSpec:
    """Formal data of the covers attached to a nef partition.

    ``divisors[i]`` maps base ray indices to the coefficient of ``E_{Delta_i}``.
    Each branch section is ``sigma_i = sigma_gen * sigma_tor`` of
    ``O(2 E_{Delta_i})``; genericity is a flag, never a sample.
    """

    base: Fan
    divisors: tuple
    I: frozenset
    generic: bool = True

    @property
    def k(self) -> int:
        return len(self.divisors)

    @property
    def base_dim(self) -> int:
        return self.base.rank

    def divisor_degree(self, i: int) -> int:
        """Degree of ``E_{Delta_i}`` on a complete toric curve."""
        if self.base_dim != 1:
            raise ValueError("degrees are only defined on a curve base")
        return sum(self.divisors[i].values())

    def branch_degrees(self) -> list[int]:
        """Degrees ``b_i`` of the branch divisors ``D_i`` (curve base)."""
        return [2 * self.divisor_degree(i) for i in range(self.k)]


def _divisors(pieces: Sequence[Polytope], base: Fan) -> tuple:
    return tuple({i: 1 for i, r in enumerate(base.rays) if piece.contains(r)} for piece in pieces)


def cover_spec_from_pieces(pieces: Sequence[Polytope], I: Iterable[int] = ()) -> CoverSpec:
    """Cover data over the triangulated spanning fan of the union of the pieces."""
    pieces = list(pieces)
    hull = Polytope([v for piece in pieces for v in piece.vertices])
    base = triangulated_spanning_fan(hull)
    I = frozenset(I)
    if not I <= set(range(len(pieces))):
        raise ValueError("I must index parts")
    spec = CoverSpec(base, _divisors(pieces, base), I)
    # each ray lies in exactly one part, so the E_i add up to the anticanonical divisor
    counts = [sum(1 for d in spec.divisors if i in d) for i in range(len(base.rays))]
    if any(c != 1 for c in counts):
        raise NefError("boundary rays are not split by the parts")
    return spec


def build_cover_spec(np: NefPartition, I: Iterable[int]) -> CoverSpec:
    return cover_spec_from_pieces(np.pieces(), I)


@dataclass
class LGModel:
    """``V_J`` with ``g_{2,J} + g_{1,J^c}`` over the toric base of a cover spec."""

    total_space: StackyFan
    support: list
    J: frozenset
    cover: CoverSpec

    def is_regular(self) -> bool:
        return all(dot(r, m) >= 0 for r in self.total_space.rays for m, _ in self.support)


def build_lg_model(np: NefPartition, J: Iterable[int]) -> LGModel:
    """Total space ``Tot(L_J^{-1} + L_{J^c}^{-2})`` and the support of its potential."""
    J = frozenset(J)
    spec = build_cover_spec(np, range(np.k))
    base = spec.base
    k = np.k
    owner = {}
    for i, d in enumerate(spec.divisors):
        for r in d:
            owner[r] = i
    vectors = []
    for idx, ray in enumerate(base.rays):
        i = owner[idx]
        a = 1 if i in J else 2
        vectors.append(tuple(ray) + tuple(a * int(t == i) for t in range(k)))
    for j in range(k):
        vectors.append((0,) * base.rank + tuple(int(t == j) for t in range(k)))
    n = len(base.rays)
    fan = _stacky_from_vectors(vectors, [list(c) + [n + j for j in range(k)] for c in base.cones])
    dual = dual_nef_partition(np)
    support = []
    for i, piece in enumerate(dual.pieces):
        a = 2 if i in J else 1
        for m in piece.lattice_points():
            support.append((tuple(m) + tuple(a * int(t == i) for t in range(k)), True))
    model = LGModel(fan, support, J, spec)
    if not model.is_regular():
        raise AssertionError("potential is not regular on the total space")
    return model


__all__ = [
    "ClarkePair",
    "CoverSpec",
    "DualNefPartition",
    "LGModel",
    "NefError",
    "NefPartition",
    "TransitionPair",
    "anticanonical_total_space",
    "build_cover_spec",
    "build_lg_model",
    "clarke_family_pair",
    "cover_spec_from_pieces",
    "dual_nef_partition",
    "extremal_transition_pair",
    "polytope_from_inequalities",
    "validate_clarke",
    "validate_nef_partition",
]
