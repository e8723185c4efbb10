"""Hodge diamonds and the desk-scale calculators that produce them.

Keys are doubled integers ``(2*lam, 2*mu)`` where ``lam`` is the
filtration index and ``lam + mu`` the cohomological degree, so half-integral
irregular Hodge numbers hash exactly.  Diamonds are stored per degree.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .fan import Fan
from .lattice import row_echelon
from .polytope import NewtonLevel, Polytope, PolytopeError


class UnsupportedDimension(ValueError):
    """The requested computation is outside the numeric range of this toolkit."""


def _twice(x) -> int:
    v = Fraction(x) * 2
    if v.denominator != 1:
        raise ValueError(f"{x} is not a half-integer")
    return int(v)


class HodgeDiamond:
    """Sparse nonnegative counts on ``(1/2 Z)^2``, graded by cohomological degree."""

    __slots__ = ("_data",)

    def __init__(self, by_degree: Mapping[int, Mapping[tuple[int, int], int]] | None = None):
        data: dict[int, dict[tuple[int, int], int]] = {}
        for n, table in (by_degree or {}).items():
            for key, c in table.items():
                if c < 0:
                    raise ValueError("Hodge numbers are nonnegative")
                if c:
                    data.setdefault(int(n), {})
                    data[int(n)][(int(key[0]), int(key[1]))] = data[int(n)].get(key, 0) + int(c)
        self._data = data

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_entries(cls, entries: Mapping, degree: int | None = None) -> "HodgeDiamond":
        """Build from ``{(lam, mu): count}`` with rational ``lam, mu``.

        Without ``degree`` each entry sits in degree ``lam + mu``.
        """
        table: dict[int, dict[tuple[int, int], int]] = {}
        for (lam, mu), c in entries.items():
            key = (_twice(lam), _twice(mu))
            n = degree
            if n is None:
                s = Fraction(lam) + Fraction(mu)
                if s.denominator != 1:
                    raise ValueError("lam + mu must be an integer to infer the degree")
                n = int(s)
            table.setdefault(n, {})
            table[n][key] = table[n].get(key, 0) + c
        return cls(table)

    @classmethod
    def point(cls) -> "HodgeDiamond":
        return cls({0: {(0, 0): 1}})

    @classmethod
    def zero(cls) -> "HodgeDiamond":
        return cls()

    # -- views ------------------------------------------------------------

    @property
    def by_degree(self) -> dict[int, dict[tuple[int, int], int]]:
        return {n: dict(t) for n, t in sorted(self._data.items())}

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        """Counts summed over degrees, keyed by doubled indices."""
        out: dict[tuple[int, int], int] = {}
        for table in self._data.values():
            for key, c in table.items():
                out[key] = out.get(key, 0) + c
        return dict(sorted(out.items()))

    def get(self, lam, mu, degree: int | None = None) -> int:
        key = (_twice(lam), _twice(mu))
        if degree is not None:
            return self._data.get(degree, {}).get(key, 0)
        return sum(t.get(key, 0) for t in self._data.values())

    def gr_dims(self, degree: int) -> dict[Fraction, int]:
        """``lam -> dim gr^lam H^degree``."""
        out: dict[Fraction, int] = {}
        for (a, _), c in self._data.get(degree, {}).items():
            out[Fraction(a, 2)] = out.get(Fraction(a, 2), 0) + c
        return dict(sorted(out.items()))

    def total(self) -> int:
        return sum(sum(t.values()) for t in self._data.values())

    def is_zero(self) -> bool:
        return not self._data

    def as_fraction_entries(self) -> dict[tuple[Fraction, Fraction], int]:
        return {(Fraction(a, 2), Fraction(b, 2)): c for (a, b), c in self.entries.items()}

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "HodgeDiamond") -> "HodgeDiamond":
        table: dict[int, dict[tuple[int, int], int]] = {n: dict(t) for n, t in self._data.items()}
        for n, t in other._data.items():
            dest = table.setdefault(n, {})
            for key, c in t.items():
                dest[key] = dest.get(key, 0) + c
        return HodgeDiamond(table)

    def scale(self, factor: int) -> "HodgeDiamond":
        if factor < 0:
            raise ValueError("diamonds only scale by nonnegative integers")
        return HodgeDiamond({n: {k: c * factor for k, c in t.items()} for n, t in self._data.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, HodgeDiamond) and self._data == other._data

    def __hash__(self) -> int:
        return hash(tuple(sorted((n, tuple(sorted(t.items()))) for n, t in self._data.items())))

    def __le__(self, other: "HodgeDiamond") -> bool:
        """Entrywise comparison, degree by degree."""
        return all(
            c <= other._data.get(n, {}).get(key, 0) for n, t in self._data.items() for key, c in t.items()
        )

    def __repr__(self) -> str:
        parts = []
        for n, t in sorted(self._data.items()):
            inner = ", ".join(f"({_fmt(a)},{_fmt(b)}):{c}" for (a, b), c in sorted(t.items()))
            parts.append(f"H^{n}: {inner}")
        return "<HodgeDiamond " + ("; ".join(parts) or "0") + ">"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "entries": [[a, b, c] for (a, b), c in self.entries.items()],
            "by_degree": {str(n): [[a, b, c] for (a, b), c in sorted(t.items())] for n, t in sorted(self._data.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HodgeDiamond":
        if "by_degree" in doc and doc["by_degree"] is not None:
            return cls({int(n): {(a, b): c for a, b, c in rows} for n, rows in doc["by_degree"].items()})
        table: dict[int, dict[tuple[int, int], int]] = {}
        for a, b, c in doc["entries"]:
            if (a + b) % 2:
                raise ValueError("degree cannot be inferred for an entry with odd 2(lam+mu)")
            table.setdefault((a + b) // 2, {})[(a, b)] = c
        return cls(table)

    def table(self) -> str:
        """Aligned text table of ``lam, mu, degree, count`` rows."""
        rows = [("lam", "mu", "deg", "h")]
        for n, t in sorted(self._data.items()):
            for (a, b), c in sorted(t.items()):
                rows.append((_fmt(a), _fmt(b), str(n), str(c)))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        return "\n".join("  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in rows)


def _fmt(doubled: int) -> str:
    return str(doubled // 2) if doubled % 2 == 0 else f"{doubled}/2"


def shift(d: HodgeDiamond, alpha, degree_shift: int = 0) -> HodgeDiamond:
    """Move every entry by ``(alpha, alpha)`` and its degree by ``degree_shift``."""
    a = _twice(alpha)
    return HodgeDiamond(
        {n + degree_shift: {(x + a, y + a): c for (x, y), c in t.items()} for n, t in d._data.items()}
    )


def kunneth(a: HodgeDiamond, b: HodgeDiamond) -> HodgeDiamond:
    """Convolution in ``(lam, mu)`` and in degree."""
    table: dict[int, dict[tuple[int, int], int]] = {}
    for n1, t1 in a._data.items():
        for n2, t2 in b._data.items():
            dest = table.setdefault(n1 + n2, {})
            for (x1, y1), c1 in t1.items():
                for (x2, y2), c2 in t2.items():
                    key = (x1 + x2, y1 + y2)
                    dest[key] = dest.get(key, 0) + c1 * c2
    return HodgeDiamond(table)


def total_diamond_sum(items: Iterable[HodgeDiamond]) -> HodgeDiamond:
    out = HodgeDiamond()
    for x in items:
        out = out + x
    return out


# ---------------------------------------------------------------------------
# classical calculators


def toric_diamond(f: Fan) -> HodgeDiamond:
    """``h^{p,p}`` of a smooth complete toric variety from its f-vector."""
    if not f.is_complete() and f.rank > 0:
        raise ValueError("toric_diamond needs a complete fan")
    if not f.is_unimodular():
        raise ValueError("toric_diamond needs a unimodular fan")
    fv = f.f_vector()
    d = f.rank
    table = {}
    for p in range(d + 1):
        h = sum((-1) ** (i - p) * comb(i, p) * fv[d - i] for i in range(p, d + 1))
        if h:
            table[2 * p] = {(2 * p, 2 * p): h}
    return HodgeDiamond(table)


def projective_line() -> HodgeDiamond:
    return HodgeDiamond({0: {(0, 0): 1}, 2: {(2, 2): 1}})


def curve_diamond(genus: int, weight_zero: int = 0, components: int = 1, connected: int = 1) -> HodgeDiamond:
    """Compact nodal curve with the given normalization genus and graph first Betti number.

    ``weight_zero`` classes sit in ``H^1`` with filtration index 0.
    """
    table = {0: {(0, 0): connected}, 2: {(2, 2): components}}
    h1 = {}
    if genus:
        h1[(2, 0)] = genus
    if genus + weight_zero:
        h1[(0, 2)] = genus + weight_zero
    if h1:
        table[1] = h1
    return HodgeDiamond(table)


@dataclass(frozen=True)
class PointsInCurve:
    """``n`` reduced points in a smooth compact curve."""

    count: int


@dataclass(frozen=True)
class NodalCurveInSurface:
    """A compact nodal curve in a smooth compact surface.

    ``genera`` lists the normalization genera of the components; ``b1`` is
    the first Betti number of the dual graph.
    """

    genera: tuple
    b1: int = 0
    connected: int = 1


@dataclass(frozen=True)
class WholeSpace:
    pass


def local_cohomology_diamond(ambient: HodgeDiamond | Fan, Z, ambient_dim: int | None = None) -> HodgeDiamond:
    """Diamond of ``H^*_Z(X)`` from Poincare-Lefschetz duality with ``Z``.

    ``H^k_Z(X) = H_{2n-k}(Z)(-n)`` for compact ``Z`` in an ``n``-fold.
    """
    if isinstance(ambient, Fan):
        ambient_dim = ambient.rank
        ambient = toric_diamond(ambient)
    if isinstance(Z, WholeSpace):
        return ambient
    if ambient_dim is None:
        raise ValueError("ambient dimension is required")
    if ambient_dim > 2:
        raise UnsupportedDimension("local cohomology is only computed for curves and surfaces")
    if isinstance(Z, PointsInCurve):
        if ambient_dim != 1:
            raise ValueError("points-in-curve data needs a curve")
        return HodgeDiamond({2: {(2, 2): Z.count}} if Z.count else {})
    if isinstance(Z, NodalCurveInSurface):
        if ambient_dim != 2:
            raise ValueError("curve-in-surface data needs a surface")
        g = sum(Z.genera)
        table = {2: {(2, 2): len(Z.genera)}, 4: {(4, 4): Z.connected}}
        h3 = {}
        if g:
            h3[(2, 4)] = g
        if g + Z.b1:
            h3[(4, 2)] = g + Z.b1
        if h3:
            table[3] = h3
        return HodgeDiamond(table)
    raise ValueError(f"unsupported support description {Z!r}")


def poincare_lefschetz(z_diamond: HodgeDiamond, n: int) -> HodgeDiamond:
    """``h^{p,q}(Z) = h^{n-p,n-q}_Z(X)``: reindex a compact ``Z`` diamond."""
    return HodgeDiamond(
        {2 * n - k: {(2 * n - a, 2 * n - b): c for (a, b), c in t.items()} for k, t in z_diamond._data.items()}
    )


def _h0_p1(n: int) -> int:
    return max(n + 1, 0)


def _h1_p1(n: int) -> int:
    return max(-n - 1, 0)


def ev_coinvariant_curve(branch_degree: int) -> HodgeDiamond:
    """Anti-invariant part of the double cover of ``P^1`` branched in ``b`` points.

    Computed as ``h^q(Omega^p(log B) (x) L^{-1})`` with ``L = O(b/2)``;
    ``b = 0`` gives the cohomology of ``P^1`` itself.
    """
    b = branch_degree
    if b < 0 or b % 2:
        raise ValueError("branch degree must be even and nonnegative")
    half = b // 2
    table: dict[int, dict[tuple[int, int], int]] = {}
    # p = 0: L^{-1} = O(-b/2); p = 1: K + B - L = O(b/2 - 2)
    for p, twist in ((0, -half), (1, (b - 2) - half)):
        for q, h in ((0, _h0_p1(twist)), (1, _h1_p1(twist))):
            if h:
                table.setdefault(p + q, {})[(2 * p, 2 * q)] = h
    return HodgeDiamond(table)


def ev_coinvariant_diamond(spec) -> HodgeDiamond | dict:
    """Coinvariant cohomology for a single branch section (``|I| = 1``).

    Curve bases return a diamond; surface bases return the Euler
    characteristics ``{p: chi(Omega^p(log B) (x) L^{-1})}`` only.
    """
    if len(spec.I) != 1:
        raise ValueError("exactly one branch section is required")
    (i,) = tuple(spec.I)
    if spec.base_dim == 1:
        return ev_coinvariant_curve(spec.branch_degrees()[i])
    if spec.base_dim == 2:
        return surface_log_euler_characteristics(spec.base, spec.divisors[i])
    raise UnsupportedDimension("coinvariant cohomology is computed for curve and surface bases only")


def galois_cover_diamond(degrees: Sequence[int], I: Iterable[int]) -> HodgeDiamond:
    """``H^*`` of the ``(Z/2)^I`` cover of ``P^1`` as the sum of its eigenspaces.

    The character indexed by ``K`` contributes the coinvariant part of the
    double cover branched over ``sum_{i in K} D_i``.
    """
    I = sorted(set(I))
    out = HodgeDiamond()
    for r in range(len(I) + 1):
        for K in itertools.combinations(I, r):
            out = out + ev_coinvariant_curve(sum(degrees[i] for i in K))
    return out


def riemann_hurwitz_genus(degrees: Sequence[int], I: Iterable[int]) -> int:
    """Genus of the ``(Z/2)^I`` cover of ``P^1`` with disjoint reduced branch loci.

    Every branch point has stabiliser of order two, so each of its
    ``2^{|I|}`` preimages collapses in pairs.
    """
    I = sorted(set(I))
    n = 2 ** len(I)
    if not I:
        return 0
    ramification = sum(degrees[i] for i in I) * (n - n // 2)
    chi2 = -2 * n + ramification  # 2g - 2
    return chi2 // 2 + 1


def toric_surface_intersections(f: Fan) -> list[list[int]]:
    """Intersection matrix of the boundary divisors of a smooth complete toric surface."""
    if f.rank != 2 or not f.is_complete() or not f.is_unimodular():
        raise ValueError("need a smooth complete toric surface")
    n = len(f.rays)
    nbrs: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in f.cones:
        nbrs[a].append(b)
        nbrs[b].append(a)
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        u, v = nbrs[i]
        s = tuple(x + y for x, y in zip(f.rays[u], f.rays[v]))
        r = f.rays[i]
        j = next(t for t in range(2) if r[t])
        mat[i][i] = -(s[j] // r[j])
        mat[i][u] = mat[i][v] = 1
    return mat


def surface_log_euler_characteristics(
    f: Fan, divisor: Mapping[int, int], generic_parts: Sequence[Mapping[int, int]] | None = None
) -> dict[int, int]:
    """``chi(Omega^p(log B) (x) L^{-1})`` for ``B = B_gen + sum of toric E_rho`` with ``L = E``.

    ``divisor`` gives ``E`` as coefficients on boundary divisors; ``B_gen``
    is a smooth member of ``|E|`` and the toric part is the reduced union
    of the divisors with positive coefficient.  When ``E`` is a sum of
    several branch classes, ``generic_parts`` lists them so that ``B_gen``
    gets one smooth component per class.
    """
    mat = toric_surface_intersections(f)
    n = len(f.rays)

    def inter(a, b):
        return sum(a[i] * mat[i][j] * b[j] for i in range(n) for j in range(n))

    L = [divisor.get(i, 0) for i in range(n)]
    K = [-1] * n
    e = n
    M = [-x for x in L]
    chi0 = 1 + (inter(L, L) + inter(L, K)) // 2
    parts = [divisor] if generic_parts is None else list(generic_parts)
    if [sum(p.get(i, 0) for p in parts) for i in range(n)] != L:
        raise ValueError("generic parts must add up to the divisor")
    comps = [[p.get(i, 0) for i in range(n)] for p in parts]
    comps += [[int(t == i) for t in range(n)] for i in range(n) if divisor.get(i, 0) > 0]
    chi1 = (inter(K, K) + e) // 6 + inter(M, M) - e
    for c in comps:
        chi1 += inter(M, c) - (inter(c, c) + inter(K, c)) // 2
    return {0: chi0, 1: chi1, 2: chi0}


# ---------------------------------------------------------------------------
# LG models over curve bases


def lg_summand_curve(degrees: Sequence[int], I: Iterable[int], indices: Iterable[int] | None = None) -> HodgeDiamond:
    """The ``I`` summand of the direct sum decomposition over ``P^1``.

    The support ``Z^I`` is the intersection of the branch divisors outside
    ``I``; the result is already shifted by ``|I|`` in degree and ``|I|/2``
    in filtration.
    """
    idx = sorted(range(len(degrees)) if indices is None else set(indices))
    I = sorted(set(I))
    if not set(I) <= set(idx):
        raise ValueError("I must be a subset of the indices")
    rest = [i for i in idx if i not in I]
    if len(rest) >= 2:
        body = HodgeDiamond()
    elif len(rest) == 1:
        body = local_cohomology_diamond(projective_line(), PointsInCurve(degrees[rest[0]]), 1)
    else:
        body = ev_coinvariant_curve(sum(degrees[i] for i in I))
    return shift(body, Fraction(len(I), 2), len(I))


def lg_diamond_curve(degrees: Sequence[int], J: Iterable[int], indices: Iterable[int] | None = None) -> HodgeDiamond:
    """``H^*(V_J, g_{2,J} + g_{1,J^c})`` over ``P^1`` as a sum over ``I`` in ``J``."""
    J = sorted(set(J))
    out = HodgeDiamond()
    for r in range(len(J) + 1):
        for I in itertools.combinations(J, r):
            out = out + lg_summand_curve(degrees, I, indices)
    return out


def lg_diamond(model, J: Iterable[int] | None = None) -> HodgeDiamond:
    """Irregular Hodge diamond of an LG model built from a nef partition.

    ``model`` is an ``LGModel`` or a ``CoverSpec`` together with ``J``.
    """
    cover = getattr(model, "cover", model)
    if J is None:
        J = model.J
    if cover.base_dim != 1:
        raise UnsupportedDimension("numeric LG diamonds are computed over curve bases only")
    return lg_diamond_curve(cover.branch_degrees(), J)


# ---------------------------------------------------------------------------
# Newton spectra


@dataclass
class Spectrum:
    """Multiplicities of rational levels plus the total dimension."""

    levels: dict
    rank: int

    @property
    def total(self) -> int:
        return sum(self.levels.values())

    def multiplicity(self, lam) -> int:
        return self.levels.get(Fraction(lam), 0)

    def as_diamond(self) -> HodgeDiamond:
        """Place level ``lam`` at ``(lam, rank - lam)`` in degree ``rank``."""
        return HodgeDiamond.from_entries(
            {(lam, self.rank - lam): c for lam, c in self.levels.items()}, degree=self.rank
        )

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "total": self.total,
            "levels": [[str(lam), c] for lam, c in sorted(self.levels.items())],
        }


@dataclass
class SpectrumRequest:
    newton: NewtonLevel

    @property
    def rank(self) -> int:
        return self.newton.polytope.rank


def _support_shape(nl: NewtonLevel) -> str:
    if not nl.convenient:
        return "laurent"
    d = nl.polytope.rank
    normals = sorted(tuple(n) for n in nl._cone)
    basis = sorted(tuple(int(i == j) for j in range(d)) for i in range(d))
    if normals != basis:
        raise PolytopeError("non-convenient support: the origin must be interior or a coordinate corner")
    return "convenient"


def _series_product(counts: Mapping[Fraction, int], j_max: int, sign_weights: Sequence[int]) -> dict:
    """Multiply ``sum c_x t^x`` by the polynomial ``sum w_j t^j`` up to level ``j_max``."""
    out: dict[Fraction, int] = {}
    for x, c in counts.items():
        for j, w in enumerate(sign_weights):
            lam = x + j
            if lam <= j_max:
                out[lam] = out.get(lam, 0) + w * c
    return out


def newton_spectrum(req: SpectrumRequest | NewtonLevel) -> Spectrum:
    """Spectrum from ``(1 - t)^d * sum_m t^nu(m)`` (with inclusion-exclusion when convenient)."""
    nl = req.newton if isinstance(req, SpectrumRequest) else req
    d = nl.polytope.rank
    shape = _support_shape(nl)
    points = nl.points_up_to(d)
    if shape == "laurent":
        counts: dict[Fraction, int] = {}
        for _, lv in points:
            counts[lv] = counts.get(lv, 0) + 1
        raw = _series_product(counts, d, [(-1) ** j * comb(d, j) for j in range(d + 1)])
    else:
        raw = {}
        for r in range(d + 1):
            for I in itertools.combinations(range(d), r):
                counts = {}
                for m, lv in points:
                    if all(m[i] == 0 for i in range(d) if i not in I):
                        counts[lv] = counts.get(lv, 0) + 1
                sign = (-1) ** (d - r)
                part = _series_product(counts, d, [sign * (-1) ** j * comb(r, j) for j in range(r + 1)])
                for lam, c in part.items():
                    raw[lam] = raw.get(lam, 0) + c
    levels = {lam: c for lam, c in sorted(raw.items()) if c}
    if any(c < 0 for c in levels.values()):
        raise ArithmeticError(f"negative spectral multiplicity: {levels}")
    return Spectrum(levels, d)


# ---------------------------------------------------------------------------
# brute-force Jacobian oracle


class NonStabilization(RuntimeError):
    pass


class MemoryBudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleResult:
    dimension: int
    levels: dict
    truncation: int
    seeds: tuple
    stable: bool = True
    notes: list = field(default_factory=list)


def _random_coefficient(rng: random.Random) -> Fraction:
    num = rng.randint(1, 97) * rng.choice((1, -1))
    return Fraction(num, rng.randint(1, 13))


def _oracle_histogram(nl: NewtonLevel, shape: str, coeffs: Mapping[tuple, Fraction], T: int, budget_mb: float) -> dict:
    d = nl.polytope.rank

    def level(m):
        if shape == "laurent":
            return nl(m)
        return nl(tuple(a + 1 for a in m))

    region = nl.polytope.dilate(T + 1)
    box = [range(lo - 1, hi + 1) for lo, hi in region.bounding_box()]
    monos = []
    for m in itertools.product(*box):
        if shape == "convenient" and any(a < 0 for a in m):
            continue
        lv = level(m)
        if lv is not None and lv <= T:
            monos.append((m, lv))
    index = {m: i for i, (m, _) in enumerate(monos)}
    if shape == "laurent":
        gens = [{a: c * a[i] for a, c in coeffs.items() if a[i]} for i in range(d)]
    else:
        gens = []
        for i in range(d):
            g = {}
            for a, c in coeffs.items():
                if a[i]:
                    g[tuple(x - (j == i) for j, x in enumerate(a))] = c * a[i]
            gens.append(g)
    rows = []
    for m, _ in monos:
        for g in gens:
            row = {}
            ok = True
            for a, c in g.items():
                t = tuple(x + y for x, y in zip(m, a))
                if t not in index:
                    ok = False
                    break
                row[index[t]] = row.get(index[t], 0) + c
            if ok and row:
                rows.append(row)
    est_mb = len(rows) * len(monos) * 64 / 1e6
    if est_mb > budget_mb:
        raise MemoryBudgetExceeded(f"oracle matrix needs about {est_mb:.1f} MB, budget {budget_mb} MB")
    order = sorted(range(len(monos)), key=lambda i: (-monos[i][1], monos[i][0]))
    dense = [[r.get(j, 0) for j in range(len(monos))] for r in rows]
    _, pivots = row_echelon(dense, pivot_order=order)
    lead_levels = [monos[p][1] for p in pivots]
    all_levels = sorted({lv for _, lv in monos})
    hist = {}
    prev = 0
    for lam in all_levels:
        q = sum(1 for _, lv in monos if lv <= lam) - sum(1 for lv in lead_levels if lv <= lam)
        if q != prev:
            hist[lam] = q - prev
        prev = q
    return hist


def koszul_oracle(
    newton: NewtonLevel | Polytope,
    truncation: int | None = None,
    seeds: Sequence[int] = (1, 2),
    memory_budget_mb: float = 256.0,
) -> OracleResult:
    """Jacobian-ring dimension and Newton-level histogram by dense linear algebra.

    Coefficients on every lattice point of the Newton polytope are random
    rationals.  The histogram at truncation ``T`` must agree with the one at
    ``T + 1`` below level ``T``, and the draws for every seed must agree.
    """
    nl = newton if isinstance(newton, NewtonLevel) else NewtonLevel(newton)
    d = nl.polytope.rank
    if d > 2:
        raise UnsupportedDimension("the oracle is limited to rank at most 2")
    shape = _support_shape(nl)
    T = truncation if truncation is not None else d + 1
    if T <= d:
        raise ValueError("truncation must exceed the rank")
    # the constant term does not enter the Jacobian ideal
    support = [tuple(p) for p in nl.polytope.lattice_points() if any(p)]
    results = []
    for seed in seeds:
        rng = random.Random(seed)
        coeffs = {p: _random_coefficient(rng) for p in support}
        low = _oracle_histogram(nl, shape, coeffs, T, memory_budget_mb)
        high = _oracle_histogram(nl, shape, coeffs, T + 1, memory_budget_mb)
        low_cut = {k: v for k, v in low.items() if k < T}
        high_cut = {k: v for k, v in high.items() if k < T}
        if low_cut != high_cut or any(T - 1 < k <= T for k in high):
            raise NonStabilization(f"histogram did not stabilize at truncation {T} (seed {seed})")
        results.append(low_cut)
    if any(r != results[0] for r in results[1:]):
        raise NonStabilization("random draws disagree; coefficients may be degenerate")
    hist = results[0]
    return OracleResult(sum(hist.values()), hist, T, tuple(seeds))


__all__ = [
    "HodgeDiamond",
    "MemoryBudgetExceeded",
    "NodalCurveInSurface",
    "NonStabilization",
    "OracleResult",
    "PointsInCurve",
    "Spectrum",
    "SpectrumRequest",
    "UnsupportedDimension",
    "WholeSpace",
    "curve_diamond",
    "ev_coinvariant_curve",
    "ev_coinvariant_diamond",
    "galois_cover_diamond",
    "koszul_oracle",
    "kunneth",
    "lg_diamond",
    "lg_diamond_curve",
    "lg_summand_curve",
    "local_cohomology_diamond",
    "newton_spectrum",
    "poincare_lefschetz",
    "projective_line",
    "riemann_hurwitz_genus",
    "shift",
    "surface_log_euler_characteristics",
    "toric_diamond",
    "toric_surface_intersections",
]
