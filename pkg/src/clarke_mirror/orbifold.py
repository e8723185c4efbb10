"""Box elements, twisted sectors and orbifold diamonds of stacky fans."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .fan import StackyFan, sigma_family
from .hodge import HodgeDiamond, UnsupportedDimension, lg_diamond_curve, shift
from .lattice import smith_normal_form, transpose
from .nefclarke import NefPartition, cover_spec_from_pieces, dual_nef_partition


@dataclass(frozen=True)
class BoxElement:
    """A lattice point ``sum a_rho v_rho`` with every ``a_rho`` in ``(0, 1)``.

    ``cone`` is the minimal cone containing it, so the coefficients are
    indexed by that cone's rays in order.
    """

    cone: tuple
    coefficients: tuple
    point: tuple

    @property
    def age(self) -> Fraction:
        return sum(self.coefficients, Fraction(0))

    def to_json(self) -> dict:
        return {
            "cone": list(self.cone),
            "coefficients": [str(a) for a in self.coefficients],
            "point": list(self.point),
            "age": str(self.age),
        }


def cone_box(f: StackyFan, cone: Sequence[int]) -> list[BoxElement]:
    """Interior box points of one simplicial cone, found through the Smith form of its generators."""
    cone = tuple(cone)
    if not cone:
        return []
    vecs = [f.extended_ray(i) for i in cone]
    d = f.rank
    cols = transpose(vecs)  # d x c
    _, diag, w = smith_normal_form(cols)
    c = len(cone)
    ds = [diag[i][i] for i in range(c)]
    if any(x == 0 for x in ds):
        raise ValueError(f"cone {cone} is not simplicial")
    out = set()
    for ys in itertools.product(*(range(x) for x in ds)):
        y = [Fraction(a, b) for a, b in zip(ys, ds)]
        a = [sum(w[i][j] * y[j] for j in range(c)) for i in range(c)]
        a = tuple(x - (x.numerator // x.denominator) for x in a)
        if all(0 < x < 1 for x in a):
            out.add(a)
    elems = []
    for a in sorted(out):
        pt = tuple(sum(a[j] * vecs[j][t] for j in range(c)) for t in range(d))
        assert all(x.denominator == 1 for x in pt)
        elems.append(BoxElement(cone, a, tuple(int(x) for x in pt)))
    return elems


def box_elements(f: StackyFan) -> list[BoxElement]:
    """All twisted box elements, ordered by cone then coefficients."""
    if not f.fan.is_simplicial():
        raise ValueError("box elements need a simplicial fan")
    cones = sorted(f.fan.all_cones(), key=lambda c: (len(c), c))
    return [b for c in cones for b in cone_box(f, c)]


@dataclass(frozen=True)
class Sector:
    """A component of the inertia stack: the untwisted one has ``box = None``."""

    box: BoxElement | None

    @property
    def key(self) -> tuple:
        return () if self.box is None else self.box.point

    @property
    def age(self) -> Fraction:
        return Fraction(0) if self.box is None else self.box.age


def sectors(f: StackyFan) -> list[Sector]:
    return [Sector(None)] + [Sector(b) for b in box_elements(f)]


def orbifold_diamond(f: StackyFan, sector_diamonds: Mapping[tuple, HodgeDiamond]) -> HodgeDiamond:
    """Sum over sectors of ``H^{*-2 age}`` twisted by ``age``.

    ``sector_diamonds`` is keyed by the sector's box point (``()`` for the
    untwisted sector).
    """
    out = HodgeDiamond()
    for s in sectors(f):
        if s.key not in sector_diamonds:
            raise KeyError(f"no diamond for sector {s.key}")
        age2 = s.age * 2
        if age2.denominator != 1:
            raise ValueError("ages must be half-integral")
        out = out + shift(sector_diamonds[s.key], s.age, int(age2))
    return out


# ---------------------------------------------------------------------------
# the Clarke family


def _fibre_support(box: BoxElement, base_rank: int, k: int) -> frozenset:
    """Indices ``i`` with ``box = (0, e_I)``; anything else is not a Clarke-family sector."""
    pt = box.point
    if any(pt[:base_rank]) or any(x not in (0, 1) for x in pt[base_rank:]):
        raise ValueError(f"unexpected box element {pt}")
    return frozenset(i for i in range(k) if pt[base_rank + i])


@dataclass
class FamilySide:
    """One side of a Clarke family pair with its sector decomposition."""

    fan: StackyFan
    stack_set: frozenset
    g2_set: frozenset
    branch_degrees: list
    sectors: dict
    diamond: HodgeDiamond


def clarke_family_side(pieces: Sequence, stack_set: Iterable[int]) -> FamilySide:
    """Orbifold diamond of ``Sigma_{2A_S, A_{S^c}}`` with its LG potential.

    A box element ``(0, e_I)`` has age ``|I|/2`` and its sector is the LG
    model on the remaining indices.
    """
    pieces = list(pieces)
    k = len(pieces)
    S = frozenset(stack_set)
    G = frozenset(range(k)) - S
    fan = sigma_family([p.lattice_points() for p in pieces], S)
    cover = cover_spec_from_pieces(pieces)
    if cover.base_dim != 1:
        raise UnsupportedDimension("orbifold diamonds of the family are computed over curve bases only")
    degrees = cover.branch_degrees()
    base_rank = cover.base_dim
    table: dict[tuple, HodgeDiamond] = {}
    subsets: dict[tuple, list] = {}
    for s in sectors(fan):
        I0 = frozenset() if s.box is None else _fibre_support(s.box, base_rank, k)
        if not I0 <= S:
            raise ValueError("twisted sector outside the stacky directions")
        table[s.key] = lg_diamond_curve(degrees, G, sorted(set(range(k)) - I0))
        subsets[s.key] = sorted(I0)
    if len(table) != 2 ** len(S):
        raise ValueError("box elements do not match the subsets of the stack set")
    return FamilySide(fan, S, G, degrees, subsets, orbifold_diamond(fan, table))


@dataclass
class CdualReport:
    d: int
    rows: list = field(default_factory=list)
    passed: bool = True
    left: HodgeDiamond | None = None
    right: HodgeDiamond | None = None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "passed": self.passed,
            "rows": [list(r) for r in self.rows],
            "left": self.left.to_json() if self.left else None,
            "right": self.right.to_json() if self.right else None,
        }

    def table(self) -> str:
        lines = [f"d = {self.d}", "2lam 2mu  left  right  status"]
        for a, b, l, r, status in self.rows:
            lines.append(f"{a:>4} {b:>3} {l:>5} {r:>6}  {status}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def verify_cdual(left: HodgeDiamond, right: HodgeDiamond, d: int) -> CdualReport:
    """Compare ``h^{lam,mu}(left)`` with ``h^{d-lam,mu}(right)`` over all indices."""
    le = left.entries
    re = right.entries
    keys = set(le) | {(2 * d - a, b) for a, b in re}
    report = CdualReport(d, left=left, right=right)
    for a, b in sorted(keys):
        lv = le.get((a, b), 0)
        rv = re.get((2 * d - a, b), 0)
        ok = lv == rv
        report.rows.append((a, b, lv, rv, "ok" if ok else "mismatch"))
        report.passed &= ok
    return report


def verify_clarke_family(np: NefPartition, J: Iterable[int]) -> CdualReport:
    """Orbifold side ``Sigma_{2A_J, A_{J^c}}`` against ``Sigma_{check A_J, 2 check A_{J^c}}``."""
    J = frozenset(J)
    dual = dual_nef_partition(np)
    left = clarke_family_side(np.pieces(), J)
    right = clarke_family_side(dual.pieces, frozenset(range(np.k)) - J)
    return verify_cdual(left.diamond, right.diamond, np.delta.rank + np.k)


__all__ = [
    "BoxElement",
    "CdualReport",
    "FamilySide",
    "Sector",
    "box_elements",
    "clarke_family_side",
    "cone_box",
    "orbifold_diamond",
    "sectors",
    "verify_cdual",
    "verify_clarke_family",
]
