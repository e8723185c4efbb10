"""Formal B-symbol ledgers, mirror-relation generators and hdual certificates.

Atoms are the parts of a nef partition, numbered from 1.  A block is a
sorted tuple of atoms; a block with several atoms stands for the merged
part of a coarser partition.  A symbol ``B[I-, I0, I+](s)`` has weight
``#blocks + 2s``, which is invariant under the contraction relation and is
the constant appearing in the mirror reindexing ``lam -> d + weight - lam``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .hodge import (
    HodgeDiamond,
    UnsupportedDimension,
    ev_coinvariant_curve,
    kunneth,
    lg_summand_curve,
    local_cohomology_diamond,
    PointsInCurve,
    projective_line,
    shift as shift_diamond,
)
from .lattice import solve

Block = tuple


def _block(x) -> Block:
    if isinstance(x, int):
        return (x,)
    b = tuple(sorted(int(a) for a in x))
    if not b or len(set(b)) != len(b):
        raise ValueError(f"bad block {x!r}")
    return b


def _blocks(xs) -> tuple:
    return tuple(sorted(_block(x) for x in xs))


def _half(x) -> Fraction:
    v = Fraction(x)
    if (2 * v).denominator != 1:
        raise ValueError(f"shift {x} is not a half-integer")
    return v


def block_name(b: Block) -> str:
    return "+".join(str(a) for a in b)


def _set_name(bs: Sequence[Block]) -> str:
    return "{" + ",".join(block_name(b) for b in bs) + "}"


@dataclass(frozen=True, order=True)
class BSymbol:
    """``B_{I-, I0, I+}(shift)`` on blocks of atoms."""

    minus: tuple
    zero: tuple
    plus: tuple
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "minus", _blocks(self.minus))
        object.__setattr__(self, "zero", _blocks(self.zero))
        object.__setattr__(self, "plus", _blocks(self.plus))
        object.__setattr__(self, "shift", _half(self.shift))
        atoms = [a for b in self.blocks() for a in b]
        if len(atoms) != len(set(atoms)):
            raise ValueError("I-, I0 and I+ must be disjoint")

    def blocks(self) -> tuple:
        return self.minus + self.zero + self.plus

    def atoms(self) -> frozenset:
        return frozenset(a for b in self.blocks() for a in b)

    @property
    def weight(self) -> int:
        w = len(self.blocks()) + 2 * self.shift
        return int(w)

    def shifted(self, a) -> "BSymbol":
        return BSymbol(self.minus, self.zero, self.plus, self.shift + _half(a))

    def swapped(self) -> "BSymbol":
        """Exchange the roles of ``I-`` and ``I0``."""
        return BSymbol(self.zero, self.minus, self.plus, self.shift)

    def canonical(self) -> "BSymbol":
        return contraction(self) if len(self.zero) > 1 else self

    def __str__(self) -> str:
        s = f"B[{_set_name(self.minus)},{_set_name(self.zero)},{_set_name(self.plus)}]"
        return s if self.shift == 0 else f"{s}({self.shift})"

    def to_json(self) -> dict:
        return {
            "minus": [list(b) for b in self.minus],
            "zero": [list(b) for b in self.zero],
            "plus": [list(b) for b in self.plus],
            "shift": str(self.shift),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BSymbol":
        return cls(doc["minus"], doc["zero"], doc["plus"], Fraction(doc.get("shift", "0")))


def contraction(sym: BSymbol) -> BSymbol:
    """Merge ``I0`` into one block and raise the shift by ``(|I0| - 1)/2``."""
    if not sym.zero:
        raise ValueError("contraction needs a nonempty I0")
    merged = tuple(sorted(a for b in sym.zero for a in b))
    return BSymbol(sym.minus, (merged,), sym.plus, sym.shift + Fraction(len(sym.zero) - 1, 2))


class BLedger:
    """Formal sum of canonical symbols with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[BSymbol, object] | Iterable[tuple] | None = None):
        acc: dict[BSymbol, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or [])
        for sym, c in items:
            key = sym.canonical()
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        self.terms = {s: c for s, c in sorted(acc.items()) if c}

    @classmethod
    def of(cls, *syms: BSymbol) -> "BLedger":
        return cls([(s, 1) for s in syms])

    def __add__(self, other: "BLedger") -> "BLedger":
        return BLedger(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other: "BLedger") -> "BLedger":
        return self + other.scale(-1)

    def __neg__(self) -> "BLedger":
        return self.scale(-1)

    def scale(self, c) -> "BLedger":
        c = Fraction(c)
        return BLedger({s: v * c for s, v in self.terms.items()})

    def shifted(self, a) -> "BLedger":
        return BLedger({s.shifted(a): v for s, v in self.terms.items()})

    def canonical(self) -> "BLedger":
        return BLedger(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> set:
        return {s.weight for s in self.terms}

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, BLedger) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{s}" if c != 1 else str(s) for s, c in self.terms.items())

    def to_json(self) -> list:
        return [[str(c), s.to_json()] for s, c in self.terms.items()]

    @classmethod
    def from_json(cls, doc: list) -> "BLedger":
        return cls([(BSymbol.from_json(s), Fraction(c)) for c, s in doc])


def _sum(ledgers: Iterable[BLedger]) -> BLedger:
    acc: list = []
    for x in ledgers:
        acc.extend(x.terms.items())
    return BLedger(acc)


# ---------------------------------------------------------------------------
# generators coming from geometry


def labelings(blocks: Sequence[Block]) -> Iterable[tuple]:
    """All ordered splittings of ``blocks`` into ``(I-, I0, I+)``."""
    blocks = list(blocks)
    for lab in itertools.product(range(3), repeat=len(blocks)):
        yield tuple(tuple(b for b, t in zip(blocks, lab) if t == r) for r in range(3))


def clarke_sum(blocks: Sequence[Block], stack: Iterable[Block], even_only: bool = True) -> BLedger:
    """Mirror-relation sum from the Clarke pair whose stacky directions are ``stack``.

    ``I0`` runs over subsets of ``stack`` and ``I-`` over subsets of the
    rest; each term is symmetrized in ``I-`` and ``I0``.
    """
    blocks = _blocks(blocks)
    stack = set(_blocks(stack))
    if not stack <= set(blocks):
        raise ValueError("stack blocks must belong to the partition")
    terms = []
    for minus, zero, plus in labelings(blocks):
        if even_only and len(plus) % 2:
            continue
        if set(zero) <= stack and not (set(minus) & stack):
            sym = BSymbol(minus, zero, plus)
            terms.append((sym, 1))
            terms.append((sym.swapped(), 1))
    return BLedger(terms)


def toric_sum(blocks: Sequence[Block]) -> BLedger:
    """All ``B[I-, I0, {}]`` with ``I- + I0`` the whole partition (the cover of the toric base)."""
    return BLedger([(BSymbol(m, z, p), 1) for m, z, p in labelings(_blocks(blocks)) if not p])


def labeled_target(minus: Sequence[Block], zero: Sequence[Block]) -> BLedger:
    s = BSymbol(minus, zero, ())
    return BLedger.of(s, s.swapped())


def grouped_target(blocks: Sequence[Block], a: int, b: int) -> BLedger:
    """``B_{a,b,0} + B_{b,a,0}`` summed over labelings of the blocks."""
    blocks = _blocks(blocks)
    if a + b != len(blocks):
        raise ValueError("a + b must equal the number of blocks")
    terms = []
    for minus in itertools.combinations(blocks, a):
        zero = tuple(x for x in blocks if x not in minus)
        s = BSymbol(minus, zero, ())
        terms += [(s, 1), (BSymbol(zero, minus, ()), 1)]
    return BLedger(terms)


def coarsenings(blocks: Sequence[Block]) -> list[tuple]:
    """All set partitions of the blocks, each merged into a tuple of blocks."""
    blocks = list(_blocks(blocks))

    def rec(rest):
        if not rest:
            yield []
            return
        first, tail = rest[0], rest[1:]
        for part in rec(tail):
            yield [[first]] + part
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1 :]

    out = set()
    for p in rec(blocks):
        out.add(tuple(sorted(tuple(sorted(a for b in grp for a in b)) for grp in p)))
    return sorted(out, key=lambda p: (-len(p), p))


def _partition_name(blocks: Sequence[Block]) -> str:
    return "|".join(block_name(b) for b in _blocks(blocks))


@dataclass
class Generator:
    id: str
    ledger: BLedger
    provenance: str
    hypothesis: bool = False


class MirrorGeneratorSet:
    """Ledgers known (or assumed) to satisfy the mirror relation, keyed by id."""

    def __init__(self):
        self.generators: dict[str, Generator] = {}

    def __contains__(self, gid: str) -> bool:
        return gid in self.generators

    def __getitem__(self, gid: str) -> Generator:
        return self.generators[gid]

    def __len__(self) -> int:
        return len(self.generators)

    def add(self, gen: Generator) -> str:
        old = self.generators.get(gen.id)
        if old is not None and old.ledger != gen.ledger:
            raise ValueError(f"generator id {gen.id} reused for a different ledger")
        self.generators.setdefault(gen.id, gen)
        return gen.id

    def clarke(self, blocks: Sequence[Block], stack: Iterable[Block]) -> str:
        blocks = _blocks(blocks)
        stack = _blocks(stack)
        gid = f"clarke[{_partition_name(blocks)};stack={_set_name(stack)}]"
        if gid not in self.generators:
            self.add(Generator(gid, clarke_sum(blocks, stack), "Clarke dual pair with the listed stacky parts"))
        return gid

    def toric(self, blocks: Sequence[Block]) -> str:
        blocks = _blocks(blocks)
        gid = f"toric[{_partition_name(blocks)}]"
        if gid not in self.generators:
            self.add(Generator(gid, toric_sum(blocks), "Hodge duality of the covers of the toric bases"))
        return gid

    def hypothesis(self, minus: Sequence[Block], zero: Sequence[Block]) -> str:
        minus, zero = _blocks(minus), _blocks(zero)
        if (len(minus), _set_name(minus)) > (len(zero), _set_name(zero)):
            minus, zero = zero, minus
        gid = f"hyp[{_set_name(minus)},{_set_name(zero)}]"
        if gid not in self.generators:
            self.add(
                Generator(
                    gid,
                    labeled_target(minus, zero),
                    "labeled statement assumed by the inductive step; not in the generator span",
                    hypothesis=True,
                )
            )
        return gid

    def geometric_closure(self, blocks: Sequence[Block]) -> list[str]:
        """Register every Clarke and toric generator over every coarsening."""
        ids = []
        for part in coarsenings(blocks):
            for r in range(len(part) + 1):
                for stack in itertools.combinations(part, r):
                    ids.append(self.clarke(part, stack))
            ids.append(self.toric(part))
        return ids

    def membership(self, target: BLedger, ids: Sequence[str] | None = None) -> "Certificate | None":
        """Exact rational membership of ``target`` in the span of shifted generators."""
        (w,) = target.weights() or {0}
        ids = list(self.generators) if ids is None else list(ids)
        cols = []
        for gid in ids:
            g = self.generators[gid]
            gw = g.ledger.weights()
            if len(gw) != 1:
                continue
            s = Fraction(w - next(iter(gw)), 2)
            cols.append((gid, s, g.ledger.shifted(s)))
        syms = sorted({s for _, _, led in cols for s in led.terms} | set(target.terms))
        if not set(target.terms) <= {s for _, _, led in cols for s in led.terms}:
            return None
        index = {s: i for i, s in enumerate(syms)}
        mat = [[Fraction(0)] * len(cols) for _ in syms]
        for j, (_, _, led) in enumerate(cols):
            for s, c in led.terms.items():
                mat[index[s]][j] = c
        rhs = [target.terms.get(s, Fraction(0)) for s in syms]
        x = solve(mat, rhs)
        if x is None:
            return None
        cert = Certificate(target)
        for (gid, s, _), c in zip(cols, x):
            if c:
                cert.add_term(gid, s, c)
        cert.route = "span"
        return cert


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    """``target = sum coef * generator(shift)``."""

    target: BLedger
    terms: dict = field(default_factory=dict)
    route: str = "replay"
    label: str = ""

    def add_term(self, gid: str, s, c) -> None:
        key = (gid, Fraction(s))
        v = self.terms.get(key, Fraction(0)) + Fraction(c)
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def hypotheses(self, gens: MirrorGeneratorSet) -> list[str]:
        return sorted({g for g, _ in self.terms if gens[g].hypothesis})

    def conditional(self, gens: MirrorGeneratorSet) -> bool:
        return bool(self.hypotheses(gens))

    def expand(self, gens: MirrorGeneratorSet) -> BLedger:
        return _sum(gens[g].ledger.shifted(s).scale(c) for (g, s), c in self.terms.items())

    def verify(self, gens: MirrorGeneratorSet) -> bool:
        return self.expand(gens) == self.target

    def to_json(self, gens: MirrorGeneratorSet) -> dict:
        return {
            "label": self.label,
            "route": self.route,
            "conditional": self.conditional(gens),
            "hypotheses": self.hypotheses(gens),
            "terms": [[str(c), g, str(s)] for (g, s), c in sorted(self.terms.items())],
            "target": self.target.to_json(),
        }


class _Combo:
    """Linear combination of shifted generators, before it is tied to a target."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = dict(terms or {})

    @classmethod
    def gen(cls, gid: str, s=0) -> "_Combo":
        return cls({(gid, Fraction(s)): Fraction(1)})

    def __add__(self, other: "_Combo") -> "_Combo":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return _Combo({k: v for k, v in out.items() if v})

    def __sub__(self, other: "_Combo") -> "_Combo":
        return self + other.scale(-1)

    def scale(self, c) -> "_Combo":
        c = Fraction(c)
        return _Combo({k: v * c for k, v in self.terms.items() if v * c})

    def shifted(self, a) -> "_Combo":
        a = Fraction(a)
        return _Combo({(g, s + a): v for (g, s), v in self.terms.items()})


def _total(combos: Iterable[_Combo]) -> _Combo:
    out = _Combo()
    for c in combos:
        out = out + c
    return out


class _Replay:
    """The inductive argument, replayed on labeled block partitions."""

    def __init__(self, gens: MirrorGeneratorSet):
        self.gens = gens
        self._labeled: dict = {}
        self._grouped: dict = {}

    def clarke(self, blocks, stack) -> _Combo:
        return _Combo.gen(self.gens.clarke(blocks, stack))

    def T(self, blocks, p: int) -> _Combo:
        """Sum of Clarke generators with ``p`` non-stacky parts.

        For ``p = n/2`` only stack sets containing the first block are used,
        which is half of ``T(n, n/2)`` because complementary stack sets give
        the same ledger.
        """
        blocks = _blocks(blocks)
        n = len(blocks)
        out = _Combo()
        for stack in itertools.combinations(blocks, n - p):
            if 2 * p == n and blocks[0] not in stack:
                continue
            out = out + self.clarke(blocks, stack)
        return out.scale(2) if 2 * p == n else out

    def labeled(self, minus, zero) -> _Combo:
        minus, zero = _blocks(minus), _blocks(zero)
        key = (minus, zero)
        if key in self._labeled:
            return self._labeled[key]
        blocks = _blocks(minus + zero)
        n = len(blocks)
        a, b = len(minus), len(zero)
        if min(a, b) == 0:
            res = self.grouped(blocks, n, 0)
        elif n == 2:
            # the grouped (1,1) target lists this labeled pair twice
            res = self.grouped(blocks, 1, 1).scale(Fraction(1, 2))
        elif a >= 2 and b >= 2:
            s1 = (tuple(sorted(x for blk in minus for x in blk)),)
            s2 = (tuple(sorted(x for blk in zero for x in blk)),)
            w1 = self.labeled(minus, s2).shifted(Fraction(b - 1, 2))
            w2 = self.labeled(zero, s1).shifted(Fraction(a - 1, 2))
            w12 = self.labeled(s1, s2).shifted(Fraction(n - 2, 2))
            res = w1 + w2 - w12
        elif n == 3:
            single = minus if a == 1 else zero
            res = self.clarke(blocks, single) - self.clarke(blocks, blocks) + self.grouped(blocks, 3, 0)
        else:
            res = _Combo.gen(self.gens.hypothesis(minus, zero))
        self._labeled[key] = res
        return res

    def grouped(self, blocks, a: int, b: int) -> _Combo:
        blocks = _blocks(blocks)
        a, b = max(a, b), min(a, b)
        key = (blocks, a, b)
        if key in self._grouped:
            return self._grouped[key]
        n = len(blocks)
        if a + b != n:
            raise ValueError("a + b must equal the number of blocks")
        if b >= 2:
            res = _total(
                self.labeled(m, tuple(x for x in blocks if x not in m)) for m in itertools.combinations(blocks, a)
            )
        else:
            X, Y = self._binomial(blocks)
            res = X if b == 0 else Y
        self._grouped[key] = res
        return res

    def _binomial(self, blocks) -> tuple:
        n = len(blocks)
        tot = _Combo.gen(self.gens.toric(blocks))
        mids = range(2, n // 2 + 1)
        G = {c: self.grouped(blocks, n - c, c) for c in mids}
        if n % 2 == 0:
            alt = _total(self.T(blocks, p).scale((-1) ** p) for p in range(n // 2 + 1))
            alt = alt - self.T(blocks, n // 2).scale(Fraction((-1) ** (n // 2), 2))
            if n == 2:
                # the middle term is Y itself: alt = X - Y/2, tot = X + Y/2
                return (alt + tot).scale(Fraction(1, 2)), tot - alt
            half = lambda c: Fraction(1, 2) if 2 * c == n else 1  # noqa: E731
            r_alt = _total(G[c].scale((-1) ** c * half(c)) for c in mids)
            r_tot = _total(G[c].scale(half(c)) for c in mids)
            X = (alt + tot - r_alt - r_tot).scale(Fraction(1, 2))
            Y = (tot - alt + r_alt - r_tot).scale(Fraction(1, 2))
            return X, Y
        odd = _total(self.T(blocks, p).scale((-1) ** p * (n - 2 * p)) for p in range(n // 2 + 1))
        r_odd = _total(G[c].scale((-1) ** c * (n - 2 * c)) for c in mids)
        r_tot = _total(G[c] for c in mids)
        U = odd - r_odd
        V = tot - r_tot
        X = (U + V.scale(n - 2)).scale(Fraction(1, 2 * n - 2))
        Y = (V.scale(n) - U).scale(Fraction(1, 2 * n - 2))
        return X, Y


def _atoms(n: int) -> tuple:
    return tuple((i,) for i in range(1, n + 1))


@dataclass
class HdualDerivation:
    k: int
    generators: MirrorGeneratorSet
    certificates: list
    verified: bool

    def unconditional_up_to(self) -> int:
        top = 1
        for n in range(2, self.k + 1):
            if any(c.conditional(self.generators) for c in self.certificates if _cert_size(c) == n):
                break
            top = n
        return top

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "verified": self.verified,
            "unconditional_up_to": self.unconditional_up_to(),
            "hypotheses": sorted({h for c in self.certificates for h in c.hypotheses(self.generators)}),
            "certificates": [c.to_json(self.generators) for c in self.certificates],
        }


def _cert_size(c: Certificate) -> int:
    return len(next(iter(c.target.terms)).atoms()) if c.target.terms else 0


def derive_hdual(k: int, bound: int = 8) -> HdualDerivation:
    """Certificates for ``B_{a,b,0} + B_{b,a,0}`` on ``n`` parts for every ``2 <= n <= k``.

    Also emits the labeled three-part identities ``B[{i,j},{k}] + B[{k},{i,j}]``.
    Every certificate is expanded and compared with its target.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > bound:
        raise ValueError(f"k = {k} exceeds the configured bound {bound}")
    gens = MirrorGeneratorSet()
    replay = _Replay(gens)
    certs = []
    for n in range(2, k + 1):
        blocks = _atoms(n)
        for b in range(n // 2 + 1):
            a = n - b
            combo = replay.grouped(blocks, a, b)
            cert = Certificate(grouped_target(blocks, a, b), dict(combo.terms), label=f"n={n} ({a},{b})")
            certs.append(cert)
        if n == 3:
            for i in blocks:
                rest = tuple(x for x in blocks if x != i)
                combo = replay.labeled(rest, (i,))
                certs.append(
                    Certificate(labeled_target(rest, (i,)), dict(combo.terms), label=f"n=3 labeled {_set_name(rest)},{{{i[0]}}}")
                )
    ok = all(c.verify(gens) for c in certs)
    if not ok:
        bad = [c.label for c in certs if not c.verify(gens)]
        raise ArithmeticError(f"certificates failed to re-expand: {bad}")
    return HdualDerivation(k, gens, certs, ok)


def verify_certificate_json(doc: dict) -> bool:
    """Rebuild the generators named in a certificate document and re-expand it."""
    gens = MirrorGeneratorSet()
    target = BLedger.from_json(doc["target"])
    cert = Certificate(target, route=doc.get("route", "replay"), label=doc.get("label", ""))
    for c, gid, s in doc["terms"]:
        _register_from_id(gens, gid)
        cert.add_term(gid, Fraction(s), Fraction(c))
    return cert.verify(gens)


def _parse_blocks(text: str) -> tuple:
    text = text.strip("{}")
    if not text:
        return ()
    return tuple(tuple(int(a) for a in part.split("+")) for part in text.split(","))


def _register_from_id(gens: MirrorGeneratorSet, gid: str) -> None:
    head, body = gid.split("[", 1)
    body = body[:-1]
    if head == "toric":
        gens.toric(tuple(tuple(int(a) for a in b.split("+")) for b in body.split("|")))
    elif head == "clarke":
        part, stack = body.split(";stack=")
        gens.clarke(tuple(tuple(int(a) for a in b.split("+")) for b in part.split("|")), _parse_blocks(stack))
    elif head == "hyp":
        left, right = body.split("},{")
        gens.hypothesis(_parse_blocks(left + "}"), _parse_blocks("{" + right))
    else:
        raise ValueError(f"unknown generator id {gid}")


# ---------------------------------------------------------------------------
# grouped sums and the binomial identities


def _grouped_labeled_counts(k: int, a: int, b: int, c: int) -> dict:
    """Labeled expansion of the grouped symbol ``B_{a,b,c}`` as masks ``(minus, zero)``."""
    out = {}
    atoms = range(k)
    for minus in itertools.combinations(atoms, a):
        rest = [x for x in atoms if x not in minus]
        for zero in itertools.combinations(rest, b):
            key = (sum(1 << x for x in minus), sum(1 << x for x in zero))
            out[key] = out.get(key, 0) + 1
    return out


def _add_into(acc: dict, part: Mapping, c) -> None:
    for key, v in part.items():
        acc[key] = acc.get(key, 0) + c * v


def _t_counts(k: int, p: int) -> dict:
    acc: dict = {}
    for n in range(p + 1):
        for i in range(0, k - n + 1, 2):
            if i < p - n:
                continue
            coef = comb(i, p - n)
            if not coef:
                continue
            _add_into(acc, _grouped_labeled_counts(k, k - n - i, n, i), coef)
            _add_into(acc, _grouped_labeled_counts(k, n, k - n - i, i), coef)
    return {key: v for key, v in acc.items() if v}


def _clarke_counts(k: int, p: int) -> dict:
    """``sum_{|J| = p} S_J`` by brute force over ``J`` (``J`` holds ``I-``, its complement ``I0``)."""
    acc: dict = {}
    full = (1 << k) - 1
    for J in itertools.combinations(range(k), p):
        jm = sum(1 << x for x in J)
        jc = full ^ jm
        sub = jm
        while True:
            sub0 = jc
            while True:
                plus = full ^ sub ^ sub0
                if bin(plus).count("1") % 2 == 0:
                    for key in ((sub, sub0), (sub0, sub)):
                        acc[key] = acc.get(key, 0) + 1
                if sub0 == 0:
                    break
                sub0 = (sub0 - 1) & jc
            if sub == 0:
                break
            sub = (sub - 1) & jm
    return acc


def _mask_ledger(counts: Mapping, k: int) -> BLedger:
    terms = []
    for (m, z), c in counts.items():
        minus = [(i + 1,) for i in range(k) if m >> i & 1]
        zero = [(i + 1,) for i in range(k) if z >> i & 1]
        plus = [(i + 1,) for i in range(k) if not ((m | z) >> i & 1)]
        terms.append((BSymbol(minus, zero, plus), c))
    return BLedger(terms)


def grouped_sum(k: int, p: int) -> BLedger:
    """``T(k, p)`` expanded over labeled symbols."""
    if not 0 <= p <= k // 2:
        raise ValueError("need 0 <= p <= k/2")
    return _mask_ledger(_t_counts(k, p), k)


@dataclass
class BinomialReport:
    k: int
    case: str
    passed: bool
    t_lemma: bool
    lhs_terms: int
    rhs_terms: int
    mismatches: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "case": self.case,
            "passed": self.passed,
            "t_lemma": self.t_lemma,
            "lhs_terms": self.lhs_terms,
            "rhs_terms": self.rhs_terms,
            "mismatches": self.mismatches[:10],
        }


def verify_binomial_identities(k: int) -> BinomialReport:
    """Check the even or odd identity between ``T(k, p)`` and ``B_{a,b,0}`` by expansion.

    Also checks that the closed formula for ``T(k, p)`` agrees with the
    brute-force sum of Clarke generators over ``|J| = p``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    T = {p: _t_counts(k, p) for p in range(k // 2 + 1)}
    t_ok = all(T[p] == _clarke_counts(k, p) for p in T)
    lhs: dict = {}
    rhs: dict = {}
    if k % 2 == 0:
        case = "even"
        for p, counts in T.items():
            _add_into(lhs, counts, (-1) ** p)
        _add_into(lhs, T[k // 2], Fraction(-((-1) ** (k // 2)), 2))
        for a in range(k + 1):
            _add_into(rhs, _grouped_labeled_counts(k, k - a, a, 0), (-1) ** a)
    else:
        case = "odd"
        for p, counts in T.items():
            _add_into(lhs, counts, (-1) ** p * (k - 2 * p))
        for a in range(k // 2 + 1):
            w = (-1) ** a * (k - 2 * a)
            _add_into(rhs, _grouped_labeled_counts(k, k - a, a, 0), w)
            _add_into(rhs, _grouped_labeled_counts(k, a, k - a, 0), w)
    lhs = {key: v for key, v in lhs.items() if v}
    rhs = {key: v for key, v in rhs.items() if v}
    bad = sorted(key for key in set(lhs) | set(rhs) if lhs.get(key, 0) != rhs.get(key, 0))
    return BinomialReport(k, case, not bad and t_ok, t_ok, len(lhs), len(rhs), [list(b) for b in bad])


# ---------------------------------------------------------------------------
# numeric evaluation on small bases


class NotComputable(UnsupportedDimension):
    pass


@dataclass
class _BaseModel:
    """Per-block evaluation data for one side of a nef partition."""

    kind: str
    degrees: dict  # atom -> branch degree (curve) or factor index (product surface)
    factor_degrees: dict = field(default_factory=dict)
    dim: int = 1


def _base_model(cover) -> _BaseModel:
    if cover.base_dim == 1:
        return _BaseModel("curve", {i + 1: b for i, b in enumerate(cover.branch_degrees())}, dim=1)
    if cover.base_dim == 2:
        rays = [tuple(r) for r in cover.base.rays]
        axes = {(1, 0): 0, (-1, 0): 0, (0, 1): 1, (0, -1): 1}
        if sorted(rays) != sorted(axes):
            raise NotComputable("surface bases are evaluated only when they split as P1 x P1")
        owner = {}
        fdeg = {}
        for i, div in enumerate(cover.divisors):
            facs = {axes[rays[r]] for r in div}
            if len(facs) != 1:
                raise NotComputable("a part is not pulled back from one P1 factor")
            (f,) = facs
            if f in fdeg:
                raise NotComputable("two parts live on the same factor")
            owner[i + 1] = f
            fdeg[f] = 2 * sum(div.values())
        return _BaseModel("product", owner, fdeg, dim=2)
    raise NotComputable("B symbols are evaluated over curves and P1 x P1 only")


def evaluate_symbol(sym: BSymbol, model: _BaseModel) -> HodgeDiamond:
    """Diamond of ``B[I-, I0, I+](s)``: the ``I-`` summand over ``Z^{I+}``, shifted by ``|I0|/2 + s``."""
    n0 = len(sym.zero)
    extra = Fraction(n0, 2) + sym.shift
    if model.kind == "curve":
        deg = {b: sum(model.degrees[a] for a in b) for b in sym.minus + sym.plus}
        order = list(sym.minus + sym.plus)
        degrees = [deg[b] for b in order]
        body = lg_summand_curve(degrees, range(len(sym.minus)), range(len(order)))
    else:
        for b in sym.minus + sym.plus:
            if len(b) > 1:
                raise NotComputable("merged I- or I+ parts are not products over P1 x P1")
        role = {}
        for b in sym.minus:
            role[model.degrees[b[0]]] = "-"
        for b in sym.plus:
            role[model.degrees[b[0]]] = "+"
        body = HodgeDiamond.point()
        for f in sorted(model.factor_degrees):
            r = role.get(f, "0")
            if r == "+":
                part = local_cohomology_diamond(projective_line(), PointsInCurve(model.factor_degrees[f]), 1)
            elif r == "-":
                part = shift_diamond(ev_coinvariant_curve(model.factor_degrees[f]), Fraction(1, 2), 1)
            else:
                part = projective_line()
            body = kunneth(body, part)
    if (2 * extra).denominator != 1:
        raise ValueError("non half-integral shift")
    return shift_diamond(body, extra, int(2 * extra))


@dataclass
class MirrorCheckReport:
    d: int
    weight: int
    passed: bool
    rows: list
    note: str = ""

    def to_json(self) -> dict:
        return {"d": self.d, "weight": self.weight, "passed": self.passed, "rows": [list(r) for r in self.rows], "note": self.note}

    def table(self) -> str:
        lines = [f"d = {self.d}, weight = {self.weight}", "2lam 2mu  left  right"]
        for a, b, l, r in self.rows:
            lines.append(f"{a:>4} {b:>3} {l:>5} {r:>6}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _signed(ledger: BLedger, model: _BaseModel) -> dict:
    acc: dict = {}
    for sym, c in ledger.terms.items():
        for key, v in evaluate_symbol(sym, model).entries.items():
            acc[key] = acc.get(key, 0) + c * v
    return {k: v for k, v in acc.items() if v}


def numeric_mirror_check(ledger: BLedger, np, d: int | None = None) -> MirrorCheckReport:
    """Evaluate both sides of the mirror relation for ``ledger`` on a nef partition."""
    from .nefclarke import cover_spec_from_pieces, dual_nef_partition

    d = np.delta.rank if d is None else d
    if ledger.is_zero():
        return MirrorCheckReport(d, 0, True, [], "empty ledger")
    weights = ledger.weights()
    if len(weights) != 1:
        raise ValueError("ledger mixes weights")
    (w,) = weights
    atoms = set().union(*(s.atoms() for s in ledger.terms))
    if atoms != set(range(1, np.k + 1)):
        raise ValueError("ledger atoms must be exactly the parts 1..k")
    left_model = _base_model(cover_spec_from_pieces(np.pieces()))
    right_model = _base_model(cover_spec_from_pieces(dual_nef_partition(np).pieces))
    left = _signed(ledger, left_model)
    right = _signed(ledger, right_model)
    c = 2 * (d + w)
    keys = sorted(set(left) | {(c - a, b) for a, b in right})
    rows = [(a, b, left.get((a, b), 0), right.get((c - a, b), 0)) for a, b in keys]
    passed = all(l == r for _, _, l, r in rows)
    return MirrorCheckReport(d, w, passed, [(a, b, str(l), str(r)) for a, b, l, r in rows])


__all__ = [
    "BLedger",
    "BSymbol",
    "BinomialReport",
    "Certificate",
    "Generator",
    "HdualDerivation",
    "MirrorCheckReport",
    "MirrorGeneratorSet",
    "NotComputable",
    "clarke_sum",
    "coarsenings",
    "contraction",
    "derive_hdual",
    "evaluate_symbol",
    "grouped_sum",
    "grouped_target",
    "labeled_target",
    "numeric_mirror_check",
    "toric_sum",
    "verify_binomial_identities",
    "verify_certificate_json",
]
