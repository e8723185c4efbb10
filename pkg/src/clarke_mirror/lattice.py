"""Exact integer and rational linear algebra.

Everything here works on Python ints and ``fractions.Fraction``; there is no
floating point anywhere.  Matrices are plain lists of rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

N_LATTICE = "N"
M_LATTICE = "M"


class LatticeError(ValueError):
    """Raised on rank or lattice-tag mismatches."""


def dual_tag(tag: str) -> str:
    if tag == N_LATTICE:
        return M_LATTICE
    if tag == M_LATTICE:
        return N_LATTICE
    raise LatticeError(f"unknown lattice tag {tag!r}")


@dataclass(frozen=True, order=True)
class LatticeVector:
    """A vector in N or in its dual M.

    Coordinates may be rational so that polytope vertices such as
    ``(1, -1/2)`` can be represented; ``is_integral`` tells lattice points
    apart from the rest.
    """

    coords: tuple
    lattice: str = N_LATTICE

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_normalize(c) for c in self.coords))
        dual_tag(self.lattice)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coords)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        _check_same(self, other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        _check_same(self, other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords), self.lattice)

    def scale(self, factor) -> "LatticeVector":
        return LatticeVector(tuple(factor * a for a in self.coords), self.lattice)


def _normalize(value):
    """Store integral rationals as ints so equality and hashing are canonical."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, int):
        return value
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


def _check_same(a: LatticeVector, b: LatticeVector) -> None:
    if a.lattice != b.lattice or a.rank != b.rank:
        raise LatticeError("vectors live in different lattices")


def pair(n: LatticeVector, m: LatticeVector):
    """The natural pairing between N and M."""
    if n.rank != m.rank:
        raise LatticeError(f"rank mismatch: {n.rank} vs {m.rank}")
    if m.lattice != dual_tag(n.lattice):
        raise LatticeError("pairing needs one vector from N and one from M")
    return _normalize(sum(a * b for a, b in zip(n.coords, m.coords)))


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# integer matrices


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def smith_normal_form(matrix: Sequence[Sequence[int]]):
    """Smith normal form with transforms.

    Returns ``(U, D, V)`` with ``U @ A @ V == D``, ``U`` and ``V`` unimodular,
    ``D`` diagonal with nonnegative entries each dividing the next.
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):
        # row[dst] += k * row[src]
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        # pick the smallest nonzero entry of the remaining block as pivot
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    add_row(t, i, -q)
                if a[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    add_col(t, j, -q)
                if a[t][j]:
                    clean = False
            if not clean:
                continue
            # enforce divisibility of the rest of the block by the pivot
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v


def diagonal(d: Sequence[Sequence[int]]) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def determinant(matrix: Sequence[Sequence]) -> Fraction | int:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                val = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = val // prev if isinstance(val, int) and isinstance(prev, int) else Fraction(val) / prev
        prev = a[k][k]
    return _normalize(sign * a[n - 1][n - 1])


# ---------------------------------------------------------------------------
# rational linear algebra


def row_echelon(matrix: Sequence[Sequence], pivot_order: Sequence[int] | None = None):
    """Reduced row echelon form over Q.

    ``pivot_order`` lists the column indices in the order in which pivots are
    searched; it defaults to left to right.  Returns ``(rows, pivots)`` where
    ``pivots[i]`` is the pivot column of ``rows[i]``.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    order = list(range(ncols)) if pivot_order is None else list(pivot_order)
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == len(rows):
            break
        pick = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pick is None:
            continue
        rows[r], rows[pick] = rows[pick], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(row_echelon(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """A basis of {x : A x = 0} over Q."""
    if not matrix:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows, pivots = row_echelon(matrix)
    n = len(matrix[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One rational solution of A x = b, or None when inconsistent."""
    if not matrix:
        return [] if all(b == 0 for b in rhs) else None
    n = len(matrix[0])
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = row_echelon(aug, pivot_order=range(n))
    x = [Fraction(0)] * n
    for row, p in zip(rows, pivots):
        x[p] = row[n]
    for row in aug:
        if dot(row[:n], x) != row[n]:
            return None
    return x


def primitive(vector: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integral vector on its ray."""
    fr = [Fraction(x) for x in vector]
    den = 1
    for x in fr:
        den = den * x.denominator // _gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = _gcd(g, x)
    if g == 0:
        raise LatticeError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def _gcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def hermite_normal_form(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite form ``U A`` with ``U`` unimodular.

    Pivots are positive, entries above a pivot are reduced into ``[0, pivot)``,
    and zero rows come last.  Two matrices have the same form exactly when
    they differ by a left unimodular factor.
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, m):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                if a[i][c]:
                    done = False
            if done:
                break
        if not a[r][c]:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return a


def integer_solution(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int] | None:
    """An integral solution of A x = b, using the Smith form, or None."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    u, d, v = smith_normal_form(matrix)
    c = [sum(u[i][j] * rhs[j] for j in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % di:
                return None
            y[i] = c[i] // di
    return [sum(v[i][j] * y[j] for j in range(n)) for i in range(n)]


# ---------------------------------------------------------------------------
# exact linear programming


@dataclass(frozen=True)
class Inequality:
    """``coeffs . x <= rhs`` (strict when ``strict`` is set)."""

    coeffs: tuple
    rhs: Fraction
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def holds(self, point: Sequence) -> bool:
        lhs = dot(self.coeffs, point)
        return lhs < self.rhs if self.strict else lhs <= self.rhs


def leq(coeffs, rhs, strict: bool = False) -> Inequality:
    return Inequality(tuple(coeffs), rhs, strict)


def geq(coeffs, rhs, strict: bool = False) -> Inequality:
    return Inequality(tuple(-Fraction(c) for c in coeffs), -Fraction(rhs), strict)


@dataclass
class LPResult:
    """Outcome of :func:`lp_feasible`.

    Exactly one of ``point`` (a verified feasible point) and ``certificate``
    (nonnegative multipliers ``y`` with ``y A = 0`` and either ``y b < 0`` or
    ``y b <= 0`` with positive weight on a strict row) is set.
    """

    feasible: bool
    point: list[Fraction] | None = None
    certificate: list[Fraction] | None = None
    constraints: list[Inequality] = field(default_factory=list)

    def verify(self) -> bool:
        if self.feasible:
            return self.point is not None and all(c.holds(self.point) for c in self.constraints)
        return verify_farkas(self.constraints, self.certificate)


def verify_farkas(constraints: Sequence[Inequality], y: Sequence[Fraction] | None) -> bool:
    if y is None or len(y) != len(constraints) or any(v < 0 for v in y):
        return False
    if not constraints:
        return False
    n = len(constraints[0].coeffs)
    for j in range(n):
        if sum(yi * c.coeffs[j] for yi, c in zip(y, constraints)) != 0:
            return False
    yb = sum(yi * c.rhs for yi, c in zip(y, constraints))
    strict_weight = sum(yi for yi, c in zip(y, constraints) if c.strict)
    return yb < 0 or (yb <= 0 and strict_weight > 0)


def _simplex(c: Sequence[Fraction], a_eq: Sequence[Sequence[Fraction]], b_eq: Sequence[Fraction]):
    """Maximize ``c.x`` over ``{x >= 0 : A x = b}``; two phases, Bland's rule.

    Returns ``(status, x, value)`` with status in {"optimal", "unbounded",
    "infeasible"}.
    """
    m = len(a_eq)
    n = len(c)
    rows = []
    for row, b in zip(a_eq, b_eq):
        row = [Fraction(x) for x in row]
        b = Fraction(b)
        if b < 0:
            row = [-x for x in row]
            b = -b
        rows.append(row + [Fraction(int(i == len(rows))) for i in range(m)] + [b])
    total = n + m
    basis = [n + i for i in range(m)]

    def pivot(r, col):
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        basis[r] = col

    def run(obj, allowed):
        # obj: list over all columns; maximize obj . x
        while True:
            reduced = []
            for j in range(total):
                if j in basis or not allowed(j):
                    continue
                rc = obj[j] - sum(obj[basis[i]] * rows[i][j] for i in range(m))
                if rc > 0:
                    reduced.append(j)
            if not reduced:
                return "optimal"
            col = min(reduced)  # Bland
            best = None
            for i in range(m):
                if rows[i][col] > 0:
                    ratio = rows[i][-1] / rows[i][col]
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            pivot(best[1], col)

    phase1 = [Fraction(0)] * n + [Fraction(-1)] * m
    run(phase1, lambda j: True)
    if sum(rows[i][-1] for i in range(m) if basis[i] >= n) != 0:
        return "infeasible", None, None
    # drive artificial variables out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0), None)
            if col is not None:
                pivot(i, col)
    obj = [Fraction(x) for x in c] + [Fraction(0)] * m
    status = run(obj, lambda j: j < n)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][-1]
    if status == "unbounded":
        return "unbounded", x, None
    return "optimal", x, dot(c, x)


def lp_maximize(
    objective: Sequence,
    constraints: Sequence[Inequality],
    bound: Fraction | None = None,
    l1_penalty: bool = False,
):
    """Maximize over free variables subject to non-strict inequalities.

    With ``l1_penalty`` the objective becomes ``objective.x - |x|_1``, which
    picks the feasible point closest to the origin when ``objective`` is 0.
    Returns ``(status, point, value)``.  Strictness flags are ignored here.
    """
    if not constraints:
        raise ValueError("need at least one constraint to fix the dimension")
    n = len(constraints[0].coeffs)
    cons = list(constraints)
    if bound is not None:
        cons = cons + [leq(objective, bound)]
    # variables: x_plus (n), x_minus (n), slacks (len(cons))
    a_eq = []
    b_eq = []
    k = len(cons)
    for idx, con in enumerate(cons):
        row = list(con.coeffs) + [-x for x in con.coeffs] + [Fraction(int(i == idx)) for i in range(k)]
        a_eq.append(row)
        b_eq.append(con.rhs)
    pen = Fraction(1 if l1_penalty else 0)
    c = [Fraction(x) - pen for x in objective] + [-Fraction(x) - pen for x in objective] + [Fraction(0)] * k
    status, z, _ = _simplex(c, a_eq, b_eq)
    if z is None:
        return status, None, None
    point = [z[i] - z[n + i] for i in range(n)]
    return status, point, dot(objective, point)


def lp_feasible(constraints: Iterable[Inequality]) -> LPResult:
    """Decide feasibility of a mixed strict/non-strict system exactly.

    A strict row ``a.x < b`` is handled by maximizing a common margin ``t``
    with ``a.x + t <= b`` and ``t <= 1``; the system is feasible iff the
    optimum is positive.  Infeasible systems come with a Motzkin-type
    certificate found by a second LP.
    """
    cons = list(constraints)
    if not cons:
        return LPResult(True, [], None, cons)
    n = len(cons[0].coeffs)
    if any(len(c.coeffs) != n for c in cons):
        raise ValueError("constraints disagree on the number of variables")
    lifted = [
        Inequality(c.coeffs + (Fraction(1) if c.strict else Fraction(0),), c.rhs) for c in cons
    ]
    lifted.append(Inequality((Fraction(0),) * n + (Fraction(1),), Fraction(1)))
    if not any(c.strict for c in cons):
        lifted.append(Inequality((Fraction(0),) * n + (Fraction(-1),), Fraction(0)))
    objective = [Fraction(0)] * n + [Fraction(1)]
    status, point, value = lp_maximize(objective, lifted)
    if status == "optimal" and (value > 0 or not any(c.strict for c in cons)):
        # re-solve with the margin pinned to pick the point nearest the origin
        margin = value if any(c.strict for c in cons) else Fraction(0)
        pinned = [
            Inequality(c.coeffs, c.rhs - (margin if c.strict else 0)) for c in cons
        ]
        _, point, _ = lp_maximize([Fraction(0)] * n, pinned, l1_penalty=True)
        result = LPResult(True, point, None, cons)
        if not result.verify():
            raise AssertionError("simplex produced a point violating the constraints")
        return result
    cert = _motzkin_certificate(cons)
    result = LPResult(False, None, cert, cons)
    if not result.verify():
        raise AssertionError("could not certify infeasibility")
    return result


def _motzkin_certificate(cons: Sequence[Inequality]) -> list[Fraction] | None:
    # y >= 0, y A = 0, y.b <= 0, -y.b + sum_{strict} y = 1
    k = len(cons)
    n = len(cons[0].coeffs)
    a_eq = []
    b_eq = []
    for j in range(n):
        a_eq.append([c.coeffs[j] for c in cons] + [Fraction(0)])
        b_eq.append(Fraction(0))
    # y.b + s = 0 with slack s >= 0 encodes y.b <= 0
    a_eq.append([c.rhs for c in cons] + [Fraction(1)])
    b_eq.append(Fraction(0))
    a_eq.append([-c.rhs + (1 if c.strict else 0) for c in cons] + [Fraction(0)])
    b_eq.append(Fraction(1))
    status, z, _ = _simplex([Fraction(0)] * (k + 1), a_eq, b_eq)
    if status == "infeasible":
        return None
    return z[:k]
