from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clarke_mirror import fixtures
from clarke_mirror.fan import Fan, triangulated_spanning_fan
from clarke_mirror.hodge import (
    HodgeDiamond,
    MemoryBudgetExceeded,
    NodalCurveInSurface,
    PointsInCurve,
    UnsupportedDimension,
    WholeSpace,
    curve_diamond,
    ev_coinvariant_curve,
    ev_coinvariant_diamond,
    galois_cover_diamond,
    koszul_oracle,
    kunneth,
    lg_diamond,
    lg_diamond_curve,
    local_cohomology_diamond,
    newton_spectrum,
    poincare_lefschetz,
    projective_line,
    riemann_hurwitz_genus,
    shift,
    surface_log_euler_characteristics,
    toric_diamond,
)
from clarke_mirror.nefclarke import build_cover_spec, build_lg_model
from clarke_mirror.polytope import NewtonLevel, Polytope, PolytopeError

P1 = projective_line()
HALF = Fraction(1, 2)


def diamonds():
    entry = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
    return st.dictionaries(entry, st.integers(1, 5), max_size=5).map(
        lambda d: HodgeDiamond({0: d}) if d else HodgeDiamond()
    )


def test_diamond_keys_are_doubled():
    d = HodgeDiamond.from_entries({(HALF, HALF): 1, (1, 1): 4})
    assert d.entries == {(1, 1): 1, (2, 2): 4}
    assert d.get(HALF, HALF, degree=1) == 1
    assert d.get(1, 1) == 4
    assert d.total() == 5


def test_diamond_rejects_negative_and_non_half_integers():
    with pytest.raises(ValueError):
        HodgeDiamond({0: {(0, 0): -1}})
    with pytest.raises(ValueError):
        HodgeDiamond.from_entries({(Fraction(1, 3), 0): 1})


def test_diamond_json_and_table():
    d = HodgeDiamond.from_entries({(HALF, HALF): 1, (1, 1): 4, (Fraction(3, 2), Fraction(3, 2)): 1})
    assert HodgeDiamond.from_json(d.to_json()) == d
    assert "3/2" in d.table()


def test_shift_examples():
    assert shift(P1, 0) == P1
    moved = shift(P1, HALF)
    assert moved.as_fraction_entries() == {(HALF, HALF): 1, (Fraction(3, 2), Fraction(3, 2)): 1}
    assert shift(shift(P1, HALF), HALF) == shift(P1, 1)


def test_kunneth_examples():
    assert kunneth(P1, HodgeDiamond.point()) == P1
    quadratic = HodgeDiamond({1: {(1, 1): 1}})
    assert kunneth(quadratic, P1) == shift(P1, HALF, 1)
    assert kunneth(P1, P1).entries == {(0, 0): 1, (2, 2): 2, (4, 4): 1}


@given(diamonds(), diamonds(), diamonds())
def test_kunneth_is_a_commutative_monoid(a, b, c):
    assert kunneth(a, b) == kunneth(b, a)
    assert kunneth(kunneth(a, b), c) == kunneth(a, kunneth(b, c))
    assert kunneth(a, HodgeDiamond.point()) == a


@given(diamonds(), st.integers(-3, 3), st.integers(-3, 3))
def test_shift_composes_and_keeps_total(a, x, y):
    alpha, beta = Fraction(x, 2), Fraction(y, 2)
    assert shift(shift(a, alpha), beta) == shift(a, alpha + beta)
    assert shift(a, alpha).total() == a.total()


@given(diamonds(), diamonds())
def test_addition_is_monotone(a, b):
    assert a <= a + b
    assert (a + b).total() == a.total() + b.total()


def test_toric_diamonds():
    p1_fan = Fan([(1,), (-1,)], [(0,), (1,)])
    p2_fan = Fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
    f1_fan = Fan([(1, 0), (0, 1), (-1, 1), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert toric_diamond(p1_fan) == P1
    assert toric_diamond(p2_fan).entries == {(0, 0): 1, (2, 2): 1, (4, 4): 1}
    assert toric_diamond(f1_fan).entries == {(0, 0): 1, (2, 2): 2, (4, 4): 1}


@pytest.mark.parametrize("pid", ["r04", "r05a", "r06b", "r08a"])
def test_toric_euler_characteristic_is_ray_count(pid):
    fan = triangulated_spanning_fan(fixtures.polygon(pid))
    assert toric_diamond(fan).total() == len(fan.rays)


def test_toric_diamond_rejects_incomplete_fans():
    with pytest.raises(ValueError):
        toric_diamond(Fan([(1, 0), (0, 1)], [(0, 1)]))
    with pytest.raises(ValueError):
        toric_diamond(Fan([(1, 0), (1, 2), (-1, 0)], [(0, 1), (1, 2), (2, 0)]))


def test_local_cohomology_of_points_in_p1():
    d = local_cohomology_diamond(P1, PointsInCurve(4), 1)
    assert d.by_degree == {2: {(2, 2): 4}}
    assert local_cohomology_diamond(P1, WholeSpace(), 1) == P1


def test_local_cohomology_matches_poincare_lefschetz():
    surface = kunneth(P1, P1)
    z = curve_diamond(1)
    direct = local_cohomology_diamond(surface, NodalCurveInSurface((1,)), 2)
    assert direct == poincare_lefschetz(z, 2)


def test_local_cohomology_dimension_limits():
    with pytest.raises(UnsupportedDimension):
        local_cohomology_diamond(kunneth(P1, kunneth(P1, P1)), PointsInCurve(1), 3)
    with pytest.raises(ValueError):
        local_cohomology_diamond(P1, NodalCurveInSurface((0,)), 1)


def test_coinvariant_curve_examples():
    assert ev_coinvariant_curve(6).by_degree == {1: {(0, 2): 2, (2, 0): 2}}
    assert ev_coinvariant_curve(2).is_zero()
    assert ev_coinvariant_curve(4).by_degree == {1: {(0, 2): 1, (2, 0): 1}}
    assert ev_coinvariant_curve(0) == P1
    with pytest.raises(ValueError):
        ev_coinvariant_curve(3)


def test_coinvariant_from_cover_spec():
    spec = build_cover_spec(fixtures.segment_nef(1), [0])
    assert spec.branch_degrees() == [4]
    assert ev_coinvariant_diamond(spec) == ev_coinvariant_curve(4)


def test_coinvariant_surface_mode_is_euler_only():
    spec = build_cover_spec(fixtures.square_axis_nef(), [0])
    chi = ev_coinvariant_diamond(spec)
    # the anti-invariant part of an elliptic curve times P1
    assert chi == {0: -1, 1: 2, 2: -1}


@pytest.mark.parametrize("g", range(6))
def test_hyperelliptic_lg_diamond(g):
    d = lg_diamond_curve([2 * g + 2], [0])
    assert d.gr_dims(2) == {k: v for k, v in {HALF: g, Fraction(1): 2 * g + 2, Fraction(3, 2): g}.items() if v}
    assert d.total() == (2 * g + 2) + 2 * g


def test_lg_diamond_empty_j_is_local_cohomology():
    assert lg_diamond_curve([6], []) == local_cohomology_diamond(P1, PointsInCurve(6), 1)


def test_lg_diamond_two_sections_has_four_summands():
    d = lg_diamond_curve([4, 6], [0, 1])
    both = shift(ev_coinvariant_curve(10), 1, 2)
    first = shift(local_cohomology_diamond(P1, PointsInCurve(6), 1), HALF, 1)
    second = shift(local_cohomology_diamond(P1, PointsInCurve(4), 1), HALF, 1)
    assert d == both + first + second


def test_lg_diamond_from_model():
    model = build_lg_model(fixtures.segment_nef(1), [0])
    assert lg_diamond(model) == lg_diamond_curve([4], [0])
    with pytest.raises(UnsupportedDimension):
        lg_diamond(build_lg_model(fixtures.square_axis_nef(), [0]))


@given(st.lists(st.integers(1, 4).map(lambda x: 2 * x), min_size=2, max_size=3), st.data())
def test_lg_diamond_is_monotone_in_j(degrees, data):
    k = len(degrees)
    K = data.draw(st.sets(st.integers(0, k - 1)))
    J = data.draw(st.sets(st.sampled_from(sorted(K)))) if K else set()
    assert lg_diamond_curve(degrees, J) <= lg_diamond_curve(degrees, K)


@given(st.lists(st.integers(1, 4).map(lambda x: 2 * x), min_size=1, max_size=3))
def test_galois_cover_matches_riemann_hurwitz(degrees):
    I = range(len(degrees))
    d = galois_cover_diamond(degrees, I)
    g = riemann_hurwitz_genus(degrees, I)
    assert d.by_degree[0] == {(0, 0): 1}
    assert d.get(1, 0, degree=1) == g
    assert d.total() == 2 * g + 2


def test_surface_euler_characteristics_of_p1xp1():
    fan = triangulated_spanning_fan(fixtures.polygon("P1xP1"))
    trivial = surface_log_euler_characteristics(fan, {})
    assert trivial[0] == 1


def test_spectrum_of_monomial():
    for k in range(2, 9):
        spec = newton_spectrum(NewtonLevel(Polytope([(0,), (k,)])))
        assert spec.levels == {Fraction(j, k): 1 for j in range(1, k)}
        assert spec.total == k - 1


def test_spectrum_of_laurent_examples():
    assert newton_spectrum(NewtonLevel(Polytope([(-1,), (1,)]))).levels == {0: 1, 1: 1}
    cross = fixtures.polygon("P1xP1")
    spec = newton_spectrum(NewtonLevel(cross))
    assert spec.total == cross.normalized_volume() == 4
    assert spec.as_diamond().total() == 4


def test_spectrum_rejects_non_convenient_support():
    with pytest.raises(PolytopeError):
        newton_spectrum(NewtonLevel(Polytope([(0, 0), (2, 1), (1, 2)])))


@pytest.mark.parametrize("pid", ["r04", "r05a", "r06a", "r08a", "r09a"])
def test_spectrum_symmetry_on_reflexive_polygons(pid):
    spec = newton_spectrum(NewtonLevel(fixtures.polygon(pid)))
    assert all(spec.multiplicity(2 - lam) == c for lam, c in spec.levels.items())
    assert spec.total == fixtures.polygon(pid).normalized_volume()


@pytest.mark.parametrize(
    "points",
    [[(0,), (3,)], [(-1,), (1,)], [(-1,), (2,)], [(0, 0), (2, 0), (0, 2)], [(1, 0), (0, 1), (-1, -1)]],
)
def test_oracle_agrees_with_spectrum(points):
    p = Polytope(points)
    spec = newton_spectrum(NewtonLevel(p))
    oracle = koszul_oracle(p, seeds=(3, 4))
    assert oracle.dimension == spec.total
    assert oracle.levels == spec.levels


def test_oracle_limits():
    with pytest.raises(UnsupportedDimension):
        koszul_oracle(Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    with pytest.raises(ValueError):
        koszul_oracle(Polytope([(0,), (3,)]), truncation=1)
    with pytest.raises(MemoryBudgetExceeded):
        koszul_oracle(fixtures.polygon("r09a"), memory_budget_mb=0.001)
