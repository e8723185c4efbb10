from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from clarke_mirror import fixtures
from clarke_mirror.fan import Fan, StackyFan, triangulated_spanning_fan
from clarke_mirror.hodge import HodgeDiamond, PointsInCurve, local_cohomology_diamond, projective_line, shift
from clarke_mirror.lattice import smith_normal_form
from clarke_mirror.nefclarke import dual_nef_partition
from clarke_mirror.orbifold import (
    box_elements,
    clarke_family_side,
    cone_box,
    orbifold_diamond,
    sectors,
    verify_cdual,
    verify_clarke_family,
)

HALF = Fraction(1, 2)
P1 = projective_line()


def test_p1_example_has_one_half_age_element(p1_fans):
    boxes = box_elements(p1_fans["sigma_L_stacky"])
    assert len(boxes) == 1
    (b,) = boxes
    assert b.point == (0, 1)
    assert b.age == HALF
    assert b.coefficients == (HALF,)


def test_unimodular_fans_have_no_box_elements(p1_fans):
    assert box_elements(p1_fans["sigma_check"]) == []
    fan = triangulated_spanning_fan(fixtures.polygon("r08a"))
    assert box_elements(StackyFan(fan)) == []


def test_ray_with_multiplier_three():
    f = StackyFan(Fan([(1,), (-1,)], [(0,), (1,)]), [3, 1])
    assert [b.age for b in box_elements(f)] == [Fraction(1, 3), Fraction(2, 3)]


def test_box_element_json():
    f = StackyFan(Fan([(1,), (-1,)], [(0,), (1,)]), [2, 1])
    (b,) = box_elements(f)
    assert b.to_json() == {"cone": [0], "coefficients": ["1/2"], "point": [1], "age": "1/2"}


def _two_cone(data):
    r1 = data.draw(st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
    r2 = data.draw(st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
    if r1[0] * r2[1] - r1[1] * r2[0] <= 0 or gcd(*r1) != 1 or gcd(*r2) != 1:
        return None
    beta = data.draw(st.tuples(st.integers(1, 3), st.integers(1, 3)))
    return StackyFan(Fan([r1, r2], [(0, 1)]), list(beta))


@given(st.data())
def test_box_count_is_index_minus_one(data):
    f = _two_cone(data)
    assume(f is not None)
    count = len(box_elements(f))
    _, diag, _ = smith_normal_form([list(v) for v in zip(*f.extended_rays())])
    index = abs(diag[0][0] * diag[1][1])
    assert count == index - 1


@given(st.data())
def test_ages_come_in_pairs(data):
    f = _two_cone(data)
    assume(f is not None)
    for cone in f.fan.all_cones():
        elems = cone_box(f, cone)
        coeffs = {b.coefficients for b in elems}
        for b in elems:
            assert 0 < b.age < len(cone)
            assert tuple(1 - a for a in b.coefficients) in coeffs


def test_orbifold_diamond_untwisted_is_identity():
    f = StackyFan(Fan([(1,), (-1,)], [(0,), (1,)]))
    assert orbifold_diamond(f, {(): P1}) == P1


def test_orbifold_diamond_of_the_p1_example(p1_fans):
    f = p1_fans["sigma_L_stacky"]
    table = {(): local_cohomology_diamond(P1, PointsInCurve(4), 1), (0, 1): P1}
    d = orbifold_diamond(f, table)
    assert d.as_fraction_entries() == {(HALF, HALF): 1, (1, 1): 4, (Fraction(3, 2), Fraction(3, 2)): 1}
    with pytest.raises(KeyError):
        orbifold_diamond(f, {(): P1})


def test_orbifold_diamond_is_additive_in_sectors():
    f = StackyFan(Fan([(1,), (-1,)], [(0,), (1,)]), [2, 2])
    keys = [s.key for s in sectors(f)]
    assert len(keys) == 3
    a = {k: P1 for k in keys}
    b = {k: HodgeDiamond.point() for k in keys}
    both = {k: a[k] + b[k] for k in keys}
    assert orbifold_diamond(f, both) == orbifold_diamond(f, a) + orbifold_diamond(f, b)
    assert orbifold_diamond(f, a) == P1 + shift(P1, HALF, 1).scale(2)


def test_verify_cdual_on_the_p1_example():
    np = fixtures.segment_nef(1)
    left = clarke_family_side(np.pieces(), {0})
    right = clarke_family_side(dual_nef_partition(np).pieces, set())
    assert left.diamond.as_fraction_entries() == {
        (HALF, HALF): 1,
        (1, 1): 4,
        (Fraction(3, 2), Fraction(3, 2)): 1,
    }
    assert right.diamond.as_fraction_entries() == {
        (Fraction(3, 2), HALF): 1,
        (1, 1): 4,
        (HALF, Fraction(3, 2)): 1,
    }
    report = verify_cdual(left.diamond, right.diamond, 2)
    assert report.passed
    assert "PASS" in report.table()
    assert report.to_json()["d"] == 2


def test_verify_cdual_symmetric_self_check():
    sym = HodgeDiamond.from_entries({(HALF, HALF): 1, (1, 1): 3, (Fraction(3, 2), HALF): 1})
    assert verify_cdual(sym, sym, 2).passed
    assert not verify_cdual(P1, P1, 2).passed


def test_verify_cdual_locates_a_perturbation():
    np = fixtures.segment_nef(1)
    left = clarke_family_side(np.pieces(), {0}).diamond
    right = clarke_family_side(dual_nef_partition(np).pieces, set()).diamond
    bad = right + HodgeDiamond({2: {(2, 2): 1}})
    report = verify_cdual(left, bad, 2)
    assert not report.passed
    assert [r[:4] for r in report.rows if r[4] == "mismatch"] == [(2, 2, 4, 5)]


@pytest.mark.parametrize("k,J", [(1, ()), (1, (0,)), (2, ()), (2, (0,)), (2, (0, 1))])
def test_clarke_family_over_the_segment(k, J):
    assert verify_clarke_family(fixtures.segment_nef(k), J).passed
