import itertools

import pytest
from hypothesis import given, strategies as st

from clarke_mirror import fixtures
from clarke_mirror.fan import StackyFan, check_properties, spanning_fan, verify_gorenstein
from clarke_mirror.lattice import dot
from clarke_mirror.nefclarke import (
    NefError,
    build_cover_spec,
    build_lg_model,
    clarke_family_pair,
    dual_nef_partition,
    extremal_transition_pair,
    validate_clarke,
    validate_nef_partition,
)
from clarke_mirror.polytope import PolytopeError, convex_hull, minkowski_sum, polar_dual

CROSS = convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)])
P2 = convex_hull([(1, 0), (0, 1), (-1, -1)])
IDS = fixtures.polygon_ids()


def test_axis_partition_of_the_cross():
    np = validate_nef_partition(CROSS, [[(1, 0), (-1, 0)], [(0, 1), (0, -1)]])
    assert [p.vertices for p in np.pieces()] == [((-1, 0), (1, 0)), ((0, -1), (0, 1))]
    for i, part in enumerate(np.parts):
        for cone, m in np.psi[i].items():
            for v in CROSS.vertices:
                value = 1 if v in part else 0
                assert dot(v, m) <= value
                if v in cone:
                    assert dot(v, m) == value


@pytest.mark.parametrize("pid", IDS)
def test_trivial_partition_is_nef(pid):
    p = fixtures.polygon(pid)
    np = validate_nef_partition(p, [list(range(len(p.vertices)))])
    assert np.k == 1
    for cone, m in np.psi[0].items():
        assert all(dot(v, m) == 1 for v in cone)
    dual = dual_nef_partition(np)
    assert dual.pieces[0] == polar_dual(p)


def test_p2_split_partition_golden():
    np = validate_nef_partition(P2, [[(1, 0)], [(0, 1), (-1, -1)]])
    assert np.k == 2
    dual = dual_nef_partition(np)
    # m1 >= -1, m2 >= 0, m1 + m2 <= 0  and  m1 >= 0, m2 >= -1, m1 + m2 <= 1
    assert [p.vertices for p in dual.pieces] == [
        ((-1, 0), (-1, 1), (0, 0)),
        ((0, -1), (0, 1), (2, -1)),
    ]
    assert dual.delta_check.vertices == ((-1, 0), (-1, 1), (0, -1), (0, 1), (2, -1))


def test_nef_partition_rejections():
    with pytest.raises(NefError):
        validate_nef_partition(CROSS, [[(1, 0)], [(0, 1), (0, -1)]])
    with pytest.raises(NefError):
        validate_nef_partition(convex_hull([(2, 0), (0, 2), (-2, -2)]), [[0, 1, 2]])
    # psi would be (-1/2, -1/2) on a cone of the square: convex but not integral
    square = fixtures.polygon("square")
    with pytest.raises(NefError):
        validate_nef_partition(square, [[(-1, -1)], [(1, 1), (1, -1), (-1, 1)]])
    # adjacent pairs of the cross do form a nef partition
    assert validate_nef_partition(CROSS, [[(1, 0), (0, 1)], [(-1, 0), (0, -1)]]).k == 2


def test_axis_dual_pieces():
    np = fixtures.square_axis_nef()
    dual = dual_nef_partition(np)
    assert [p.vertices for p in dual.pieces] == [((-1, 0), (1, 0)), ((0, -1), (0, 1))]
    assert all(p.lattice == "M" for p in dual.pieces)
    # the hull of the dual pieces is the cross; their Minkowski sum is the polar square
    assert dual.delta_check.vertices == CROSS.vertices
    assert minkowski_sum(*dual.pieces) == polar_dual(np.delta)
    assert all(dual.minkowski_checks.values())


def _all_nef_partitions(p, k):
    verts = p.vertices
    seen = set()
    for labels in itertools.product(range(k), repeat=len(verts)):
        if len(set(labels)) != k or labels[0] != 0:
            continue
        parts = tuple(tuple(v for v, l in zip(verts, labels) if l == i) for i in range(k))
        if parts in seen:
            continue
        seen.add(parts)
        try:
            yield validate_nef_partition(p, parts)
        except NefError:
            continue


@pytest.mark.parametrize("pid", ["r04", "r05c", "r06b", "r07d", "r09c"])
def test_double_duality_returns_the_pieces(pid):
    for np in _all_nef_partitions(fixtures.polygon(pid), 2):
        dual = dual_nef_partition(np)
        back = dual_nef_partition(dual.nef)
        assert sorted(p.vertices for p in back.pieces) == sorted(p.vertices for p in np.pieces())
        assert back.delta_check == np.delta


def test_p1_example_is_a_clarke_pair(p1_fans):
    pair = validate_clarke(p1_fans["sigma_L_stacky"], p1_fans["sigma_check"])
    assert pair.valid and pair.reason is None
    assert "assumption" in pair.certificate


def test_p1_without_stack_fails_convexity(p1_fans):
    pair = validate_clarke(p1_fans["sigma_L_plain"], p1_fans["sigma_check"])
    assert not pair.valid and pair.reason == "convexity"


def test_clarke_rejects_rank_mismatch(p1_fans):
    with pytest.raises(ValueError):
        validate_clarke(p1_fans["sigma_check"], StackyFan(spanning_fan(convex_hull([(-1,), (1,)]))))


def test_clarke_regularity_failure():
    a = StackyFan(spanning_fan(CROSS))
    pair = validate_clarke(a, a)
    assert not pair.valid and pair.reason == "regularity"


@given(st.sampled_from(["sigma_L_stacky", "sigma_L_plain", "sigma_check"]), st.sampled_from(["sigma_L_stacky", "sigma_L_plain", "sigma_check"]))
def test_clarke_regularity_is_symmetric(a, b):
    fans = fixtures.p1_fans()
    one = validate_clarke(fans[a], fans[b])
    two = validate_clarke(fans[b], fans[a])
    assert one.valid == two.valid
    assert (one.reason == "regularity") == (two.reason == "regularity")


@pytest.mark.parametrize("J", [(), (0,), (1,), (0, 1)])
def test_family_pairs_over_the_square_validate(J):
    np = fixtures.square_axis_nef()
    pair = clarke_family_pair(np, J)
    assert pair.valid, pair.reason
    assert pair.sigma.rank == 4


@pytest.mark.parametrize("J", [(), (0,)])
def test_family_pairs_over_the_segment_validate(J):
    assert clarke_family_pair(fixtures.segment_nef(1), J).valid


def test_batyrev_pair_over_the_square():
    cross = polar_dual(fixtures.polygon("square"))
    tp = extremal_transition_pair(cross, cross)
    assert tp.clarke.valid and tp.gorenstein and tp.unimodular


def test_segment_transition_pair():
    delta_II = convex_hull([(-1, 1), (1, 1), (0, -1)])
    delta_I_check = convex_hull([(-2, 1), (2, 1), (0, -1)])
    tp = extremal_transition_pair(delta_II, delta_I_check)
    assert tp.clarke.valid and tp.gorenstein and tp.unimodular
    for f in (tp.sigma_I, tp.sigma_II):
        assert verify_gorenstein(f, check_properties(f).certificates["gorenstein"])
    with pytest.raises(PolytopeError):
        extremal_transition_pair(delta_I_check, delta_II)


def test_cover_spec_of_the_segment():
    spec = build_cover_spec(fixtures.segment_nef(1), [0])
    assert spec.base_dim == 1 and spec.branch_degrees() == [4]
    two = build_cover_spec(fixtures.segment_nef(2), [0, 1])
    assert two.branch_degrees() == [2, 2]


def test_lg_models_over_the_square():
    np = fixtures.square_axis_nef()
    full = build_lg_model(np, {0, 1})
    assert full.is_regular() and full.J == frozenset({0, 1})
    assert all(m[2:] in ((2, 0), (0, 2)) for m, _ in full.support)
    empty = build_lg_model(np, set())
    assert all(m[2:] in ((1, 0), (0, 1)) for m, _ in empty.support)
    # the fibre directions of the total space are doubled on parts outside J
    assert {r[2:] for r in empty.total_space.rays if any(r[:2])} == {(2, 0), (0, 2)}
