import itertools

import pytest
from hypothesis import given, strategies as st

from clarke_mirror import fixtures
from clarke_mirror.fan import (
    Fan,
    FanError,
    StackyFan,
    _heights_by_walls,
    _heights_global,
    _support_is_convex,
    cayley_fan,
    check_properties,
    convexity_violation,
    gorenstein_witnesses,
    lower_hull_cells,
    quasiprojective_heights,
    regular_triangulation,
    sigma_family,
    spanning_fan,
    triangulated_spanning_fan,
    verify_gorenstein,
)
from clarke_mirror.lattice import dot, primitive, solve
from clarke_mirror.polytope import PolytopeError, convex_hull, polar_dual

CROSS = convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)])
P2 = convex_hull([(1, 0), (0, 1), (-1, -1)])
SEGMENT = convex_hull([(-1,), (1,)])
IDS = fixtures.polygon_ids()


def in_some_cone(fan: Fan, v) -> bool:
    for c in fan.cones:
        cols = [[fan.rays[i][t] for i in c] for t in range(fan.rank)]
        lam = solve(cols, list(v))
        if lam is not None and all(x >= 0 for x in lam):
            return True
    return False


def test_spanning_fan_of_cross():
    f = spanning_fan(CROSS)
    assert sorted(f.rays) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert len(f.cones) == 4 and f.is_complete()


def test_spanning_fan_of_p2_and_p1():
    f = spanning_fan(P2)
    assert len(f.cones) == 3 and f.is_unimodular() and f.is_complete()
    g = spanning_fan(SEGMENT)
    assert g.rays == ((-1,), (1,)) and g.cones == ((0,), (1,))
    with pytest.raises(PolytopeError):
        spanning_fan(convex_hull([(0, 0), (1, 0), (0, 1)]))


def test_placing_triangulation_of_cross():
    tri = regular_triangulation(CROSS, CROSS.lattice_points())
    assert len(tri.simplices) == 4 and tri.unimodular
    assert all(2 in s for s in tri.simplices)  # every triangle uses the origin
    assert tri.verify()


def test_simplex_without_candidates_is_itself():
    tri = regular_triangulation(P2)
    assert tri.simplices == ((0, 1, 2),)


@pytest.mark.parametrize("pid", IDS)
def test_reflexive_polygons_triangulate_unimodularly(pid):
    p = fixtures.polygon(pid)
    tri = regular_triangulation(p, p.lattice_points())
    assert tri.unimodular
    assert lower_hull_cells(tri.points, tri.heights) == tri.simplices
    area = sum(
        abs((tri.points[b][0] - tri.points[a][0]) * (tri.points[c][1] - tri.points[a][1])
            - (tri.points[c][0] - tri.points[a][0]) * (tri.points[b][1] - tri.points[a][1]))
        for a, b, c in tri.simplices
    )
    assert area == p.normalized_volume()


def test_bundled_triangulations_match():
    for rec in fixtures.polygon_records():
        fan = triangulated_spanning_fan(fixtures.polygon(rec["id"]))
        tri = rec["triangulation"]
        assert sorted(map(tuple, tri["rays"])) == sorted(fan.rays)
        assert len(tri["cones"]) == len(fan.cones)


@pytest.mark.parametrize("pid", IDS)
def test_spanning_fans_are_complete_by_sampling(pid):
    for fan in (spanning_fan(fixtures.polygon(pid)), triangulated_spanning_fan(fixtures.polygon(pid))):
        assert fan.is_complete()
        for v in itertools.product(range(-3, 4), repeat=2):
            if any(v) and primitive(v) == v:
                assert in_some_cone(fan, v)


@pytest.mark.parametrize("pid", IDS)
def test_face_closure(pid):
    fan = triangulated_spanning_fan(fixtures.polygon(pid))
    cones = set(fan.all_cones())
    for c in cones:
        for r in range(len(c)):
            for face in itertools.combinations(c, r):
                assert face in cones


def test_cayley_fan_examples():
    p1 = spanning_fan(SEGMENT)
    f = cayley_fan(p1, [[2, 2]])
    assert sorted(zip(f.rays, f.beta)) == [((-1, 2), 1), ((0, 1), 1), ((1, 2), 1)]
    g = cayley_fan(p1, [[1, 1]])
    assert sorted(g.rays) == [(-1, 1), (0, 1), (1, 1)]
    trivial = cayley_fan(p1, [[0, 0]])
    assert sorted(trivial.rays) == [(-1, 0), (0, 1), (1, 0)]


def test_sigma_family_on_the_segment(p1_fans):
    np = fixtures.segment_nef(1)
    A = [piece.lattice_points() for piece in np.pieces()]
    assert sigma_family(A, {0}) == p1_fans["sigma_L_stacky"]
    plain = sigma_family(A, set())
    assert sorted(plain.rays) == [(-1, 1), (0, 1), (1, 1)] and set(plain.beta) == {1}


def test_sigma_family_rank_four_is_convex():
    np = fixtures.square_axis_nef()
    f = sigma_family([piece.lattice_points() for piece in np.pieces()], {0})
    assert f.rank == 4
    rec = check_properties(f)
    assert rec.convex and rec.quasiprojective and rec.simplicial
    assert "quasiprojective" in rec.certificates


def test_sigma_family_rejects_bad_index():
    with pytest.raises(FanError):
        sigma_family([[(0,), (1,)]], {3})


def test_p2_properties():
    rec = check_properties(spanning_fan(P2))
    assert rec.as_dict() == {
        "simplicial": True,
        "unimodular": True,
        "gorenstein": True,
        "quasiprojective": True,
        "convex": True,
        "complete": True,
    }


def test_stack_makes_the_p1_fan_convex(p1_fans):
    assert check_properties(p1_fans["sigma_L_stacky"]).convex
    plain = check_properties(p1_fans["sigma_L_plain"])
    assert not plain.convex
    reason, detail = plain.certificates["convexity_violation"]
    assert reason == "phi" and detail["value"] > 1
    assert convexity_violation(p1_fans["sigma_L_stacky"]) is None


@pytest.mark.parametrize("pid", IDS)
def test_gorenstein_witnesses_verify(pid):
    f = StackyFan(triangulated_spanning_fan(fixtures.polygon(pid)))
    w = gorenstein_witnesses(f)
    assert w is not None and verify_gorenstein(f, w)
    for c, m in w.items():
        assert all(dot(f.extended_ray(i), m) == 1 for i in c)


def test_gorenstein_fails_for_stacky_ray():
    f = StackyFan(spanning_fan(SEGMENT), [2, 1])
    assert gorenstein_witnesses(f) is None


def _strictly_convex(fan: Fan, cert) -> bool:
    h, funcs = cert["heights"], cert["functionals"]
    for c, m in funcs.items():
        for i, r in enumerate(fan.rays):
            val = dot(r, m)
            if i in c and val != h[i]:
                return False
            if i not in c and not val < h[i]:
                return False
    return True


# the global LP is slow on the larger polygons, so compare on the small ones
@pytest.mark.parametrize("pid", ["r04", "r05a", "r05b", "r05c", "r06a"])
def test_wall_and_global_heights_agree(pid):
    fan = triangulated_spanning_fan(fixtures.polygon(pid))
    walls, glob = _heights_by_walls(fan), _heights_global(fan)
    assert (walls is None) == (glob is None)
    for cert in (walls, glob):
        assert cert is not None and _strictly_convex(fan, cert)


def test_non_projective_support_falls_back():
    # three quadrants: the support is not convex, so the global LP runs
    fan = Fan([(1, 0), (0, 1), (-1, 0), (0, -1)], [[0, 1], [1, 2], [2, 3]])
    assert not _support_is_convex(fan)
    cert = quasiprojective_heights(fan)
    assert cert is not None and _strictly_convex(fan, cert)


@pytest.mark.parametrize("pid", IDS)
def test_wall_heights_certify_every_polygon(pid):
    fan = triangulated_spanning_fan(fixtures.polygon(pid))
    cert = quasiprojective_heights(fan)
    assert cert is not None and _strictly_convex(fan, cert)


def test_fan_validation():
    with pytest.raises(FanError):
        Fan([(2, 0)], [[0]])
    with pytest.raises(FanError):
        Fan([(1, 0), (1, 0)], [[0]])
    with pytest.raises(FanError):
        Fan([(1, 0)], [[1]])
    with pytest.raises(FanError):
        StackyFan(spanning_fan(SEGMENT), [0, 1])


@given(st.sampled_from(IDS), st.lists(st.integers(1, 3), min_size=12, max_size=12))
def test_stacky_json_round_trip(pid, betas):
    fan = triangulated_spanning_fan(fixtures.polygon(pid))
    f = StackyFan(fan, betas[: len(fan.rays)])
    assert StackyFan.from_json(f.to_json()) == f


def test_polar_spanning_fan_is_normal_fan():
    # the spanning fan of the polar is the normal fan of the polytope
    for pid in IDS:
        p = fixtures.polygon(pid)
        rays = sorted(primitive(f.normal) for f in p.facets)
        assert sorted(spanning_fan(polar_dual(p)).rays) == rays
