import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eshinge import (Point3H, PointSet, ResourceLimitExceeded, SizeLimitExceeded, build_lines, es_line,
                     gen_collinear, gen_grid, gen_random, gen_two_circles, hinge_energy, intersection_point,
                     intersection_profile, klein_form, line_to_affine, meets, point_on_line, rich_lines,
                     squared_distance)
from eshinge.exact import Point2, profile_dot_matrix
from eshinge.klein import brute_force_meets, canonical_int_vector, rich_line_table
from eshinge.limits import Deadline

from .conftest import coords, point_sets, small_families

F = Fraction


def L(a, b, c, d):
    return es_line(Point2.of(a, b), Point2.of(c, d))


def test_es_line_examples():
    l = L(0, 0, 1, 0)
    assert l.coords == (0, 2, -4, 0, 2, 1)
    assert l.coords == canonical_int_vector((0, F(-1, 2), 1, 0, F(-1, 2), F(-1, 4)))
    assert L(0, 0, 0, 1).coords == canonical_int_vector((F(1, 2), 0, 1, F(1, 2), 0, F(-1, 4)))
    assert L(0, 0, 0, 1).coords == (2, 0, 4, 2, 0, -1)


@given(st.tuples(coords, coords, coords, coords))
def test_es_line_on_klein_quadric_and_decodes(v):
    p, q = Point2.of(v[0], v[1]), Point2.of(v[2], v[3])
    l = es_line(p, q)
    assert l.on_klein_quadric()
    assert klein_form(l, l) == 0
    assert l.coords[2] != 0
    assert l.source_points() == (p, q)
    g = 0
    for c in l.coords:
        g = np.gcd(g, c)
    assert g == 1 and next(c for c in l.coords if c) > 0


def test_klein_form_examples():
    assert klein_form(L(0, 0, 0, 1), L(1, 0, 1, 1)) == 0
    assert klein_form(L(0, 0, 0, 1), L(1, 0, 2, 2)) != 0
    assert meets(L(0, 0, 0, 1), L(1, 0, 1, 1))
    assert not meets(L(0, 0, 0, 1), L(1, 0, 2, 2))
    assert meets(L(0, 0, 1, 0), L(0, 1, 1, 1))
    with pytest.raises(ValueError):
        meets(L(0, 0, 1, 0), L(0, 0, 1, 0))


@given(st.lists(st.tuples(coords, coords), min_size=4, max_size=4, unique=True))
@settings(max_examples=300)
def test_meet_predicate_matches_leg_equality(v):
    p, pp, q, qq = (Point2(*c) for c in v)
    assert meets(es_line(p, pp), es_line(q, qq)) == (squared_distance(p, q) == squared_distance(pp, qq))


def test_line_to_affine_examples():
    base, d = line_to_affine(L(0, 0, 0, 1))
    assert d == (F(1, 2), 0, 1) and base == (0, F(1, 2), 0)
    base, d = line_to_affine(L(1, 0, 0, 0))
    assert d == (0, F(1, 2), 1) and base == (F(1, 2), 0, 0)


@given(st.tuples(coords, coords, coords, coords))
def test_affine_round_trip(v):
    l = es_line(Point2.of(v[0], v[1]), Point2.of(v[2], v[3]))
    base, d = line_to_affine(l)
    m = (base[1] * d[2] - base[2] * d[1], base[2] * d[0] - base[0] * d[2], base[0] * d[1] - base[1] * d[0])
    c2 = l.coords[2]
    assert m == tuple(F(x, c2) for x in l.moment)


def test_intersection_examples():
    a, b = L(0, 0, 0, 1), L(1, 0, 0, 0)
    pt = intersection_point(a, b)
    assert pt == Point3H.from_values((F(1, 2), F(1, 2), 1, 1)) == Point3H((1, 1, 2, 2))
    assert pt.affine() == (F(1, 2), F(1, 2), 1)
    assert intersection_point(b, a) == pt
    inf = intersection_point(L(0, 0, 1, 0), L(0, 1, 1, 1))
    assert inf.coords == (0, 1, -2, 0) and inf.at_infinity
    with pytest.raises(ValueError):
        intersection_point(L(0, 0, 0, 1), L(1, 0, 2, 2))


def test_point_on_line_examples():
    assert point_on_line(Point3H((1, 1, 2, 2)), L(0, 0, 0, 1))
    assert point_on_line(Point3H((0, 1, -2, 0)), L(0, 0, 1, 0))
    assert not point_on_line(Point3H((0, 0, 0, 1)), L(0, 0, 0, 1))


@given(st.lists(st.tuples(coords, coords), min_size=4, max_size=4, unique=True))
@settings(max_examples=200)
def test_intersection_lies_on_both_lines(v):
    p, pp, q, qq = (Point2(*c) for c in v)
    a, b = es_line(p, pp), es_line(q, qq)
    if not meets(a, b):
        return
    pt = intersection_point(a, b)
    assert pt == intersection_point(b, a)
    assert point_on_line(pt, a) and point_on_line(pt, b)


def test_build_lines_small():
    two = PointSet([(0, 0), (5, 1)])
    lines = build_lines(two)
    assert len(lines) == 4 and len({l.coords for l in lines}) == 4
    assert len(build_lines(PointSet([(1, 1)]))) == 1
    lines = build_lines(gen_grid(2))
    assert [l.source for l in lines][1] == (Point2.of(0, 0), Point2.of(0, 1))


def test_grid2_profile(grid2):
    prof = intersection_profile(grid2)
    assert prof.num_lines == 16
    assert prof.nu.tolist() == [5] * 16
    assert prof.sum_nu_sq == 400 and prof.sum_nu == 80
    assert sum(int(m) * (int(m) - 1) for m in prof.mu) == 80
    # all intersection points vs all lines
    from eshinge import count_incidences
    pts = [prof.point(i) for i in range(prof.num_points)]
    assert count_incidences(pts, prof.lines) == int(prof.mu.sum())


def test_collinear3_nu_consistency():
    ps = gen_collinear(3)
    prof = intersection_profile(ps)
    assert (prof.nu == profile_dot_matrix(ps).ravel() - 1).all()


FAMILIES12 = small_families(12)


@pytest.mark.parametrize("name, ps", FAMILIES12)
def test_profile_matches_all_pairs_oracle(name, ps):
    prof = intersection_profile(ps)
    oracle = {k: frozenset(v) for k, v in brute_force_meets(ps).items()}
    assert prof.point_map == oracle
    assert prof.max_mu <= ps.n
    assert (prof.nu == profile_dot_matrix(ps).ravel() - 1).all()
    assert sum((int(v) + 1) ** 2 for v in prof.nu) == hinge_energy(ps)


@pytest.mark.parametrize("ps", [gen_grid(5), gen_random(20, 4, 3), gen_collinear(15)], ids=["grid", "random", "line"])
def test_numpy_and_python_joins_agree(ps):
    a = intersection_profile(ps, method="numpy")
    b = intersection_profile(ps, method="python")
    assert a.point_map == b.point_map
    assert (a.nu == b.nu).all() and (a.mu == b.mu).all()
    assert np.array_equal(a.point_coords.astype(object), b.point_coords)


def test_rational_inputs_take_exact_path():
    ps = gen_two_circles(25, 1, 2)
    prof = intersection_profile(ps)
    assert prof.method == "python"
    assert (prof.nu == profile_dot_matrix(ps).ravel() - 1).all()
    assert prof.max_mu <= ps.n


@pytest.mark.parametrize("threads", [1, 2, 7])
def test_thread_count_does_not_change_profile(threads):
    ps = gen_grid(7)
    ref = intersection_profile(ps, threads=1)
    got = intersection_profile(ps, threads=threads)
    assert np.array_equal(ref.point_coords, got.point_coords)
    assert np.array_equal(ref.point_lines, got.point_lines)
    assert np.array_equal(ref.nu, got.nu)


def test_dyadic_partition_and_rich_lines(grid2):
    ps = gen_grid(6)
    prof = intersection_profile(ps)
    levels = prof.dyadic_levels()
    assert levels == [2, 4, 8, 16, 32]
    assert sum(prof.dyadic_sizes.values()) == prof.num_points
    assert (prof.mu >= 2).all()
    for k in levels:
        support = prof.line_support(k)
        ts = [1 << j for j in range(12)]
        fams = [set(rich_lines(prof, k, t).lines) for t in ts]
        union = set().union(*fams)
        assert union == set(np.nonzero(support)[0].tolist())
        assert sum(len(f) for f in fams) == len(union)
        for t, fam in zip(ts, fams):
            assert all(t <= support[i] < 2 * t for i in fam)
    assert len(rich_lines(prof, 2, 1 << 20)) == 0
    with pytest.raises(ValueError):
        rich_lines(prof, 3, 1)
    table = rich_line_table(prof)
    for k, t, size, inc in table:
        assert size == len(rich_lines(prof, k, t)) and t * size <= inc < 2 * t * size

    g2 = intersection_profile(grid2)
    total = sum(int(m) * (int(m) - 1) for k in g2.dyadic_levels() for m in g2.mu[g2.dyadic_points(k)])
    assert total == 80


def test_size_and_time_limits():
    with pytest.raises(SizeLimitExceeded):
        intersection_profile(gen_grid(12))
    with pytest.raises(SizeLimitExceeded):
        brute_force_meets(gen_grid(4))
    with pytest.raises(ResourceLimitExceeded):
        intersection_profile(gen_grid(8), deadline=Deadline(0))


def test_random_pairs_large_n():
    ps = gen_random(100, 50, 2024)
    lines = build_lines(ps)
    rng = random.Random(5)
    for _ in range(2000):
        a, b = rng.sample(range(len(lines)), 2)
        (p, pp), (q, qq) = lines[a].source, lines[b].source
        assert meets(lines[a], lines[b]) == (squared_distance(p, q) == squared_distance(pp, qq))


def test_profile_of_tiny_sets():
    one = intersection_profile(PointSet([(2, 3)]))
    assert one.num_points == 0 and one.nu.tolist() == [0]
    assert hinge_energy(PointSet([(2, 3)])) == sum((int(v) + 1) ** 2 for v in one.nu)
