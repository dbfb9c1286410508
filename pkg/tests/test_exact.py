import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eshinge import Point2, PointSet, PointSetError, distance_profile, profile_dot, squared_distance
from eshinge.exact import dump_points, parse_points, profile_dot_matrix, profile_matrix

from .conftest import point_sets, small_families

F = Fraction


def P(x, y):
    return Point2.of(x, y)


@pytest.mark.parametrize("p, q, want", [
    (P(0, 0), P(3, 4), F(25)),
    (P(5, -2), P(5, -2), F(0)),
    (P("1/2", 0), P(0, "1/3"), F(13, 36)),
])
def test_squared_distance(p, q, want):
    assert squared_distance(p, q) == want


@given(point_sets(min_size=2, max_size=2))
def test_squared_distance_symmetric_and_zero_only_on_diagonal(ps):
    p, q = ps
    assert squared_distance(p, q) == squared_distance(q, p) > 0
    assert squared_distance(p, p) == 0


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(-1000, 1000).filter(bool))
def test_rational_canonical_form(a, b, k):
    x, y = F(a, b), F(k * a, k * b)
    assert (x.numerator, x.denominator) == (y.numerator, y.denominator)
    assert x.denominator > 0 and hash(x) == hash(y)


def test_distance_profiles():
    tri = PointSet([(0, 0), (1, 0), (0, 1)])
    assert distance_profile(tri, 0).counts == {0: 1, 1: 2}
    sq = PointSet([(0, 0), (0, 1), (1, 0), (1, 1)])
    for q in range(4):
        assert distance_profile(sq, q).counts == {0: 1, 1: 2, 2: 1}
    assert distance_profile(PointSet([(7, 7)]), 0).counts == {0: 1}
    with pytest.raises(IndexError):
        distance_profile(tri, 3)


def test_profile_dot_examples():
    tri = PointSet([(0, 0), (1, 0), (0, 1)])
    a, b = distance_profile(tri, 0), distance_profile(tri, 1)
    assert profile_dot(a, b) == 3
    sq = PointSet([(0, 0), (0, 1), (1, 0), (1, 1)])
    prof = [distance_profile(sq, q) for q in range(4)]
    assert all(profile_dot(x, y) == 6 for x in prof for y in prof)
    assert profile_dot(a, a) == 5 >= tri.n


@pytest.mark.parametrize("name, ps", [f for f in small_families(12)])
def test_profile_dot_sum_counts_equal_distance_quadruples(name, ps):
    n = ps.n
    brute = sum(1 for p, q, pp, qq in itertools.product(ps, repeat=4)
                if squared_distance(p, q) == squared_distance(pp, qq)) if n <= 8 else None
    prof = [distance_profile(ps, q) for q in range(n)]
    total = sum(profile_dot(a, b) for a in prof for b in prof)
    if brute is not None:
        assert total == brute
    # the sparse matrix path agrees with the dict path entry by entry
    m = profile_dot_matrix(ps)
    assert all(m[i, j] == profile_dot(prof[i], prof[j]) for i in range(n) for j in range(n))
    assert int(m.sum()) == total
    for q in range(n):
        assert sum(prof[q].counts.values()) == n


@given(point_sets(max_size=9))
def test_pair_of_pairs_identity(ps):
    prof = [distance_profile(ps, q) for q in range(ps.n)]
    brute = sum(1 for p, q, pp, qq in itertools.product(ps, repeat=4)
                if squared_distance(p, q) == squared_distance(pp, qq))
    assert sum(profile_dot(a, b) for a in prof for b in prof) == brute


def test_profile_matrix_scaling_keeps_rationals():
    ps = PointSet([(0, 0), ("1/2", 0), (0, "1/3")])
    pm = profile_matrix(ps)
    assert ps.scale == 6
    assert [ps.true_distance(v) for v in pm.values] == [F(0), F(1, 9), F(1, 4), F(13, 36)]


def test_point_set_rejects_duplicates():
    with pytest.raises(PointSetError):
        PointSet([(0, 0), (1, 1), (F(2, 2), 1)])


def test_parse_points_formats():
    text = "# header\n0 0\n1/2 -3\n\n  0.25 1e1\n-7 2/4\n"
    ps = parse_points(text)
    assert list(ps) == [P(0, 0), P("1/2", -3), P("1/4", 10), P(-7, "1/2")]
    assert parse_points(dump_points(ps)) == ps


@pytest.mark.parametrize("text", ["0 0\n0.0 0\n", "1 2 3\n", "a 1\n", "1 inf\n", "1 nan\n", "1/0 2\n"])
def test_parse_points_errors(text):
    with pytest.raises(PointSetError):
        parse_points(text)


def test_floats_are_not_coordinates():
    with pytest.raises(TypeError):
        Point2.of(0.5, 1)
