"""Exact plane geometry: rational points, squared distances, distance profiles.

Coordinates are :class:`fractions.Fraction` throughout.  For bulk work a
:class:`PointSet` also carries an *integer form*: every coordinate multiplied
by the common denominator ``scale``.  Squared distances in integer form are
``scale**2`` times the true values, so equality tests are unaffected and the
hot loops never touch ``Fraction``.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy import sparse

from .errors import PointSetError

Rational = Fraction
SquaredDistance = Fraction

# |coordinate| bound under which int64 squared distances cannot overflow
_INT64_COORD_BOUND = 1 << 29


def as_rational(value) -> Fraction:
    """Parse an int, Fraction, or string ("3", "-2/7", "1.25") exactly.

    Floats are rejected: they would smuggle binary rounding into exact data.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise PointSetError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class Point2(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point2":
        return cls(as_rational(x), as_rational(y))

    def __str__(self):
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


def squared_distance(p: Point2, q: Point2) -> Fraction:
    dx = p.x - q.x
    dy = p.y - q.y
    return dx * dx + dy * dy


class PointSet(Sequence):
    """An ordered, duplicate-free list of rational plane points."""

    def __init__(self, points: Iterable):
        pts = tuple(p if isinstance(p, Point2) and isinstance(p.x, Fraction) and isinstance(p.y, Fraction)
                    else Point2.of(*p) for p in points)
        seen = {}
        for i, p in enumerate(pts):
            if p in seen:
                raise PointSetError(f"duplicate point {p} at positions {seen[p]} and {i}")
            seen[p] = i
        self._points = pts

    @property
    def points(self) -> tuple:
        return self._points

    @property
    def n(self) -> int:
        return len(self._points)

    def __len__(self):
        return len(self._points)

    def __getitem__(self, i):
        return self._points[i]

    def __iter__(self):
        return iter(self._points)

    def __eq__(self, other):
        return isinstance(other, PointSet) and self._points == other._points

    def __hash__(self):
        return hash(self._points)

    def __repr__(self):
        return f"PointSet(n={self.n})"

    @cached_property
    def scale(self) -> int:
        """Least common denominator of all coordinates."""
        d = 1
        for p in self._points:
            d = math.lcm(d, p.x.denominator, p.y.denominator)
        return d

    @cached_property
    def int_coords(self) -> tuple:
        """Coordinates multiplied by ``scale``, as Python ints."""
        s = self.scale
        return tuple((int(p.x * s), int(p.y * s)) for p in self._points)

    @cached_property
    def max_abs_coord(self) -> int:
        return max((max(abs(x), abs(y)) for x, y in self.int_coords), default=0)

    @property
    def fits_int64(self) -> bool:
        return self.max_abs_coord < _INT64_COORD_BOUND

    def int_array(self) -> np.ndarray:
        """Integer form as an (n, 2) array: int64 when safe, object otherwise."""
        dtype = np.int64 if self.fits_int64 else object
        return np.array(self.int_coords, dtype=dtype).reshape(self.n, 2)

    def true_distance(self, scaled: int) -> Fraction:
        """Convert an integer-form squared distance back to its exact value."""
        return Fraction(scaled, self.scale * self.scale)


class DistanceProfile(NamedTuple):
    """Counts ``c_q(d)`` of points at each squared distance ``d`` from a center."""

    center: int
    counts: Mapping[Fraction, int]

    @property
    def mass(self) -> int:
        return sum(self.counts.values())


def distance_profile(points: PointSet, q_index: int) -> DistanceProfile:
    if not 0 <= q_index < points.n:
        raise IndexError(f"center index {q_index} out of range for n={points.n}")
    q = points[q_index]
    return DistanceProfile(q_index, dict(Counter(squared_distance(p, q) for p in points)))


def profile_dot(cq: DistanceProfile, cq2: DistanceProfile) -> int:
    """``m(q, q') = sum_d c_q(d) c_q'(d)``: pairs (p, p') with |p-q| = |p'-q'|."""
    small, big = (cq.counts, cq2.counts) if len(cq.counts) <= len(cq2.counts) else (cq2.counts, cq.counts)
    return sum(c * big.get(d, 0) for d, c in small.items())


def scaled_distance_matrix(points: PointSet) -> np.ndarray:
    """(n, n) matrix of integer-form squared distances."""
    xy = points.int_array()
    dx = xy[:, None, 0] - xy[None, :, 0]
    dy = xy[:, None, 1] - xy[None, :, 1]
    return dx * dx + dy * dy


class ProfileMatrix(NamedTuple):
    """All distance profiles at once.

    ``counts[q, j]`` is ``c_q(values[j])`` with ``values`` the sorted distinct
    integer-form squared distances.  Column 0 is always distance zero.
    """

    values: list
    counts: sparse.csr_matrix


def profile_matrix(points: PointSet) -> ProfileMatrix:
    n = points.n
    if n == 0:
        return ProfileMatrix([], sparse.csr_matrix((0, 0), dtype=np.int64))
    dist = scaled_distance_matrix(points)
    values, inverse = np.unique(dist.ravel(), return_inverse=True)
    rows = np.repeat(np.arange(n), n)
    counts = sparse.coo_matrix(
        (np.ones(n * n, dtype=np.int64), (rows, inverse.ravel())), shape=(n, len(values))
    ).tocsr()
    counts.sum_duplicates()
    return ProfileMatrix([int(v) for v in values], counts)


def profile_dot_matrix(points: PointSet, pm: ProfileMatrix | None = None) -> np.ndarray:
    """Dense (n, n) int64 matrix of ``m(q, q')`` over all ordered center pairs."""
    pm = pm if pm is not None else profile_matrix(points)
    c = pm.counts
    return np.asarray((c @ c.T).toarray(), dtype=np.int64)


# -- point-set text format ---------------------------------------------------

def parse_points(text: str, source: str = "<string>") -> PointSet:
    pts = []
    where = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise PointSetError(f"{source}:{lineno}: expected 'x y', got {raw!r}")
        p = Point2(as_rational(fields[0]), as_rational(fields[1]))
        if p in where:
            raise PointSetError(f"{source}:{lineno}: duplicate point {p} (first seen on line {where[p]})")
        where[p] = lineno
        pts.append(p)
    return PointSet(pts)


def load_points(path) -> PointSet:
    path = Path(path)
    return parse_points(path.read_text(), source=str(path))


def dump_points(points: PointSet, header: str | None = None) -> str:
    out = []
    if header:
        out.extend(f"# {h}" for h in header.splitlines())
    out.extend(f"{format_rational(p.x)} {format_rational(p.y)}" for p in points)
    return "\n".join(out) + "\n"


def save_points(points: PointSet, path, header: str | None = None) -> None:
    Path(path).write_text(dump_points(points, header))
