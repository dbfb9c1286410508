"""Point-set families: square grid, uniform random lattice points, two
concentric circles plus centre, and collinear controls.

The random family draws from numpy's PCG64 bit generator seeded with the given
64-bit seed; points are sampled coordinate-pair by coordinate-pair and
rejected when already taken, so the output is a pure function of
``(n, coord_bound, seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import Point2, PointSet, as_rational

FAMILIES = ("grid", "random", "two_circles", "collinear")


def gen_grid(m: int) -> PointSet:
    if m < 1:
        raise ValueError("grid side must be >= 1")
    return PointSet(Point2(Fraction(i), Fraction(j)) for i in range(m) for j in range(m))


def circle_point(r: Fraction, t: Fraction) -> Point2:
    """Rational point of the circle of radius ``r`` at half-angle tangent ``t``."""
    s = 1 + t * t
    return Point2(r * (1 - t * t) / s, 2 * r * t / s)


def gen_two_circles(n: int, r1=1, r2=2) -> PointSet:
    """Centre plus the remaining ``n - 1`` points split over two concentric circles.

    The first circle gets ``ceil((n-1)/2)`` points and the second
    ``floor((n-1)/2)``.  Circle points use t = 0, 1, 2, ... in order.
    """
    r1, r2 = as_rational(r1), as_rational(r2)
    if n < 4:
        raise ValueError("two-circle construction needs n >= 4")
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    if r1 == r2:
        raise ValueError("radii must differ")
    rest = n - 1
    counts = ((rest + 1) // 2, rest // 2)
    pts = [Point2(Fraction(0), Fraction(0))]
    taken = set(pts)
    for r, count in zip((r1, r2), counts):
        t = 0
        placed = 0
        while placed < count:
            p = circle_point(r, Fraction(t))
            t += 1
            if p in taken:
                continue
            taken.add(p)
            pts.append(p)
            placed += 1
    return PointSet(pts)


def gen_random(n: int, coord_bound: int, seed: int) -> PointSet:
    if coord_bound < 1:
        raise ValueError("coord_bound must be positive")
    side = 2 * coord_bound + 1
    if n < 0 or n > side * side:
        raise ValueError(f"cannot place {n} distinct points in a {side}x{side} lattice")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    taken = set()
    pts = []
    while len(pts) < n:
        batch = rng.integers(-coord_bound, coord_bound, size=(max(16, n - len(pts)), 2), endpoint=True)
        for x, y in batch.tolist():
            if (x, y) in taken:
                continue
            taken.add((x, y))
            pts.append(Point2(Fraction(x), Fraction(y)))
            if len(pts) == n:
                break
    return PointSet(pts)


def gen_collinear(n: int) -> PointSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    return PointSet(Point2(Fraction(i), Fraction(0)) for i in range(n))


@dataclass(frozen=True)
class GeneratorConfig:
    """One instance request.  ``size`` is m for grids and n otherwise."""

    family: str
    size: int
    r1: Fraction = Fraction(1)
    r2: Fraction = Fraction(2)
    bound: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.size < 0 or (self.size == 0 and self.family != "random"):
            raise ValueError("size must be positive")
        if (self.family == "random") != (self.seed is not None):
            raise ValueError("seed is required for the random family and only for it")

    def build(self) -> PointSet:
        if self.family == "grid":
            return gen_grid(self.size)
        if self.family == "random":
            return gen_random(self.size, self.bound, self.seed)
        if self.family == "two_circles":
            return gen_two_circles(self.size, self.r1, self.r2)
        return gen_collinear(self.size)

    def label(self) -> str:
        if self.family == "grid":
            return f"grid(m={self.size})"
        if self.family == "random":
            return f"random(n={self.size},bound={self.bound},seed={self.seed})"
        if self.family == "two_circles":
            return f"two_circles(n={self.size},r1={self.r1},r2={self.r2})"
        return f"collinear(n={self.size})"
