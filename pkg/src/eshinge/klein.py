"""Elekes-Sharir lines in projective 3-space and their pairwise intersections.

An ordered pair ``(p, p')`` of plane points maps to the line

    ((p2'-p2)/2 : (p1-p1')/2 : 1 : (p2'+p2)/2 : -(p1+p1')/2 : (|p|^2-|p'|^2)/4)

in Pluecker coordinates ``(direction : moment)`` with ``moment = base x dir``.
Two such lines meet exactly when ``|p-q| = |p'-q'|``; the common point encodes
the orientation-preserving rigid motion sending ``p -> p'`` and ``q -> q'``.
Rotations give finite points (rotation centre, half-angle cotangent) and
translations give points at infinity.

All coordinates are canonical coprime integer vectors whose first nonzero
entry is positive, so they hash and compare exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .errors import InvariantViolation, SizeLimitExceeded
from .exact import Point2, PointSet, scaled_distance_matrix
from .limits import Deadline

DEFAULT_PROFILE_LIMIT = 128
# rows per vectorised block in the distance-bucket join
_BLOCK_ROWS = 1 << 21


def canonical_int_vector(values) -> tuple:
    """Scale a nonzero rational vector to coprime integers, first nonzero > 0."""
    vals = [Fraction(v) for v in values]
    den = reduce(math.lcm, (v.denominator for v in vals), 1)
    ints = [int(v * den) for v in vals]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        raise ValueError("the zero vector has no projective representative")
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


@dataclass(frozen=True)
class PlueckerLine:
    coords: tuple
    source: tuple | None = field(default=None, compare=False)

    @property
    def direction(self) -> tuple:
        return self.coords[:3]

    @property
    def moment(self) -> tuple:
        return self.coords[3:]

    def on_klein_quadric(self) -> bool:
        c = self.coords
        return c[0] * c[3] + c[1] * c[4] + c[2] * c[5] == 0

    def source_points(self) -> tuple:
        """Recover ``(p, p')`` from the coordinates alone."""
        c = self.coords
        if c[2] == 0:
            raise ValueError("not an Elekes-Sharir line: third coordinate is zero")
        a, b, _, cc, d, _ = (Fraction(v, c[2]) for v in c)
        # a = (p2'-p2)/2, b = (p1-p1')/2, cc = (p2'+p2)/2, d = -(p1+p1')/2
        p1, p1b = b - d, -d - b
        p2, p2b = cc - a, cc + a
        return Point2(p1, p2), Point2(p1b, p2b)


@dataclass(frozen=True)
class Point3H:
    coords: tuple

    def __post_init__(self):
        if not any(self.coords):
            raise ValueError("zero vector is not a projective point")

    @classmethod
    def from_values(cls, values) -> "Point3H":
        return cls(canonical_int_vector(values))

    @property
    def at_infinity(self) -> bool:
        return self.coords[3] == 0

    def affine(self) -> tuple:
        if self.at_infinity:
            raise ValueError("point at infinity has no affine coordinates")
        w = self.coords[3]
        return tuple(Fraction(v, w) for v in self.coords[:3])

    def __str__(self):
        if self.at_infinity:
            return "(" + " : ".join(map(str, self.coords)) + ")"
        return "(" + " : ".join(str(v) for v in self.affine()) + " : 1)"


def es_line(p: Point2, p2: Point2) -> PlueckerLine:
    """The Elekes-Sharir line of the ordered pair ``(p, p2)``."""
    raw = (
        (p2.y - p.y) / 2,
        (p.x - p2.x) / 2,
        Fraction(1),
        (p2.y + p.y) / 2,
        -(p.x + p2.x) / 2,
        (p.x * p.x + p.y * p.y - p2.x * p2.x - p2.y * p2.y) / 4,
    )
    return PlueckerLine(canonical_int_vector(raw), (p, p2))


def klein_form(l: PlueckerLine, l2: PlueckerLine):
    """Polarised Klein form; zero exactly when the two lines meet."""
    a, b = l.coords, l2.coords
    return a[0] * b[3] + a[3] * b[0] + a[1] * b[4] + a[4] * b[1] + a[2] * b[5] + a[5] * b[2]


def meets(l: PlueckerLine, l2: PlueckerLine) -> bool:
    if l.coords == l2.coords:
        raise ValueError("meet predicate is undefined for identical lines")
    return klein_form(l, l2) == 0


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def line_to_affine(l: PlueckerLine) -> tuple:
    """``(base, dir)`` with ``dir`` scaled to unit third coordinate and
    ``base`` the foot of the perpendicular from the origin."""
    c = l.coords
    if c[2] == 0:
        raise ValueError("horizontal line (third coordinate zero) is outside the Elekes-Sharir chart")
    d = tuple(Fraction(v, c[2]) for v in c[:3])
    m = tuple(Fraction(v, c[2]) for v in c[3:])
    dd = _dot(d, d)
    base = tuple(v / dd for v in _cross(d, m))
    return base, d


def intersection_point(l: PlueckerLine, l2: PlueckerLine) -> Point3H:
    """Common projective point of two distinct meeting lines, by direct solve."""
    if l.coords == l2.coords:
        raise ValueError("identical lines have no unique intersection")
    if klein_form(l, l2) != 0:
        raise ValueError("lines do not meet")
    b1, d1 = line_to_affine(l)
    b2, d2 = line_to_affine(l2)
    n = _cross(d1, d2)
    nn = _dot(n, n)
    if nn == 0:
        # parallel: they meet on the plane at infinity in their common direction
        return Point3H.from_values((*d1, 0))
    diff = tuple(y - x for x, y in zip(b1, b2))
    t = _dot(_cross(diff, d2), n) / nn
    pt = tuple(b + t * d for b, d in zip(b1, d1))
    # the solve must land on the second line as well
    off = tuple(x - b for x, b in zip(pt, b2))
    if any(_cross(off, d2)):
        raise InvariantViolation("intersection solve", f"point {pt} is not on the second line")
    return Point3H.from_values((*pt, 1))


def point_on_line(pt: Point3H, l: PlueckerLine) -> bool:
    """Homogeneous incidence: ``X x dir == W * moment``."""
    x, w = pt.coords[:3], pt.coords[3]
    return _cross(x, l.direction) == tuple(w * v for v in l.moment)


def _int_lines(points: PointSet) -> np.ndarray:
    """Canonical coordinates of all n^2 lines, row ``i*n + j`` for ``(P[i], P[j])``."""
    n = points.n
    s = points.scale
    xy = points.int_array()
    if 4 * max(s, points.max_abs_coord) ** 2 >= 2**62:
        xy = xy.astype(object)
    x = xy[:, 0]
    y = xy[:, 1]
    norm = x * x + y * y
    i = np.repeat(np.arange(n), n)
    j = np.tile(np.arange(n), n)
    raw = np.stack([
        2 * s * (y[j] - y[i]),
        2 * s * (x[i] - x[j]),
        np.full(n * n, 4 * s * s, dtype=xy.dtype),
        2 * s * (y[j] + y[i]),
        -2 * s * (x[i] + x[j]),
        norm[i] - norm[j],
    ], axis=1)
    return canonicalize_rows(raw)


def canonicalize_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise gcd reduction with the first nonzero entry made positive."""
    if rows.shape[0] == 0:
        return rows
    g = np.gcd.reduce(rows, axis=1)
    if np.any(g == 0):
        raise ValueError("zero row cannot be canonicalised")
    rows = rows // g[:, None]
    nz = rows != 0
    lead = rows[np.arange(rows.shape[0]), np.argmax(nz, axis=1)]
    sign = np.where(lead < 0, -1, 1).astype(rows.dtype)
    return rows * sign[:, None]


def build_lines(points: PointSet) -> list:
    """All n^2 Elekes-Sharir lines, indexed ``i*n + j``; asserts injectivity."""
    n = points.n
    coords = _int_lines(points)
    lines = []
    for idx, row in enumerate(coords.tolist()):
        i, j = divmod(idx, n)
        lines.append(PlueckerLine(tuple(int(v) for v in row), (points[i], points[j])))
    if len({l.coords for l in lines}) != len(lines):
        raise InvariantViolation("injectivity", "two source pairs produced the same line")
    return lines


# -- distance-bucket join --------------------------------------------------

def _pair_classes(points: PointSet):
    """Ordered pairs of distinct points grouped by squared distance.

    Returns ``(src, dst, starts)``: pairs sorted by distance with class ``c``
    occupying ``starts[c]:starts[c+1]``.
    """
    n = points.n
    dist = scaled_distance_matrix(points)
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    d = dist[i, j]
    order = np.argsort(d, kind="stable")
    i, j, d = i[order], j[order], d[order]
    if d.dtype == object:
        change = [0] + [k for k in range(1, len(d)) if d[k] != d[k - 1]] + [len(d)]
        starts = np.array(change, dtype=np.int64)
    else:
        starts = np.concatenate(([0], np.nonzero(np.diff(d))[0] + 1, [len(d)])).astype(np.int64)
    return i.astype(np.int64), j.astype(np.int64), starts


def _motion_points(xy, s, p, q, pp, qq):
    """Canonical 3D points for rows mapping ``p -> pp``, ``q -> qq``.

    With ``delta = p - q`` and ``delta' = pp - qq`` as complex numbers the
    rotation is ``(u + iv) / N`` where ``N = |delta|^2`` and
    ``u + iv = delta' * conj(delta)``.  The centre and the half-angle
    cotangent then have the common denominator ``2N(N-u)``; the identity
    rotation (``v == 0, u == N``) is a translation and lands at infinity.
    """
    x, y = xy[:, 0], xy[:, 1]
    px, py = x[p], y[p]
    ppx, ppy = x[pp], y[pp]
    dx, dy = px - x[q], py - y[q]
    ex, ey = ppx - x[qq], ppy - y[qq]
    nrm = dx * dx + dy * dy
    u = ex * dx + ey * dy
    v = ey * dx - ex * dy
    t1 = nrm * ppx - (u * px - v * py)
    t2 = nrm * ppy - (u * py + v * px)
    a = nrm - u
    out = np.empty((len(p), 4), dtype=xy.dtype)
    out[:, 0] = t1 * a - t2 * v
    out[:, 1] = t2 * a + t1 * v
    out[:, 2] = -2 * nrm * v * s
    out[:, 3] = 2 * nrm * a * s
    trans = (v == 0) & (a == 0)
    if np.any(trans):
        ti = np.nonzero(trans)[0]
        out[ti, 0] = ppy[ti] - py[ti]
        out[ti, 1] = px[ti] - ppx[ti]
        out[ti, 2] = 2 * s
        out[ti, 3] = 0
    return canonicalize_rows(out)


def _join_blocks(starts, limit_rows=_BLOCK_ROWS):
    """Split distance classes into (class_start, class_end, a_lo, a_hi) work items."""
    items = []
    for c in range(len(starts) - 1):
        lo, hi = int(starts[c]), int(starts[c + 1])
        size = hi - lo
        step = max(1, limit_rows // max(size, 1))
        for a in range(lo, hi, step):
            items.append((lo, hi, a, min(hi, a + step)))
    return items


def _join_item(xy, s, n, src, dst, item):
    lo, hi, a_lo, a_hi = item
    a = np.repeat(np.arange(a_lo, a_hi), hi - lo)
    b = np.tile(np.arange(lo, hi), a_hi - a_lo)
    p, q, pp, qq = src[a], dst[a], src[b], dst[b]
    pts = _motion_points(xy, s, p, q, pp, qq)
    return pts, p * n + pp


def _motion_bound_ok(points: PointSet) -> bool:
    m = points.max_abs_coord
    # |point coords| <= 576 M^5 * scale; keep clear of int64 overflow with margin
    return 1024 * m**5 * max(points.scale, 1) < 2**62 and points.fits_int64


@dataclass
class IntersectionProfile:
    """Grouping of all pairwise meets of the n^2 lines by common point.

    ``point_coords`` holds canonical 4-vectors in sorted order; point ``i`` is
    incident to ``point_lines[point_ptr[i]:point_ptr[i+1]]``.  Only points with
    multiplicity ``mu >= 2`` are present.
    """

    n: int
    lines: list
    point_coords: np.ndarray
    point_ptr: np.ndarray
    point_lines: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    meeting_rows: int
    method: str

    @property
    def num_points(self) -> int:
        return len(self.mu)

    @property
    def num_lines(self) -> int:
        return self.n * self.n

    @cached_property
    def sum_nu(self) -> int:
        return int(sum(int(v) for v in self.nu))

    @cached_property
    def sum_nu_sq(self) -> int:
        return int(sum(int(v) * int(v) for v in self.nu))

    @property
    def max_mu(self) -> int:
        return int(self.mu.max()) if len(self.mu) else 0

    def point(self, i: int) -> Point3H:
        return Point3H(tuple(int(v) for v in self.point_coords[i]))

    def lines_through(self, i: int) -> np.ndarray:
        return self.point_lines[self.point_ptr[i]:self.point_ptr[i + 1]]

    @cached_property
    def point_map(self) -> dict:
        """Point3H -> frozenset of incident line indices (built on demand)."""
        return {self.point(i): frozenset(self.lines_through(i).tolist()) for i in range(self.num_points)}

    @cached_property
    def incidence_points(self) -> np.ndarray:
        """Point index for each entry of ``point_lines``."""
        return np.repeat(np.arange(self.num_points), np.diff(self.point_ptr))

    def dyadic_levels(self) -> list:
        """Dyadic k = 2, 4, ... <= n."""
        ks = []
        k = 2
        while k <= self.n:
            ks.append(k)
            k *= 2
        return ks

    def dyadic_points(self, k: int) -> np.ndarray:
        """Indices of P_k: points whose multiplicity lies in [k, 2k)."""
        return np.nonzero((self.mu >= k) & (self.mu < 2 * k))[0]

    @cached_property
    def dyadic_sizes(self) -> dict:
        return {k: int(len(self.dyadic_points(k))) for k in self.dyadic_levels()}

    def line_support(self, k: int) -> np.ndarray:
        """Per line, the number of P_k points it passes through."""
        mu_inc = self.mu[self.incidence_points]
        mask = (mu_inc >= k) & (mu_inc < 2 * k)
        return np.bincount(self.point_lines[mask], minlength=self.num_lines)

    def degenerate_line_count(self) -> int:
        return self.n


def intersection_profile(points: PointSet, limit: int = DEFAULT_PROFILE_LIMIT, threads: int | None = None,
                         method: str = "auto", deadline: Deadline | None = None) -> IntersectionProfile:
    """Enumerate every meeting line pair by the distance-bucket join and group
    the meets by common point.

    For each squared distance ``d`` and each two ordered pairs ``(p, q)``,
    ``(p', q')`` at that distance, the lines ``l_{pp'}`` and ``l_{qq'}`` meet
    at the motion point; each row records the incidence ``(point, l_{pp'})``.
    ``method`` selects the vectorised int64 path (``"numpy"``), the
    arbitrary-precision path (``"python"``), or picks by coordinate size.
    """
    n = points.n
    if n > limit:
        raise SizeLimitExceeded(f"intersection profile limited to n <= {limit}, got n={n}")
    if method == "auto":
        method = "numpy" if _motion_bound_ok(points) else "python"
    if method == "numpy" and not _motion_bound_ok(points):
        raise SizeLimitExceeded("coordinates too large for the int64 join; use method='python'")
    lines = build_lines(points)
    if n < 2:
        empty = np.zeros((0, 4), dtype=np.int64)
        return IntersectionProfile(n, lines, empty, np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64),
                                   np.zeros(0, dtype=np.int64), np.zeros(n * n, dtype=np.int64), 0, method)
    src, dst, starts = _pair_classes(points)
    if method == "numpy":
        pts, line_ids = _numpy_join(points, src, dst, starts, threads, deadline)
        coords, ptr, plines = _group_incidences(pts, line_ids)
    else:
        coords, ptr, plines, rows = _python_join(points, src, dst, starts, deadline)
    mu = np.diff(ptr).astype(np.int64)
    meeting_rows = int(sum(int(m) * (int(m) - 1) for m in mu))
    line_mu = np.repeat(mu, mu)
    nu = np.zeros(n * n, dtype=np.int64)
    np.add.at(nu, plines, line_mu - 1)
    if method == "numpy" and meeting_rows != len(line_ids):
        raise InvariantViolation("double counting", f"{len(line_ids)} join rows vs sum mu(mu-1) = {meeting_rows}")
    if method == "python" and meeting_rows != rows:
        raise InvariantViolation("double counting", f"{rows} join rows vs sum mu(mu-1) = {meeting_rows}")
    return IntersectionProfile(n, lines, coords, ptr, plines, mu, nu, meeting_rows, method)


def _numpy_join(points, src, dst, starts, threads, deadline):
    xy = points.int_array()
    s = points.scale
    n = points.n
    items = _join_blocks(starts)
    threads = threads or os.cpu_count() or 1

    def work(item):
        if deadline is not None:
            deadline.check()
        return _join_item(xy, s, n, src, dst, item)

    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, items))
    else:
        parts = [work(item) for item in items]
    pts = np.concatenate([p for p, _ in parts])
    line_ids = np.concatenate([l for _, l in parts])
    return pts, line_ids


def _group_incidences(pts, line_ids):
    """Unique (point, line) incidences grouped by point in lexicographic order."""
    order = np.lexsort((line_ids, pts[:, 3], pts[:, 2], pts[:, 1], pts[:, 0]))
    pts = pts[order]
    line_ids = line_ids[order]
    new_point = np.ones(len(pts), dtype=bool)
    new_point[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    new_inc = new_point.copy()
    new_inc[1:] |= line_ids[1:] != line_ids[:-1]
    inc_pts = pts[new_inc]
    plines = line_ids[new_inc]
    inc_new_point = new_point[new_inc]
    coords = inc_pts[inc_new_point]
    ptr = np.concatenate((np.nonzero(inc_new_point)[0], [len(plines)])).astype(np.int64)
    return coords, ptr, plines.astype(np.int64)


def _canon_ints(vec):
    g = reduce(math.gcd, vec, 0)
    vec = [v // g for v in vec]
    if next(v for v in vec if v) < 0:
        vec = [-v for v in vec]
    return tuple(vec)


def _python_join(points, src, dst, starts, deadline):
    """Arbitrary-precision twin of the numpy join, for huge rational coordinates."""
    n = points.n
    s = points.scale
    xy = points.int_coords
    groups = {}
    rows = 0
    for c in range(len(starts) - 1):
        if deadline is not None:
            deadline.check()
        lo, hi = int(starts[c]), int(starts[c + 1])
        pairs = [(int(src[k]), int(dst[k])) for k in range(lo, hi)]
        for p, q in pairs:
            (px, py), (qx, qy) = xy[p], xy[q]
            dx, dy = px - qx, py - qy
            nrm = dx * dx + dy * dy
            for pp, qq in pairs:
                (ppx, ppy), (qqx, qqy) = xy[pp], xy[qq]
                ex, ey = ppx - qqx, ppy - qqy
                u = ex * dx + ey * dy
                v = ey * dx - ex * dy
                a = nrm - u
                if v == 0 and a == 0:
                    vec = (ppy - py, px - ppx, 2 * s, 0)
                else:
                    t1 = nrm * ppx - (u * px - v * py)
                    t2 = nrm * ppy - (u * py + v * px)
                    vec = (t1 * a - t2 * v, t2 * a + t1 * v, -2 * nrm * v * s, 2 * nrm * a * s)
                key = _canon_ints(vec)
                groups.setdefault(key, set()).add(p * n + pp)
                rows += 1
    keys = sorted(groups)
    coords = np.array(keys, dtype=object).reshape(len(keys), 4)
    sizes = [len(groups[k]) for k in keys]
    ptr = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
    plines = np.array([l for k in keys for l in sorted(groups[k])], dtype=np.int64)
    return coords, ptr, plines, rows


# -- richness --------------------------------------------------------------

@dataclass(frozen=True)
class RichLineFamily:
    k: int
    t: int
    lines: tuple

    def __len__(self):
        return len(self.lines)


def _check_dyadic(v, name):
    if v < 1 or v & (v - 1):
        raise ValueError(f"{name} must be a power of two >= 1, got {v}")


def rich_lines(profile: IntersectionProfile, k: int, t: int) -> RichLineFamily:
    """L_{k,t}: lines through a number of P_k points in [t, 2t)."""
    _check_dyadic(k, "k")
    _check_dyadic(t, "t")
    support = profile.line_support(k)
    idx = np.nonzero((support >= t) & (support < 2 * t))[0]
    return RichLineFamily(k, t, tuple(int(i) for i in idx))


def rich_line_table(profile: IntersectionProfile) -> list:
    """All nonempty (k, t, |L_{k,t}|, I(P_k, L_{k,t})) rows."""
    out = []
    for k in profile.dyadic_levels():
        support = profile.line_support(k)
        nz = support[support > 0]
        if not len(nz):
            continue
        level = np.floor(np.log2(nz)).astype(np.int64)
        # guard against float log2 on exact powers of two
        level = np.where((1 << (level + 1)) <= nz, level + 1, level)
        level = np.where((1 << level) > nz, level - 1, level)
        for lev in np.unique(level).tolist():
            sel = nz[level == lev]
            out.append((k, 1 << int(lev), int(len(sel)), int(sel.sum())))
    return out


def brute_force_meets(points: PointSet, limit: int = 12) -> dict:
    """Oracle: all line pairs tested with the Klein form, meets solved directly.

    Returns ``{Point3H: set of line indices}`` restricted to points where at
    least two lines meet.
    """
    n = points.n
    if n > limit:
        raise SizeLimitExceeded(f"all-pairs line oracle limited to n <= {limit}, got n={n}")
    lines = build_lines(points)
    groups = {}
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            if meets(lines[a], lines[b]):
                pt = intersection_point(lines[a], lines[b])
                g = groups.setdefault(pt, set())
                g.add(a)
                g.add(b)
    return groups
