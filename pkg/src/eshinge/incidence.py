"""Exact point-line incidences in projective 3-space, plane richness, and the
right-hand sides of the Guth-Katz type bounds evaluated on observed sizes.

Counts are exact integers.  Bound right-hand sides are floats: their implicit
constants are unknown, so they only feed ratio summaries.

Plane richness detects planes only.  Reguli are not searched for, so the
reported ``s`` is a lower bound for the plane-or-regulus richness that the
bipartite bound is stated with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation, SizeLimitExceeded
from .klein import IntersectionProfile, PlueckerLine, canonicalize_rows, rich_lines

DEFAULT_RICHNESS_LIMIT = 4096


@dataclass(frozen=True)
class Plane3H:
    """Plane ``A x + B y + C z + D w = 0`` in canonical integer form."""

    coords: tuple

    def __post_init__(self):
        if not any(self.coords[:3]):
            raise ValueError("(A, B, C) must not vanish")

    @property
    def normal(self) -> tuple:
        return self.coords[:3]

    def contains_line(self, l: PlueckerLine) -> bool:
        # direction orthogonal to the normal, and the foot point (d x m : |d|^2) on the plane
        a, b, c, dd = self.coords
        d, m = l.direction, l.moment
        if a * d[0] + b * d[1] + c * d[2]:
            return False
        x = (d[1] * m[2] - d[2] * m[1], d[2] * m[0] - d[0] * m[2], d[0] * m[1] - d[1] * m[0])
        return a * x[0] + b * x[1] + c * x[2] + dd * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) == 0


def _as_array(rows, width):
    rows = [tuple(r) for r in rows]
    big = max((abs(v) for r in rows for v in r), default=0)
    dtype = np.int64 if big < (1 << 20) else object
    return np.array(rows, dtype=dtype).reshape(len(rows), width)


def count_incidences(points, lines) -> int:
    """Number of (point, line) pairs with the point on the line, by full scan."""
    points = list(points)
    lines = list(lines)
    if len({p.coords for p in points}) != len(points):
        raise ValueError("duplicate points")
    if len({l.coords for l in lines}) != len(lines):
        raise ValueError("duplicate lines")
    if not points or not lines:
        return 0
    L = _as_array((l.coords for l in lines), 6)
    d0, d1, d2 = L[:, 0], L[:, 1], L[:, 2]
    m0, m1, m2 = L[:, 3], L[:, 4], L[:, 5]
    total = 0
    for p in points:
        x, y, z, w = p.coords
        # X x dir == W * moment
        hit = (y * d2 - z * d1 == w * m0) & (z * d0 - x * d2 == w * m1) & (x * d1 - y * d0 == w * m2)
        total += int(np.count_nonzero(hit))
    return total


def plane_richness(lines, limit: int = DEFAULT_RICHNESS_LIMIT):
    """Maximum number of lines in one plane, with a witness plane.

    Candidate planes come from meeting pairs: the span of two intersecting
    lines, or the plane through two distinct parallel lines.  A plane holding
    ``s >= 2`` lines produces itself from every pair of them, so grouping the
    candidate planes by line membership finds ``s`` exactly.
    Returns ``(s, Plane3H | None)``; the witness is ``None`` when ``s <= 1``.
    """
    lines = list(lines)
    L = len(lines)
    if L > limit:
        raise SizeLimitExceeded(f"plane richness limited to {limit} lines, got {L}")
    if L < 2:
        return L, None
    C = _as_array((l.coords for l in lines), 6)
    D, M = C[:, :3], C[:, 3:]
    planes = []
    members = []
    for i in range(L - 1):
        dj, mj = D[i + 1:], M[i + 1:]
        di, mi = D[i], M[i]
        omega = dj @ mi + mj @ di
        hit = np.nonzero(omega == 0)[0]
        if not len(hit):
            continue
        dj, mj = dj[hit], mj[hit]
        normal = np.cross(np.broadcast_to(di, dj.shape), dj)
        const = mj @ di
        par = ~np.any(normal != 0, axis=1)
        if np.any(par):
            # plane through line i and the foot point (X : W) of line j
            X = np.cross(dj[par], mj[par])
            W = np.einsum("ij,ij->i", dj[par], dj[par])
            normal[par] = np.cross(X, np.broadcast_to(di, X.shape)) - W[:, None] * mi
            const[par] = X @ mi
        rows = np.concatenate([normal, const[:, None]], axis=1)
        planes.append(rows)
        members.append(np.stack([np.full(len(hit), i), hit + i + 1], axis=1))
    if not planes:
        return 1, None
    rows = canonicalize_rows(np.concatenate(planes))
    pairs = np.concatenate(members)
    # unique plane ids, then distinct lines per plane
    _, plane_id = np.unique(rows, axis=0, return_inverse=True)
    plane_id = plane_id.ravel()
    inc = np.unique(np.concatenate([
        np.stack([plane_id, pairs[:, 0]], axis=1),
        np.stack([plane_id, pairs[:, 1]], axis=1),
    ]), axis=0)
    per_plane = np.bincount(inc[:, 0])
    best = int(np.argmax(per_plane))
    s = int(per_plane[best])
    first = int(np.nonzero(plane_id == best)[0][0])
    witness = Plane3H(tuple(int(v) for v in rows[first]))
    contained = inc[inc[:, 0] == best, 1]
    for li in contained.tolist():
        if not witness.contains_line(lines[li]):
            raise InvariantViolation("plane containment", f"line {li} is not in witness plane {witness.coords}")
    return s, witness


def thm2_rhs(num_points, num_lines, s) -> float:
    """``|L|^(3/4) |P|^(1/2) + s^(1/3) |L|^(1/3) |P|^(2/3) + |L| + |P|``."""
    if min(num_points, num_lines, s) < 0:
        raise ValueError("sizes must be nonnegative")
    if s > num_lines:
        raise ValueError("s cannot exceed |L|")
    P, L, s = float(num_points), float(num_lines), float(s)
    return L**0.75 * P**0.5 + s ** (1 / 3) * L ** (1 / 3) * P ** (2 / 3) + L + P


def thm3_rhs(num_lines, num_lines2, s) -> float:
    """``|L| sqrt(|L'|) + s |L'|`` for the bipartite meet count."""
    if min(num_lines, num_lines2, s) < 0:
        raise ValueError("sizes must be nonnegative")
    if num_lines2 > num_lines:
        raise ValueError("|L'| must not exceed |L|")
    if s > num_lines:
        raise ValueError("s cannot exceed |L|")
    return float(num_lines) * float(num_lines2) ** 0.5 + float(s) * float(num_lines2)


def pk_bound_table(profile: IntersectionProfile) -> list:
    """Rows ``(k, |P_k|, |P_k| k^2 / n^3)`` for every dyadic k <= n."""
    n3 = profile.n**3
    return [(k, size, Fraction(size * k * k, n3)) for k, size in profile.dyadic_sizes.items()]


@dataclass(frozen=True)
class IncidenceReport:
    k: int | None
    t: int | None
    point_count: int
    line_count: int
    incidences: int
    plane_richness: int | None
    witness_plane: Plane3H | None
    thm2_rhs: float | None
    thm2_ratio: float | None
    all_line_count: int
    bipartite_point_count: int
    plane_richness_all: int | None
    thm3_rhs: float | None
    thm3_ratio: float | None


def _ratio(num, den):
    return None if den is None or den <= 0 else num / den


def _richness_of_all(profile: IntersectionProfile, limit: int) -> int:
    # cached on the profile: every (k, t) report shares the same L
    cache = profile.__dict__.setdefault("_plane_richness_all", {})
    if limit not in cache:
        cache[limit] = plane_richness(profile.lines, limit=limit)[0]
    return cache[limit]


def incidence_report(profile: IntersectionProfile, k: int | None = None, t: int | None = None,
                     richness_limit: int = DEFAULT_RICHNESS_LIMIT) -> IncidenceReport:
    """Observed incidences against both bound shapes.

    Without ``k``/``t`` the point set is every meet and the line set all of L.
    With them, lines are ``L_{k,t}``, points are the ``P_k`` points on those
    lines, and the bipartite count uses ``L`` against ``L' = L_{k,t}``.
    Incidence counts come from the recorded meet structure, which lists every
    line of L through each meet point.
    """
    if (k is None) != (t is None):
        raise ValueError("k and t must be given together")
    all_lines = profile.lines
    n_all = len(all_lines)
    inc_pts = profile.incidence_points
    if k is None:
        chosen = np.ones(n_all, dtype=bool)
        pt_ok = np.ones(profile.num_points, dtype=bool)
    else:
        chosen = np.zeros(n_all, dtype=bool)
        chosen[list(rich_lines(profile, k, t).lines)] = True
        pt_ok = (profile.mu >= k) & (profile.mu < 2 * k)
    on_chosen = chosen[profile.point_lines]
    hit_pts = np.unique(inc_pts[on_chosen & pt_ok[inc_pts]])
    incidences = int(np.count_nonzero(on_chosen & pt_ok[inc_pts]))
    bip_points = int(len(np.unique(inc_pts[on_chosen])))
    line_count = int(np.count_nonzero(chosen))

    fam = [all_lines[i] for i in np.nonzero(chosen)[0]]
    s = s_all = None
    witness = None
    if line_count <= richness_limit:
        s, witness = plane_richness(fam, limit=richness_limit)
    if n_all <= richness_limit:
        s_all = s if k is None else _richness_of_all(profile, richness_limit)

    rhs2 = thm2_rhs(len(hit_pts), line_count, s) if s is not None else None
    rhs3 = thm3_rhs(n_all, line_count, s_all) if s_all is not None else None
    return IncidenceReport(
        k=k, t=t,
        point_count=int(len(hit_pts)),
        line_count=line_count,
        incidences=incidences,
        plane_richness=s,
        witness_plane=witness,
        thm2_rhs=rhs2,
        thm2_ratio=_ratio(incidences, rhs2),
        all_line_count=n_all,
        bipartite_point_count=bip_points,
        plane_richness_all=s_all,
        thm3_rhs=rhs3,
        thm3_ratio=_ratio(bip_points, rhs3),
    )
