"""Hinge statistics of a plane point set.

A hinge is the class of triples ``(p, q, r)`` sharing the ordered pair of
squared leg lengths ``(|p-q|^2, |q-r|^2)``.  Realisation counts aggregate over
the middle point: ``r_H(d1, d2) = sum_q c_q(d1) c_q(d2)``, which is the
``(d1, d2)`` entry of ``C^T C`` for the sparse profile matrix ``C``.  The
brute-force enumerator below walks every triple instead and is the oracle for
the matrix path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .errors import InvariantViolation, SizeLimitExceeded
from .exact import PointSet, profile_dot_matrix, profile_matrix, squared_distance

DEFAULT_HISTOGRAM_LIMIT = 2_000_000
DEFAULT_ORACLE_LIMIT = 64


class HingeKey(NamedTuple):
    d1: Fraction
    d2: Fraction


@dataclass(frozen=True)
class TripleConvention:
    """Which triples count.

    ``include_degenerate=False`` keeps only triples of three distinct points.
    ``ordered=False`` merges the keys ``(d1, d2)`` and ``(d2, d1)``; every
    triple is still counted exactly once.
    """

    include_degenerate: bool = True
    ordered: bool = True

    @property
    def label(self) -> str:
        parts = ["all-triples" if self.include_degenerate else "distinct-points"]
        parts.append("ordered" if self.ordered else "unordered")
        return "/".join(parts)

    def as_dict(self) -> dict:
        return {"include_degenerate": self.include_degenerate, "ordered": self.ordered}


DEFAULT = TripleConvention()
DISTINCT = TripleConvention(include_degenerate=False)


@dataclass(frozen=True)
class HingeStats:
    convention: TripleConvention
    n: int
    distinct_count: int
    energy: int
    total_triples: int
    max_realisations: int
    max_key: HingeKey | None
    histogram: dict | None = None


def _sum_squares(values: np.ndarray, bound: int) -> int:
    """Exact sum of squares; ``bound`` is an upper bound on the true result."""
    if bound < 2**63:
        v = values.astype(np.int64, copy=False)
        return int(np.dot(v, v))
    return sum(int(x) * int(x) for x in values)


def _hinge_matrix(points: PointSet, conv: TripleConvention):
    """Sparse realisation matrix (rows d1, cols d2) and its distance labels."""
    pm = profile_matrix(points)
    c = pm.counts
    values = pm.values
    if not conv.include_degenerate:
        c = c[:, 1:]
        values = values[1:]
    g = (c.T @ c).tocsr()
    if not conv.include_degenerate:
        # remove triples (p, q, p): they sit on the diagonal, one per (p, q) pair
        g = g - sparse.diags(np.asarray(c.sum(axis=0)).ravel(), format="csr")
    if not conv.ordered:
        g = sparse.triu(g, format="csr") + sparse.tril(g, k=-1, format="csr").T
    g = g.tocsr()
    g.eliminate_zeros()
    g.sort_indices()
    return g, values


def hinge_stats(points: PointSet, conv: TripleConvention = DEFAULT, histogram: bool | None = None,
                histogram_limit: int = DEFAULT_HISTOGRAM_LIMIT) -> HingeStats:
    """|H|, E_H, totals and the realisation histogram via per-center profiles.

    ``histogram=None`` materialises the histogram only when it has at most
    ``histogram_limit`` keys.  The Cauchy-Schwarz relation
    ``|H| * E_H >= total**2`` is checked on every call.
    """
    n = points.n
    if n < 1:
        raise ValueError("hinge statistics need at least one point")
    g, values = _hinge_matrix(points, conv)
    data = g.data
    distinct = int(g.nnz)
    total = int(data.sum(dtype=np.int64)) if distinct else 0
    energy = _sum_squares(data, n**6) if distinct else 0

    if distinct:
        top = int(np.argmax(data))
        row = int(np.searchsorted(g.indptr, top, side="right") - 1)
        col = int(g.indices[top])
        max_r = int(data[top])
        max_key = HingeKey(points.true_distance(values[row]), points.true_distance(values[col]))
    else:
        max_r, max_key = 0, None

    hist = None
    if histogram or (histogram is None and distinct <= histogram_limit):
        coo = g.tocoo()
        true = [points.true_distance(v) for v in values]
        hist = {HingeKey(true[i], true[j]): int(r) for i, j, r in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())}

    stats = HingeStats(conv, n, distinct, energy, total, max_r, max_key, hist)
    expected_total = n**3 if conv.include_degenerate else n * (n - 1) * (n - 2)
    if total != expected_total:
        raise InvariantViolation("triple count", f"aggregated {total} triples, expected {expected_total}")
    if not cs_check(stats):
        raise InvariantViolation("Cauchy-Schwarz", f"|H|={distinct}, E_H={energy}, total={total}")
    return stats


def hinge_energy(points: PointSet, conv: TripleConvention = DEFAULT) -> int:
    """E_H.  Under the default convention this is the six-tuple count
    ``sum_{q, q'} m(q, q')^2`` and never builds the hinge histogram."""
    if conv.include_degenerate:
        m = profile_dot_matrix(points)
        return _sum_squares(m.ravel(), points.n**6)
    return hinge_stats(points, conv, histogram=False).energy


def brute_force_hinge_stats(points: PointSet, conv: TripleConvention = DEFAULT,
                            limit: int = DEFAULT_ORACLE_LIMIT) -> HingeStats:
    """Same contract as :func:`hinge_stats`, by enumerating every triple."""
    n = points.n
    if n > limit:
        raise SizeLimitExceeded(f"brute-force hinge oracle limited to n <= {limit}, got n={n}")
    if n < 1:
        raise ValueError("hinge statistics need at least one point")
    dist = [[squared_distance(p, q) for q in points] for p in points]
    hist = Counter()
    for q in range(n):
        row = dist[q]
        for p in range(n):
            d1 = row[p]
            for r in range(n):
                if not conv.include_degenerate and (p == q or q == r or p == r):
                    continue
                d2 = row[r]
                if not conv.ordered and d2 < d1:
                    hist[HingeKey(d2, d1)] += 1
                else:
                    hist[HingeKey(d1, d2)] += 1
    if hist:
        max_r = max(hist.values())
        max_key = min(k for k, v in hist.items() if v == max_r)
    else:
        max_r, max_key = 0, None
    return HingeStats(
        convention=conv,
        n=n,
        distinct_count=len(hist),
        energy=sum(v * v for v in hist.values()),
        total_triples=sum(hist.values()),
        max_realisations=max_r,
        max_key=max_key,
        histogram=dict(hist),
    )


def cs_check(stats: HingeStats) -> bool:
    """Whether ``|H| >= total^2 / E_H`` holds, compared exactly."""
    if stats.energy == 0:
        if stats.total_triples:
            raise InvariantViolation("Cauchy-Schwarz", "zero energy with a nonzero triple count")
        return True
    return stats.distinct_count * stats.energy >= stats.total_triples**2


def brute_force_energy(points: PointSet, conv: TripleConvention = DEFAULT, limit: int = 10) -> int:
    """E_H as the number of ordered pairs of congruent triples, O(n^6)."""
    n = points.n
    if n > limit:
        raise SizeLimitExceeded(f"O(n^6) energy oracle limited to n <= {limit}, got n={n}")
    dist = [[squared_distance(p, q) for q in points] for p in points]
    keys = []
    for p in range(n):
        for q in range(n):
            for r in range(n):
                if not conv.include_degenerate and len({p, q, r}) < 3:
                    continue
                k = (dist[p][q], dist[q][r])
                keys.append(k if conv.ordered else tuple(sorted(k)))
    return sum(1 for a in keys for b in keys if a == b)
