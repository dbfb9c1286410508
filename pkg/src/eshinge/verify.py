"""Cross-module oracle suite for one point set.

Every check compares two independently computed quantities, or tests an
exact structural identity, and records a minimal witness on failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import ESHingeError, SizeLimitExceeded
from .exact import PointSet, profile_dot_matrix, squared_distance
from .hinges import DEFAULT, DISTINCT, brute_force_energy, brute_force_hinge_stats, cs_check, hinge_energy, hinge_stats
from .incidence import count_incidences
from .klein import brute_force_meets, build_lines, intersection_profile, klein_form

FAST_LIMIT = 64
FULL_LIMIT = 10
EXHAUSTIVE_MEET_LIMIT = 12
SAMPLED_MEET_PAIRS = 2000


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyResult:
    n: int
    level: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, name, passed, detail=""):
        self.checks.append(CheckResult(name, bool(passed), detail))

    def as_dict(self) -> dict:
        return {"kind": "verify", "n": self.n, "level": self.level, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks]}


def _stats_diff(a, b) -> str:
    for f in ("distinct_count", "energy", "total_triples", "max_realisations", "max_key", "histogram"):
        if getattr(a, f) != getattr(b, f):
            return f"field {f} differs"
    return ""


def _leg_equal(line_a, line_b) -> bool:
    (p, pp), (q, qq) = line_a.source, line_b.source
    return squared_distance(p, q) == squared_distance(pp, qq)


def verify(points: PointSet, level: str = "fast", lines=None, seed: int = 0) -> VerifyResult:
    """Run the invariant suite.

    ``lines`` overrides the Elekes-Sharir lines used by the line-level checks
    (negative controls pass corrupted copies); the intersection profile is
    always rebuilt from ``points``.
    """
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    n = points.n
    limit = FAST_LIMIT if level == "fast" else FULL_LIMIT
    if n > limit:
        raise SizeLimitExceeded(f"verify --level {level} supports n <= {limit}, got n={n}")
    res = VerifyResult(n, level)
    if n == 0:
        res.add("nonempty input", False, "empty point set")
        return res

    # hinge engine against direct triple enumeration
    stats = {}
    for conv in (DEFAULT, DISTINCT):
        try:
            fast = hinge_stats(points, conv, histogram=True)
        except ESHingeError as exc:
            res.add(f"hinge statistics ({conv.label})", False, str(exc))
            continue
        slow = brute_force_hinge_stats(points, conv)
        stats[conv] = fast
        res.add(f"hinge oracle equivalence ({conv.label})", fast == slow, _stats_diff(fast, slow))
        res.add(f"Cauchy-Schwarz ({conv.label})", cs_check(fast),
                f"|H|={fast.distinct_count}, E_H={fast.energy}, total={fast.total_triples}")
    energy = stats[DEFAULT].energy if DEFAULT in stats else None
    six = hinge_energy(points, DEFAULT)
    res.add("six-tuple identity", six == energy, f"sum m(q,q')^2 = {six}, E_H = {energy}")

    lines = build_lines(points) if lines is None else list(lines)
    bad = [i for i, l in enumerate(lines) if not l.on_klein_quadric()]
    res.add("Klein-quadric membership", not bad, f"line {bad[0]} coords {lines[bad[0]].coords}" if bad else "")
    coords = [l.coords for l in lines]
    dup = len(set(coords)) != len(coords)
    mism = [i for i, l in enumerate(lines) if l.coords[2] == 0 or l.source_points() != tuple(l.source)]
    res.add("injectivity", not dup and not mism,
            "duplicate line coordinates" if dup else (f"line {mism[0]} does not decode to its source" if mism else ""))

    # meet predicate against leg-distance equality
    L = len(lines)
    if n <= EXHAUSTIVE_MEET_LIMIT:
        pairs = ((a, b) for a in range(L) for b in range(a + 1, L))
    else:
        rng = random.Random(seed)
        pairs = ((a, b) for a, b in (rng.sample(range(L), 2) for _ in range(SAMPLED_MEET_PAIRS)))
    wrong = next(((a, b) for a, b in pairs if (klein_form(lines[a], lines[b]) == 0) != _leg_equal(lines[a], lines[b])), None)
    res.add("meet-predicate equivalence", wrong is None, f"line pair {wrong}" if wrong else "")

    prof = intersection_profile(points, limit=max(n, 1))
    res.add("concurrency bound mu <= n", prof.max_mu <= n, f"max mu = {prof.max_mu}")
    m = profile_dot_matrix(points).ravel()
    off = np.nonzero(prof.nu != m - 1)[0]
    res.add("nu consistency", len(off) == 0,
            f"line {int(off[0])}: nu={int(prof.nu[off[0]])}, m-1={int(m[off[0]] - 1)}" if len(off) else "")
    mu_pairs = sum(int(x) * (int(x) - 1) for x in prof.mu)
    res.add("double counting", mu_pairs == prof.sum_nu, f"sum mu(mu-1)={mu_pairs}, sum nu={prof.sum_nu}")
    covered = sum(prof.dyadic_sizes.values())
    res.add("dyadic partition", covered == prof.num_points and bool(np.all(prof.mu >= 2)),
            f"{covered} of {prof.num_points} points bucketed")
    bridge = sum((int(v) + 1) ** 2 for v in prof.nu)
    res.add("energy bridge", bridge == energy, f"sum (nu+1)^2 = {bridge}, E_H = {energy}")

    if level == "full":
        for conv in (DEFAULT, DISTINCT):
            if conv in stats:
                e6 = brute_force_energy(points, conv)
                res.add(f"O(n^6) energy ({conv.label})", e6 == stats[conv].energy,
                        f"pairs of congruent triples = {e6}, E_H = {stats[conv].energy}")
        oracle = {k: frozenset(v) for k, v in brute_force_meets(points).items()}
        same = oracle == prof.point_map
        res.add("intersection oracle", same, "" if same else
                f"{len(oracle)} oracle points vs {prof.num_points} join points")
        pts = [prof.point(i) for i in range(prof.num_points)]
        inc = count_incidences(pts, prof.lines)
        res.add("incidence scan", inc == len(prof.point_lines), f"scan {inc}, recorded {len(prof.point_lines)}")
    return res
