"""Statistic sweeps over instance families and power-log asymptotic fits."""

from __future__ import annotations

import csv
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ESHingeError
from .exact import PointSet, as_rational, format_rational, profile_dot_matrix
from .generators import GeneratorConfig
from .hinges import DEFAULT, DISTINCT, hinge_energy, hinge_stats
from .incidence import pk_bound_table
from .klein import DEFAULT_PROFILE_LIMIT, intersection_profile
from .limits import Deadline

SERIES_HEADER = ["family", "statistic", "n", "value", "runtime_s"]
B_GRID = tuple(range(-3, 4))


# -- multiplicative quadruples ---------------------------------------------

def _totients(N: int) -> np.ndarray:
    phi = np.arange(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def quadruple_count(N: int) -> int:
    """``#{(n1, n2, n3, n4) in [N]^4 : n1 n4 = n2 n3}``.

    Each solution is ``(n1, n2) = (ka, kb)``, ``(n3, n4) = (ja, jb)`` for a
    reduced ratio ``a/b``; there are ``floor(N / max(a, b))`` choices of each
    multiplier, and ``2 phi(m)`` reduced pairs with ``max(a, b) = m > 1``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    phi = _totients(N)
    m = np.arange(1, N + 1, dtype=np.int64)
    weight = 2 * phi[1:]
    weight[0] = 1
    q = N // m
    return int(sum(int(w) * int(x) * int(x) for w, x in zip(weight.tolist(), q.tolist())))


def quadruple_count_products(N: int) -> int:
    """Same count as ``sum over products P of (#{(a, b) in [N]^2 : ab = P})^2``."""
    if N < 1:
        raise ValueError("N must be positive")
    a = np.arange(1, N + 1, dtype=np.int64)
    reps = np.bincount(np.outer(a, a).ravel())
    return int(np.dot(reps, reps))


def quadruple_count_brute(N: int) -> int:
    r = range(1, N + 1)
    return sum(1 for n1 in r for n2 in r for n3 in r for n4 in r if n1 * n4 == n2 * n3)


# -- fits --------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesPoint:
    family: str
    statistic: str
    n: int
    value: float
    runtime_s: float = 0.0


@dataclass(frozen=True)
class FitResult:
    """``value ~ C * n^a * (ln n)^b`` with integer ``b``."""

    a: float
    b: int
    C: float
    residual: float
    statistic: str = ""
    family: str = ""
    points: int = 0

    def as_dict(self) -> dict:
        return {"statistic": self.statistic, "family": self.family, "model": "C*n^a*(ln n)^b",
                "a": self.a, "b": self.b, "C": self.C, "residual": self.residual, "points": self.points}


def fit_power_log(series: Iterable, b_grid=B_GRID, tie_tol: float = 1e-9) -> FitResult:
    """Least-squares fit of ``ln v - b ln ln n = ln C + a ln n`` for each ``b``
    on the grid; the smallest RMS residual wins, preferring ``|b|`` small on ties.

    ``series`` holds :class:`SeriesPoint` objects or ``(n, value)`` pairs.
    """
    items = list(series)
    pts = [(p.n, p.value) if isinstance(p, SeriesPoint) else (p[0], p[1]) for p in items]
    tagged = items[0] if items and isinstance(items[0], SeriesPoint) else None
    stat = tagged.statistic if tagged else ""
    fam = tagged.family if tagged else ""
    if len(pts) < 4:
        raise ValueError("need at least 4 points to fit")
    ns = np.array([float(n) for n, _ in pts])
    vs = np.array([float(v) for _, v in pts])
    if len(set(ns.tolist())) != len(ns):
        raise ValueError("series has repeated n")
    if np.any(vs <= 0):
        raise ValueError("all values must be positive")
    if np.any(ns <= 1):
        raise ValueError("n must exceed 1 so that ln ln n is defined")
    x = np.log(ns)
    lnln = np.log(x)
    A = np.stack([np.ones_like(x), x], axis=1)
    best = None
    for b in sorted(b_grid, key=lambda v: (abs(v), v)):
        y = np.log(vs) - b * lnln
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
        if best is None or resid < best[0] - tie_tol * max(1.0, best[0]):
            best = (resid, b, coef)
    resid, b, (lnC, a) = best
    return FitResult(float(a), int(b), float(math.exp(lnC)), resid, stat, fam, len(pts))


# -- statistics --------------------------------------------------------------

def _max_pk_ratio(points: PointSet, ctx) -> Fraction:
    prof = intersection_profile(points, limit=ctx["profile_limit"], threads=ctx["threads"], deadline=ctx["deadline"])
    rows = pk_bound_table(prof)
    return max((r[2] for r in rows), default=Fraction(0))


def _nu_stats(points, ctx):
    if "_dots" not in ctx:
        ctx["_dots"] = profile_dot_matrix(points)
    return ctx["_dots"].ravel() - 1


STATISTICS: dict = {
    "distinct_hinges": lambda P, ctx: hinge_stats(P, DEFAULT, histogram=False).distinct_count,
    "distinct_hinges_distinct_points": lambda P, ctx: hinge_stats(P, DISTINCT, histogram=False).distinct_count,
    "hinge_energy": lambda P, ctx: hinge_energy(P, DEFAULT),
    "hinge_energy_distinct_points": lambda P, ctx: hinge_energy(P, DISTINCT),
    "max_realisations": lambda P, ctx: hinge_stats(P, DEFAULT, histogram=False).max_realisations,
    "max_nu": lambda P, ctx: int(_nu_stats(P, ctx).max()),
    "sum_nu_sq": lambda P, ctx: int(sum(int(v) * int(v) for v in _nu_stats(P, ctx))),
    "max_pk_ratio": _max_pk_ratio,
    "intersection_points": lambda P, ctx: intersection_profile(
        P, limit=ctx["profile_limit"], threads=ctx["threads"], deadline=ctx["deadline"]).num_points,
}


def _exact_str(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(int(v))


def _instance_configs(spec: dict) -> list:
    fam = spec["family"]
    sizes = spec["sizes"]
    out = []
    for size in sizes:
        kw = {}
        if fam == "random":
            kw["bound"] = int(spec.get("bound", 100))
            kw["seed"] = int(spec["seed"])
        if fam == "two_circles":
            kw["r1"] = as_rational(str(spec.get("r1", "1")))
            kw["r2"] = as_rational(str(spec.get("r2", "2")))
        out.append(GeneratorConfig(fam, int(size), **kw))
    return out


def _read_checkpoint(path: Path) -> dict:
    done = {}
    if path.exists():
        with path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                done[(row["family"], row["statistic"], int(row["n"]))] = row
    return done


def run_experiment(config: dict, threads: int | None = None, limit_seconds: float | None = None,
                   checkpoint=None) -> dict:
    """Generate every configured instance, evaluate each statistic, fit each
    (statistic, family) series with at least 4 usable points.

    ``config`` keys: ``instances`` (list of ``{family, sizes, ...}``),
    ``statistics`` (names from :data:`STATISTICS`), optional ``fit`` (default
    true) and ``profile_limit``.  A failing instance is recorded in its rows
    and the run continues.  With ``checkpoint`` each finished instance is
    appended to that CSV, and rows already there are reused on rerun.
    """
    stats = list(config["statistics"])
    unknown = [s for s in stats if s not in STATISTICS]
    if unknown:
        raise ValueError(f"unknown statistics {unknown}; known: {sorted(STATISTICS)}")
    configs = [c for spec in config["instances"] for c in _instance_configs(spec)]
    threads = threads or os.cpu_count() or 1
    profile_limit = int(config.get("profile_limit", DEFAULT_PROFILE_LIMIT))
    ckpt = Path(checkpoint) if checkpoint else None
    if ckpt:
        # checkpoint rows are keyed by (family, statistic, n); the n of a grid is m^2
        keys = [(c.family, c.size * c.size if c.family == "grid" else c.size) for c in configs]
        if len(set(keys)) != len(keys):
            raise ValueError("checkpointing needs at most one instance per (family, n)")
    done = _read_checkpoint(ckpt) if ckpt else {}
    ckpt_lock = threading.Lock()
    parallel = threads > 1 and len(configs) > 1

    def run_one(cfg: GeneratorConfig) -> list:
        rows = []
        try:
            points = cfg.build()
        except (ValueError, ESHingeError) as exc:
            return [dict(family=cfg.family, label=cfg.label(), n=None, statistic=s, value=None,
                         runtime_s=0.0, error=str(exc)) for s in stats]
        ctx = {"profile_limit": profile_limit, "threads": 1 if parallel else threads, "deadline": None}
        for s in stats:
            key = (cfg.family, s, points.n)
            if key in done:
                rows.append(dict(family=cfg.family, label=cfg.label(), n=points.n, statistic=s,
                                 value=done[key]["value"], runtime_s=float(done[key]["runtime_s"]), error=None))
                continue
            ctx["deadline"] = Deadline(limit_seconds)
            t0 = time.perf_counter()
            try:
                value = _exact_str(STATISTICS[s](points, ctx))
                err = None
            except ESHingeError as exc:
                value, err = None, f"{type(exc).__name__}: {exc}"
            rows.append(dict(family=cfg.family, label=cfg.label(), n=points.n, statistic=s, value=value,
                             runtime_s=time.perf_counter() - t0, error=err))
        return rows

    def run_and_record(cfg):
        rows = run_one(cfg)
        if ckpt:
            fresh = [r for r in rows if r["value"] is not None and (r["family"], r["statistic"], r["n"]) not in done]
            with ckpt_lock:
                _append_series(ckpt, fresh)
        return rows

    if parallel:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_instance = list(pool.map(run_and_record, configs))
    else:
        per_instance = [run_and_record(c) for c in configs]

    rows = [r for group in per_instance for r in group]
    rows.sort(key=lambda r: (r["family"], r["n"] if r["n"] is not None else -1, r["label"], stats.index(r["statistic"])))
    fits = []
    if config.get("fit", True):
        series = {}
        for r in rows:
            if r["value"] is not None and Fraction(r["value"]) > 0 and r["n"] > 1:
                series.setdefault((r["statistic"], r["family"]), {})[r["n"]] = SeriesPoint(
                    r["family"], r["statistic"], r["n"], float(Fraction(r["value"])), r["runtime_s"])
        for (stat, fam), by_n in sorted(series.items()):
            if len(by_n) >= 4:
                pts = [by_n[n] for n in sorted(by_n)]
                fits.append(fit_power_log(pts).as_dict())
    return {"kind": "sweep", "statistics": stats, "rows": rows, "fits": fits}


def _append_series(path: Path, rows: list) -> None:
    new = not path.exists()
    with path.open("a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(SERIES_HEADER)
        for r in rows:
            w.writerow([r["family"], r["statistic"], r["n"], r["value"], f"{r['runtime_s']:.6f}"])


def write_series_csv(rows: list, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_HEADER)
        for r in rows:
            if r["value"] is not None:
                w.writerow([r["family"], r["statistic"], r["n"], r["value"], f"{r['runtime_s']:.6f}"])


def read_series_csv(path) -> list:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SERIES_HEADER:
            raise ValueError(f"series CSV header must be {','.join(SERIES_HEADER)}")
        return [SeriesPoint(r["family"], r["statistic"], int(r["n"]), float(Fraction(r["value"])),
                            float(r["runtime_s"] or 0)) for r in reader]


def fit_series(points: list) -> list:
    groups = {}
    for p in points:
        groups.setdefault((p.statistic, p.family), []).append(p)
    return [fit_power_log(sorted(g, key=lambda p: p.n)).as_dict() for _, g in sorted(groups.items())]
