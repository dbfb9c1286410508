import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eshinge import FitResult, SeriesPoint, fit_power_log, quadruple_count, run_experiment
from eshinge.experiments import (SERIES_HEADER, STATISTICS, fit_series, quadruple_count_brute,
                                 quadruple_count_products, read_series_csv, write_series_csv)


def test_quadruple_examples():
    assert [quadruple_count(N) for N in (1, 2, 3)] == [1, 6, 15]
    with pytest.raises(ValueError):
        quadruple_count(0)


def _enumerate_all_quadruples(N):
    """M(k) for every k <= N from one pass over all N^4 tuples.

    Each tuple with n1 n4 = n2 n3 is bucketed by its largest entry; the
    cumulative sum of the buckets is the count restricted to [k]^4."""
    a = np.arange(1, N + 1)
    prod = np.multiply.outer(a, a).ravel()
    big = np.maximum.outer(a, a).ravel()
    eq = prod[:, None] == prod[None, :]
    top = np.maximum(big[:, None], big[None, :])[eq]
    return np.cumsum(np.bincount(top, minlength=N + 1))


def test_quadruple_count_matches_exhaustive_enumeration_up_to_60():
    want = _enumerate_all_quadruples(60)
    for N in range(1, 61):
        assert quadruple_count(N) == int(want[N]), N


def test_quadruple_paths_agree():
    for N in range(1, 13):
        assert quadruple_count_brute(N) == quadruple_count(N)
    for N in (61, 97, 500, 1999):
        assert quadruple_count_products(N) == quadruple_count(N)


def test_quadruple_ratio_band():
    ns = [1000, 2000, 5000, 10000, 20000, 50000, 100000]
    ratios = [quadruple_count(N) / (N * N * math.log(N)) for N in ns]
    assert all(1.0 <= r <= 1.45 for r in ratios)
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] - ratios[0] < 0.05


NS = [10, 100, 1000, 10000]


def test_fit_examples():
    f = fit_power_log([(n, n * n) for n in NS])
    assert abs(f.a - 2) <= 1e-9 and f.b == 0
    f = fit_power_log([(n, n * math.log(n)) for n in NS])
    assert abs(f.a - 1) <= 0.01 and f.b == 1
    f = fit_power_log([(n, 7) for n in NS])
    assert abs(f.a) < 1e-9 and f.b == 0 and abs(f.C - 7) < 1e-9
    assert f.residual >= 0


@given(st.floats(-3, 5), st.integers(-3, 3), st.floats(0.01, 100))
@settings(max_examples=100)
def test_fit_recovers_planted_exponents(a, b, C):
    ns = [16, 64, 256, 1024, 4096, 2**16, 2**20]
    f = fit_power_log([(n, C * n**a * math.log(n) ** b) for n in ns])
    assert f.b == b
    assert abs(f.a - a) <= 1e-6
    assert math.isclose(f.C, C, rel_tol=1e-6)


@pytest.mark.parametrize("series", [
    [(10, 1), (100, 2), (1000, 3)],
    [(10, 1), (10, 2), (100, 3), (1000, 4)],
    [(10, 1), (100, 0), (1000, 3), (10000, 4)],
    [(1, 1), (100, 2), (1000, 3), (10000, 4)],
])
def test_fit_rejects_degenerate_series(series):
    with pytest.raises(ValueError):
        fit_power_log(series)


def test_fit_tags_and_dict():
    pts = [SeriesPoint("grid", "hinge_energy", n, float(n**4)) for n in NS]
    f = fit_power_log(pts)
    assert isinstance(f, FitResult) and (f.family, f.statistic, f.points) == ("grid", "hinge_energy", 4)
    assert f.as_dict()["model"] == "C*n^a*(ln n)^b"


def test_run_experiment_grid2_energy():
    rep = run_experiment({"instances": [{"family": "grid", "sizes": [2]}], "statistics": ["hinge_energy"]})
    assert [r["value"] for r in rep["rows"]] == ["576"]
    assert rep["rows"][0]["n"] == 4 and rep["fits"] == []


CONFIG = {
    "instances": [
        {"family": "grid", "sizes": [2, 3, 4, 5]},
        {"family": "random", "sizes": [6, 9, 12, 15], "bound": 20, "seed": 3},
        {"family": "two_circles", "sizes": [5, 9, 13, 17], "r1": "1", "r2": "3/2"},
        {"family": "collinear", "sizes": [3, 5, 8, 13]},
    ],
    "statistics": list(STATISTICS),
}


def _strip(rep):
    return json.dumps({**rep, "rows": [{k: v for k, v in r.items() if k != "runtime_s"} for r in rep["rows"]]},
                      sort_keys=True)


def test_run_experiment_is_deterministic_across_threads():
    a = run_experiment(CONFIG, threads=1)
    b = run_experiment(CONFIG, threads=4)
    assert _strip(a) == _strip(b)
    assert len(a["rows"]) == 16 * len(STATISTICS)
    assert all(r["error"] is None for r in a["rows"])
    assert {(f["statistic"], f["family"]) for f in a["fits"]} >= {("hinge_energy", "grid")}
    rows = {(r["family"], r["n"], r["statistic"]): r["value"] for r in a["rows"]}
    assert rows[("grid", 4, "sum_nu_sq")] == "400"
    assert rows[("grid", 4, "max_nu")] == "5"


def test_failures_are_recorded_per_row():
    cfg = {"instances": [{"family": "grid", "sizes": [2, 4]}, {"family": "two_circles", "sizes": [3]}],
           "statistics": ["hinge_energy", "intersection_points"], "profile_limit": 9}
    rep = run_experiment(cfg)
    by = {(r["label"], r["statistic"]): r for r in rep["rows"]}
    assert by[("grid(m=2)", "intersection_points")]["error"] is None
    assert "SizeLimitExceeded" in by[("grid(m=4)", "intersection_points")]["error"]
    assert by[("grid(m=4)", "hinge_energy")]["value"] is not None
    bad = [r for r in rep["rows"] if r["family"] == "two_circles"]
    assert all(r["value"] is None and r["error"] for r in bad)


def test_time_limit_is_recorded():
    cfg = {"instances": [{"family": "grid", "sizes": [9]}], "statistics": ["intersection_points"]}
    rep = run_experiment(cfg, limit_seconds=0)
    assert "ResourceLimitExceeded" in rep["rows"][0]["error"]


def test_unknown_statistic():
    with pytest.raises(ValueError):
        run_experiment({"instances": [], "statistics": ["nope"]})


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck.csv"
    cfg = {"instances": [{"family": "grid", "sizes": [2, 3]}], "statistics": ["hinge_energy", "max_nu"]}
    first = run_experiment(cfg, checkpoint=ck)
    lines = ck.read_text().splitlines()
    assert lines[0] == ",".join(SERIES_HEADER) and len(lines) == 5
    # tamper with one stored value: a rerun must reuse it rather than recompute
    with ck.open() as fh:
        rows = list(csv.reader(fh))
    rows[1][3] = "12345"
    with ck.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    second = run_experiment(cfg, checkpoint=ck)
    vals = {(r["n"], r["statistic"]): r["value"] for r in second["rows"]}
    assert vals[(int(rows[1][2]), rows[1][1])] == "12345"
    assert len(ck.read_text().splitlines()) == 5
    before = {(r["n"], r["statistic"]): r["value"] for r in first["rows"]}
    changed = [k for k in before if before[k] != vals[k]]
    assert changed == [(int(rows[1][2]), rows[1][1])]
    with pytest.raises(ValueError):
        run_experiment({"instances": [{"family": "random", "sizes": [5], "seed": 1},
                                      {"family": "random", "sizes": [5], "seed": 2}],
                        "statistics": ["max_nu"]}, checkpoint=tmp_path / "other.csv")


def test_series_csv_round_trip(tmp_path):
    rep = run_experiment({"instances": [{"family": "grid", "sizes": [2, 3, 4, 5, 6]}],
                          "statistics": ["hinge_energy", "distinct_hinges"]})
    path = tmp_path / "s.csv"
    write_series_csv(rep["rows"], path)
    pts = read_series_csv(path)
    assert len(pts) == 10
    fits = fit_series(pts)
    assert fits == rep["fits"]
    bad = tmp_path / "bad.csv"
    bad.write_text("n,value\n1,2\n")
    with pytest.raises(ValueError):
        read_series_csv(bad)
