"""JSON report builders and the schemas they are guaranteed to satisfy.

Exact rationals and integers that may exceed 2**53 are strings; floats are
only used for ratio summaries and bound right-hand sides.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exact import PointSet, format_rational, profile_dot_matrix
from .hinges import HingeStats, cs_check
from .incidence import IncidenceReport, pk_bound_table
from .klein import IntersectionProfile, rich_line_table

_RAT = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
_INT_STR = {"type": "string", "pattern": r"^-?[0-9]+$"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_INT_OR_NULL = {"type": ["integer", "null"]}


def _obj(props: dict, required=None) -> dict:
    return {"type": "object", "properties": props, "required": list(required or props), "additionalProperties": False}


SCHEMAS = {
    "hinges": _obj({
        "kind": {"const": "hinges"},
        "n": {"type": "integer"},
        "convention": _obj({"include_degenerate": {"type": "boolean"}, "ordered": {"type": "boolean"},
                            "label": {"type": "string"}}),
        "distinct_count": {"type": "integer"},
        "energy": _INT_STR,
        "total_triples": {"type": "integer"},
        "max_realisations": {"oneOf": [{"type": "null"}, _obj({
            "key": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2},
            "count": {"type": "integer"}})]},
        "cauchy_schwarz": {"type": "boolean"},
        "histogram": {"oneOf": [{"type": "null"}, {"type": "array", "items": _obj(
            {"d1": _RAT, "d2": _RAT, "count": {"type": "integer"}})}]},
    }),
    "lines": _obj({
        "kind": {"const": "lines"},
        "n": {"type": "integer"},
        "method": {"enum": ["points", "dots"]},
        "line_count": {"type": "integer"},
        "degenerate_lines": {"type": "integer"},
        "max_nu": {"type": "integer"},
        "sum_nu": _INT_STR,
        "sum_nu_sq": _INT_STR,
        "nu_histogram": {"type": "array", "items": _obj({"nu": {"type": "integer"}, "lines": {"type": "integer"}})},
    }),
    "points3d": _obj({
        "kind": {"const": "points3d"},
        "n": {"type": "integer"},
        "num_points": {"type": "integer"},
        "max_mu": {"type": "integer"},
        "pk_table": {"type": "array", "items": _obj({
            "k": {"type": "integer"}, "size": {"type": "integer"}, "ratio": _RAT, "ratio_float": {"type": "number"}})},
        "lkt_table": {"type": "array", "items": _obj({
            "k": {"type": "integer"}, "t": {"type": "integer"}, "size": {"type": "integer"},
            "incidences": {"type": "integer"}, "ratio": _RAT, "ratio_float": {"type": "number"}})},
    }),
    "incidence": _obj({
        "kind": {"const": "incidence"},
        "n": {"type": "integer"},
        "k": _INT_OR_NULL,
        "t": _INT_OR_NULL,
        "point_count": {"type": "integer"},
        "line_count": {"type": "integer"},
        "incidences": {"type": "integer"},
        "plane_richness": _INT_OR_NULL,
        "plane_only_s": {"const": True},
        "witness_plane": {"oneOf": [{"type": "null"}, {"type": "array", "items": _INT_STR, "minItems": 4, "maxItems": 4}]},
        "thm2_rhs": _NUM_OR_NULL,
        "thm2_ratio": _NUM_OR_NULL,
        "all_line_count": {"type": "integer"},
        "bipartite_point_count": {"type": "integer"},
        "plane_richness_all": _INT_OR_NULL,
        "thm3_rhs": _NUM_OR_NULL,
        "thm3_ratio": _NUM_OR_NULL,
    }),
    "quadruples": _obj({
        "kind": {"const": "quadruples"},
        "N": {"type": "integer"},
        "count": _INT_STR,
        "ratio_to_N2_lnN": _NUM_OR_NULL,
    }),
    "fit": _obj({
        "kind": {"const": "fit"},
        "fits": {"type": "array", "items": {"$ref": "#/$defs/fit"}},
    }),
    "sweep": _obj({
        "kind": {"const": "sweep"},
        "statistics": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": _obj({
            "family": {"type": "string"}, "label": {"type": "string"}, "n": _INT_OR_NULL,
            "statistic": {"type": "string"}, "value": {"oneOf": [{"type": "null"}, _RAT]},
            "runtime_s": {"type": "number"}, "error": {"type": ["string", "null"]}})},
        "fits": {"type": "array", "items": {"$ref": "#/$defs/fit"}},
    }),
    "verify": _obj({
        "kind": {"const": "verify"},
        "n": {"type": "integer"},
        "level": {"enum": ["fast", "full"]},
        "passed": {"type": "boolean"},
        "checks": {"type": "array", "items": _obj(
            {"name": {"type": "string"}, "passed": {"type": "boolean"}, "detail": {"type": "string"}})},
    }),
}

_FIT = _obj({"statistic": {"type": "string"}, "family": {"type": "string"}, "model": {"const": "C*n^a*(ln n)^b"},
             "a": {"type": "number"}, "b": {"type": "integer", "minimum": -3, "maximum": 3},
             "C": {"type": "number"}, "residual": {"type": "number", "minimum": 0}, "points": {"type": "integer"}})
for _name in ("fit", "sweep"):
    SCHEMAS[_name]["$defs"] = {"fit": _FIT}


def hinges_report(stats: HingeStats) -> dict:
    mx = None
    if stats.max_key is not None:
        mx = {"key": [format_rational(stats.max_key.d1), format_rational(stats.max_key.d2)],
              "count": stats.max_realisations}
    hist = None
    if stats.histogram is not None:
        hist = [{"d1": format_rational(k.d1), "d2": format_rational(k.d2), "count": v}
                for k, v in sorted(stats.histogram.items())]
    return {
        "kind": "hinges",
        "n": stats.n,
        "convention": {**stats.convention.as_dict(), "label": stats.convention.label},
        "distinct_count": stats.distinct_count,
        "energy": str(stats.energy),
        "total_triples": stats.total_triples,
        "max_realisations": mx,
        "cauchy_schwarz": cs_check(stats),
        "histogram": hist,
    }


def _nu_report(n, nu, method) -> dict:
    values, counts = np.unique(nu, return_counts=True)
    return {
        "kind": "lines",
        "n": n,
        "method": method,
        "line_count": int(len(nu)),
        "degenerate_lines": n,
        "max_nu": int(nu.max()) if len(nu) else 0,
        "sum_nu": str(sum(int(v) for v in nu)),
        "sum_nu_sq": str(sum(int(v) * int(v) for v in nu)),
        "nu_histogram": [{"nu": int(v), "lines": int(c)} for v, c in zip(values, counts)],
    }


def lines_report(points: PointSet, profile: IntersectionProfile | None = None) -> dict:
    """Per-line meet counts, from point grouping when a profile is given and
    from distance-profile dot products otherwise."""
    if profile is not None:
        return _nu_report(points.n, profile.nu, "points")
    return _nu_report(points.n, profile_dot_matrix(points).ravel() - 1, "dots")


def points3d_report(profile: IntersectionProfile) -> dict:
    n = profile.n
    pk = [{"k": k, "size": size, "ratio": format_rational(r), "ratio_float": float(r)}
          for k, size, r in pk_bound_table(profile)]
    lkt = []
    for k, t, size, inc in rich_line_table(profile):
        r = Fraction(size * (k * t) ** 2, n**4)
        lkt.append({"k": k, "t": t, "size": size, "incidences": inc, "ratio": format_rational(r), "ratio_float": float(r)})
    return {"kind": "points3d", "n": n, "num_points": profile.num_points, "max_mu": profile.max_mu,
            "pk_table": pk, "lkt_table": lkt}


def incidence_report_json(n: int, rep: IncidenceReport) -> dict:
    return {
        "kind": "incidence",
        "n": n,
        "k": rep.k,
        "t": rep.t,
        "point_count": rep.point_count,
        "line_count": rep.line_count,
        "incidences": rep.incidences,
        "plane_richness": rep.plane_richness,
        "plane_only_s": True,
        "witness_plane": [str(v) for v in rep.witness_plane.coords] if rep.witness_plane else None,
        "thm2_rhs": rep.thm2_rhs,
        "thm2_ratio": rep.thm2_ratio,
        "all_line_count": rep.all_line_count,
        "bipartite_point_count": rep.bipartite_point_count,
        "plane_richness_all": rep.plane_richness_all,
        "thm3_rhs": rep.thm3_rhs,
        "thm3_ratio": rep.thm3_ratio,
    }


def quadruples_report(N: int, count: int) -> dict:
    ratio = count / (N * N * math.log(N)) if N > 1 else None
    return {"kind": "quadruples", "N": N, "count": str(count), "ratio_to_N2_lnN": ratio}
