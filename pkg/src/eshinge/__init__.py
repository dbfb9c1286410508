"""Exact hinge statistics of plane point sets and their Elekes-Sharir lines in 3-space."""

from .errors import (ESHingeError, InvariantViolation, PointSetError, ResourceLimitExceeded,
                     SizeLimitExceeded)
from .exact import (DistanceProfile, Point2, PointSet, Rational, distance_profile, load_points, parse_points,
                    profile_dot, save_points, squared_distance)
from .generators import GeneratorConfig, gen_collinear, gen_grid, gen_random, gen_two_circles
from .hinges import (DEFAULT, DISTINCT, HingeKey, HingeStats, TripleConvention, brute_force_hinge_stats, cs_check,
                     hinge_energy, hinge_stats)
from .incidence import (IncidenceReport, Plane3H, count_incidences, incidence_report, pk_bound_table,
                        plane_richness, thm2_rhs, thm3_rhs)
from .klein import (IntersectionProfile, PlueckerLine, Point3H, RichLineFamily, build_lines, es_line,
                    intersection_point, intersection_profile, klein_form, line_to_affine, meets, point_on_line,
                    rich_lines)
from .experiments import FitResult, SeriesPoint, fit_power_log, quadruple_count, run_experiment
from .verify import verify

__version__ = "0.1.0"
