"""Distant representatives for axis-aligned rectangles in the plane.

Pick one point per rectangle so the closest pair of chosen points is as
far apart as possible, under L1, L2 or Linf.  This package implements a
delta-parameterized approximate decision procedure (success: points
pairwise >= delta; failure: certifies delta > optimum / f with f = 5,
sqrt(34), 6 per norm) plus per-norm optimizers built on it, all in exact
rational / quadratic-field arithmetic.  Desk-scale oracles (an exact
Linf optimizer for tiny instances and a certified lower-bound search)
support verification.
"""

from .geometry import (
    Instance,
    L1,
    L2,
    LINF,
    Norm,
    NORMS,
    Point,
    Rect,
    distance,
    ingest,
    rect_center,
)
from .grid import (
    BlockerShape,
    GridContext,
    OWNERSHIP_CAP,
    blockers_touching,
    classify_big,
    grid_index,
    is_anchor,
    make_context,
    owned_blockers,
    point_in_intersection,
    shape_distance,
)
from .optimize import (
    CandidateMatrix,
    OptimizeResult,
    SEARCH_STRATEGY,
    candidate_set_explicit,
    fallback_one_over_n,
    matrix_select,
    optimize,
    optimize_l1_l2,
    optimize_linf,
    simplest_between,
)
from .oracle import OracleResult, exact_linf_optimum, lower_bound_search
from .placement import (
    CriticalProbeResult,
    MatchGraph,
    MatchingUncovered,
    PlacementFailure,
    PlacementSuccess,
    ProbeTag,
    SmallPairTooClose,
    check_points,
    critical_probe,
    hopcroft_karp,
    placement,
    placement_details,
)
from .scalars import (
    DualScalar,
    QuadScalar,
    Rational,
    approx_float,
    dual_floor_index,
    isqrt,
    quad_sign,
)

__version__ = "0.1.0"
