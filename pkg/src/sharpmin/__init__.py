"""Sharp-minimizer diagnostics on finite point clouds, grids and metric trees."""

from .funcspace import (
    INF,
    ConeParams,
    GridFunction,
    PointCloudFunction,
    eval_cone,
    make_norm_cone,
    make_tent,
    sample_to_cloud,
    sample_to_grid,
)
from .metricspaces import (
    DistanceCombination,
    FiniteMetricSpace,
    MetricTree,
    TreeLocation,
    edge_loc,
    node_loc,
    tree_distance,
    tree_geodesic,
    validate_metric,
)
from .sharpness import (
    LipschitzFunctionSpec,
    SharpnessReport,
    TiltVector,
    cone_gap,
    global_slope,
    lipschitz_probe,
    mcshane_extend,
    sharpness_modulus,
    slope_infimum,
    tilt_probe,
    tilt_radius,
    verify_characterizations,
)
from .legendre import (
    DualGrid,
    TransformResult,
    biconjugate,
    conjugate,
    conjugate_brute,
    convex_envelope_1d,
    transform,
    verify_biconjugate_sharpness,
)
from .metricopt import (
    EkelandResult,
    FiniteSpaceFunctional,
    LocalSharpnessParams,
    TreeFunctional,
    cat0_check,
    convex_perturbation_probe,
    ekeland,
    geodesic_convexity_check,
    local_sharpness,
    local_slope_h,
    slope_sharpness_check,
    lipschitz_invariance_probe,
)

__version__ = "0.1.0"
