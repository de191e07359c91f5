"""Desk-scale analysis of length John spaces on discretized planar domains.

Build a grid space over a polygonal domain or an analytic disk (or over a
boundary-marked graph), compute quasihyperbolic geodesics, search optimal
carrot arcs into a center, check the five equivalent John conditions with
explicit constants, construct witness curves case by case, and verify how
the John property transfers through explicit quasisymmetric maps.
"""

from .constructions import (
    ConstantLedger,
    LogPhi,
    chain_construction,
    combined_case_constant,
    construct_carrot_curve,
    construct_case_a,
    construct_case_b,
    derive_c2_from_c1,
    derive_c3_from_c2,
    derive_c3_from_c5,
    derive_phi_from_c1,
    empirical_condition3_bound,
    first_point_with_distance,
    qh_geodesic_oracle,
    route_case,
)
from .curves import (
    GeodesicResult,
    PolyCurve,
    concat_curves,
    curve_from_points,
    curve_from_vertices,
    curve_length,
    qh_length,
    sampled_segment_curve,
)
from .domain import (
    DiscreteSpace,
    Disk,
    GraphSpace,
    Point,
    PolygonalDomain,
    boundary_distance,
    build_graph_space,
    build_grid_space,
    contains,
    diameter,
    load_domain,
    local_quasiconvexity_probe,
)
from .errors import (
    CaseRoutingError,
    ConstructionError,
    DegenerateCurveError,
    DomainError,
    JohnspaceError,
    MalformedCurveError,
    OracleContractError,
    ParameterError,
    ResolutionError,
    SingularPointError,
    UnreachableError,
)
from .estimators import EtaEstimator, JohnAnalyzer, QuasiMapTransformer
from .john import (
    ConditionReport,
    JohnProfile,
    Witness,
    best_carrot_arc,
    carrot_margin,
    check_condition1,
    check_condition2,
    check_condition3,
    check_condition4,
    check_condition5,
    min_carrot_constant_for_curve,
    stratified_sample,
)
from .qhmetric import (
    check_gp_length_bound,
    check_gp_point_bound,
    euclid_geodesic,
    gp_point_bound,
    pairwise_qh,
    qh_diameter_of_curve,
    qh_distance,
    shortest_path_tree,
)
from .quasisym import (
    EtaEstimate,
    LinearMap,
    QuasiMap,
    RadialPower,
    Similarity,
    apply_map,
    assembled_transfer_bound,
    check_coarse_qh_claim,
    check_diameter_carrot_image,
    check_relative_distance_claim,
    estimate_eta,
    eta_inverse_control,
    identity_map,
    image_domain_of,
    load_map,
    push_curve,
    push_space,
    quasisymmetric_transfer,
    small_scale_bound,
    small_scale_threshold,
)

__version__ = "0.1.0"
