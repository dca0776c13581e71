"""Pair-wise base-station coordination on irregular topologies.

Cluster construction (2nd-order Voronoi pairs, Delaunay edge colouring,
area-based edge cutting), analytical evaluators for rate coverage and
ergodic spectral efficiency, and a Monte-Carlo engine comparing the
colouring plan with dynamic and static clustering.
"""

from .rng import substream, derive_seed
from .topology import (
    Rect,
    Topology,
    UserSet,
    generate_perturbed_grid,
    generate_ppp,
    drop_users,
    load_topology,
    save_topology,
)
from .geometry import (
    DelaunayGraph,
    AreaEstimate,
    delaunay,
    nearest_two,
    nearest_two_many,
    in_second_order_region,
    estimate_region_areas,
)
from .graphcolor import (
    CutGraph,
    EdgeColoring,
    ClusterPlan,
    edge_cut,
    edge_color,
    build_cluster_plan,
)
from .association import (
    ServiceAssignment,
    associate_proposed,
    schedule_dynamic,
    assign_static,
    assign_single_cell,
)
from .channel import ScenarioParams, draw_fading, zf_cbf, sinr, pilot_overhead
from .analysis import (
    FixedGeometry,
    digamma,
    laplace_interference,
    rate_coverage_exact,
    rate_coverage_approx,
    ergodic_se_exact,
    ergodic_se_lower,
    ergodic_se_ppp_lower,
)
from .jet import Jet
from .simrunner import (
    TopologySpec,
    ExperimentConfig,
    ResultTable,
    run_rate_coverage,
    run_edge_user_throughput,
    run_validation,
)

__version__ = "0.1.0"
