"""Oblivious reconfigurable network designs and exact verification.

Connection schedules and oblivious routing schemes for time-varying
1-regular networks, with exact-rational flow accounting, a matching-based
worst-case throughput verifier, and the closed-form latency/throughput
tradeoff scale.
"""

from .core import (
    ConnectionSchedule,
    DemandFunction,
    EdgeRef,
    Flow,
    RoutePath,
    RoutingScheme,
    VirtualNode,
    build_virtual_topology_window,
    edge_flow,
    induce_flow,
    is_feasible,
    schedule_from_document,
    schedule_from_json,
    schedule_to_document,
    schedule_to_json,
    walk_path,
)
from .schedules import (
    EbsParams,
    PrimitiveRootParams,
    VbsParams,
    doubled_phase_schedule,
    ebs_schedule,
    find_primitive_root,
    primitive_root_schedule,
    unroll_schedule,
    vbs_schedule,
)
from .routing import (
    DesignChoice,
    EbsRouting,
    SemiPath,
    VbsRouting,
    ebs_full_paths,
    ebs_semi_path,
    scheme_for_schedule,
    select_design,
    vbs_full_paths,
    vbs_he_semi_path,
    vbs_sb_semi_path,
)
from .analysis import (
    EdgeFlowReport,
    EdgeWeightMatrix,
    ThroughputCertificate,
    congestion_report,
    edge_weights,
    guaranteed_throughput,
    inflate_demand,
    max_weight_perfect_matching,
    permutation_demand,
    uniform_demand,
)
from .bounds import (
    RateDecomposition,
    TradeoffPoint,
    counting_bound,
    decompose_rate,
    l_star,
    reachable_within,
    tradeoff_curve,
)

__version__ = "0.1.0"
