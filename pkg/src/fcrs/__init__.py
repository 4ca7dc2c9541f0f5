"""Fixed-cluster repair system: bandwidth-optimal storage over clustered
servers, with exact-repair codes, trade-off analysis, and simulation."""

from .comparison import (
    BaselineParams,
    ComparisonRow,
    baseline_mbr,
    baseline_thresholds,
    baseline_tradeoff_alpha,
    comparison_rows,
    converse_bound,
    cubic_ratio,
    emit_fig4_table,
    emit_fig6_table,
    functional_ratio,
)
from .cubic_code import (
    ClusterParams,
    ClusterState,
    CubicPlan,
    RepairTranscript,
    coverage_count,
    encode_file,
    gamma_cubic,
    load_state,
    plan_parameters,
    recover_file,
    repair,
    save_state,
)
from .errors import (
    CorruptionError,
    InfeasibleError,
    InsufficientDataError,
    ParameterError,
    StructuralError,
    UnsupportedScaleError,
)
from .flow_analysis import (
    CutSequence,
    FailureEvent,
    FlowGraph,
    FlowInstance,
    SweepPoint,
    TradeoffPoint,
    build_flow_graph,
    fstar_closed,
    fstar_sequence,
    mbr_point,
    min_cut,
    sweep_min_cut,
    tradeoff_alpha,
    tradeoff_csv,
    tradeoff_thresholds,
    twin_sequence,
)
from .galois_mds import (
    MdsCodeSpec,
    field_add,
    field_inverse,
    field_mul,
    rs_decode,
    rs_decode_batch,
    rs_encode,
    rs_encode_batch,
)
from .repair_sim import (
    BandwidthLedger,
    LedgerEntry,
    RecoveryReport,
    Schedule,
    generate_schedule,
    run_simulation,
    verify_recovery,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "CorruptionError",
    "InfeasibleError",
    "InsufficientDataError",
    "ParameterError",
    "StructuralError",
    "UnsupportedScaleError",
    # finite field / base code
    "MdsCodeSpec",
    "field_add",
    "field_inverse",
    "field_mul",
    "rs_decode",
    "rs_decode_batch",
    "rs_encode",
    "rs_encode_batch",
    # layout and storage
    "ClusterParams",
    "ClusterState",
    "CubicPlan",
    "RepairTranscript",
    "coverage_count",
    "encode_file",
    "gamma_cubic",
    "load_state",
    "plan_parameters",
    "recover_file",
    "repair",
    "save_state",
    # flow analysis
    "CutSequence",
    "FailureEvent",
    "FlowGraph",
    "FlowInstance",
    "SweepPoint",
    "TradeoffPoint",
    "build_flow_graph",
    "fstar_closed",
    "fstar_sequence",
    "mbr_point",
    "min_cut",
    "sweep_min_cut",
    "tradeoff_alpha",
    "tradeoff_csv",
    "tradeoff_thresholds",
    "twin_sequence",
    # baseline comparison
    "BaselineParams",
    "ComparisonRow",
    "baseline_mbr",
    "baseline_thresholds",
    "baseline_tradeoff_alpha",
    "comparison_rows",
    "converse_bound",
    "cubic_ratio",
    "emit_fig4_table",
    "emit_fig6_table",
    "functional_ratio",
    # simulation
    "BandwidthLedger",
    "LedgerEntry",
    "RecoveryReport",
    "Schedule",
    "generate_schedule",
    "run_simulation",
    "verify_recovery",
]
