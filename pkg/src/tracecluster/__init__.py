"""Constraint-aware trace clustering for process event logs.

The pipeline: parse a log (CSV or XES), group it into variants, lift
expert must-link/cannot-link constraints onto the variants, then either
cluster a constraint-adjusted distance matrix hierarchically (ged,
kgram, mra) or run the model-driven assignment procedure (condritrac).
Evaluation covers model quality (weighted f1), partition overlap
(Jaccard) and constraint violations; a synthetic benchmark harness
replays the whole protocol on planted ground truths.
"""

from ._version import __version__
from .ahc import Dendrogram, adjust_matrix, constrained_cluster, ward_ahc
from .benchmark import (
    ClusterSkeleton,
    SweepConfig,
    SyntheticLogSpec,
    generate_log,
    parse_method,
    read_sweep_config,
    run_experiment,
    write_results_csv,
    write_summary_json,
)
from .condritrac import (
    AssignmentRecord,
    AssignmentTrace,
    CondritracConfig,
    Evaluation,
    condritrac,
    write_assignment_trace,
)
from .constraints import (
    ConstraintSet,
    ExtendedConstraintSet,
    VariantConstraintSet,
    empty_variant_constraints,
    extend,
    generate_constraints,
    k_bounded_max_clique,
    lift,
    read_constraints_tsv,
    validate,
    write_constraints_tsv,
)
from .discovery import (
    ConformanceResult,
    DirectlyFollowsStats,
    ProcessModel,
    discover,
    escaping_precision,
    f1,
    replay_recall,
    sublog_of_variants,
    write_model_dot,
    write_model_json,
)
from .errors import (
    DomainMismatchError,
    EmptyClusterError,
    EmptyLogError,
    InfeasibleKError,
    InfeasibleSamplingError,
    IntraVariantCannotLinkError,
    InvalidConstraintsError,
    InvalidSpecError,
    KOutOfRangeError,
    MlClConflictError,
    TraceClusterError,
    UnknownTraceIdError,
    UnsatisfiableConstraintsError,
)
from .evaluation import (
    EvaluationReport,
    F1Report,
    evaluate_solution,
    informativeness_report,
    jaccard_index,
    relative_improvement,
    violation_percentages,
    weighted_f1,
    write_report_json,
)
from .log_model import (
    ColumnMapping,
    Event,
    EventLog,
    GroupedEventLog,
    Trace,
    Variant,
    group,
    log_statistics,
    parse_csv,
    parse_xes,
    write_csv,
)
from .similarity import (
    DistanceMatrix,
    distance_matrix,
    ged,
    kgram_features,
    method_tag,
    mra_features,
    vector_distance,
    write_matrix_csv,
)
from .solution import (
    ClusteringSolution,
    read_trace_csv,
    write_solution_json,
    write_trace_csv,
    write_variant_csv,
)

import types as _types

__all__ = sorted(
    name
    for name, value in list(globals().items())
    if not name.startswith("_") and not isinstance(value, _types.ModuleType)
)
