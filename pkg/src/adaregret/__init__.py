"""Adaptive-regret online convex optimization: interval-sleeping expert
ensembles with second-order meta-aggregation, composite-loss support, and a
benchmark harness with closed-form regret-bound calculators.
"""
from .core import (
    ConvergenceError,
    Domain,
    InputError,
    InvariantViolation,
    LossSpec,
    NumericalError,
    Regularizer,
    UsageError,
    check_loss_on_domain,
    exp_concave_beta,
    fd_gradient,
    fd_hessian,
)
from .intervals import (
    GCInterval,
    IntervalPartition,
    LifetimeScheduler,
    intervals_containing,
    intervals_starting_at,
    iter_gc_intervals,
    partition,
    partition_piece_bound,
)
from .meta import (
    MetaSlot,
    amlp_update,
    amlp_weights,
    gamma_for_end,
    meta_lemma_gamma_bar,
    meta_lemma_rhs,
    normalized_loss,
    normalized_loss_composite,
    oamlp_update,
    oamlp_weights,
    optimism_fixed_point,
)
from .experts import (
    SURROGATE_GAMMA,
    CompositeScExpert,
    FOBOSExpert,
    OGDDiminishing,
    OGDFixed,
    OGDStronglyConvex,
    ONSCore,
    ProxONSExpert,
    SurrogateExpExpert,
    SurrogateScExpert,
    eta_grid,
    surrogate_exp_eval,
    surrogate_sc_eval,
)
from .algorithms import (
    ALGORITHMS,
    ONE_GRADIENT_ALGORITHMS,
    LearnerConfig,
    MetaLogRow,
    RoundRecord,
    build_learner,
    rate_grid,
    run,
)
from .harness import (
    ALGORITHM_BOUNDS,
    RegretRow,
    SegmentSpec,
    StreamConfig,
    adaptive_regret_report,
    bound_constant_a,
    bound_constant_ahat,
    bound_constant_b,
    bound_constant_c,
    bound_constant_h,
    bound_constant_xi,
    bound_fn_for,
    comparator_dominance_check,
    composite_expert_count,
    composite_phis,
    cumulative_losses,
    gc_interval_regret,
    generate_stream,
    interval_regret,
    offline_comparator,
    second_order_interval_check,
    stream_rows,
    theorem_bound_rhs,
)
from .cli import CONFIG_SCHEMA, run_experiment, validate_config

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ALGORITHM_BOUNDS",
    "CONFIG_SCHEMA",
    "CompositeScExpert",
    "ConvergenceError",
    "Domain",
    "FOBOSExpert",
    "GCInterval",
    "InputError",
    "IntervalPartition",
    "InvariantViolation",
    "LearnerConfig",
    "LifetimeScheduler",
    "LossSpec",
    "MetaLogRow",
    "MetaSlot",
    "NumericalError",
    "OGDDiminishing",
    "OGDFixed",
    "OGDStronglyConvex",
    "ONE_GRADIENT_ALGORITHMS",
    "ONSCore",
    "ProxONSExpert",
    "RegretRow",
    "Regularizer",
    "RoundRecord",
    "SURROGATE_GAMMA",
    "SegmentSpec",
    "StreamConfig",
    "SurrogateExpExpert",
    "SurrogateScExpert",
    "UsageError",
    "adaptive_regret_report",
    "amlp_update",
    "amlp_weights",
    "bound_constant_a",
    "bound_constant_ahat",
    "bound_constant_b",
    "bound_constant_c",
    "bound_constant_h",
    "bound_constant_xi",
    "bound_fn_for",
    "build_learner",
    "check_loss_on_domain",
    "comparator_dominance_check",
    "composite_expert_count",
    "composite_phis",
    "cumulative_losses",
    "eta_grid",
    "exp_concave_beta",
    "fd_gradient",
    "fd_hessian",
    "gamma_for_end",
    "gc_interval_regret",
    "generate_stream",
    "interval_regret",
    "intervals_containing",
    "intervals_starting_at",
    "iter_gc_intervals",
    "meta_lemma_gamma_bar",
    "meta_lemma_rhs",
    "normalized_loss",
    "normalized_loss_composite",
    "oamlp_update",
    "oamlp_weights",
    "offline_comparator",
    "optimism_fixed_point",
    "partition",
    "partition_piece_bound",
    "rate_grid",
    "run",
    "run_experiment",
    "second_order_interval_check",
    "stream_rows",
    "surrogate_exp_eval",
    "surrogate_sc_eval",
    "theorem_bound_rhs",
    "validate_config",
]
