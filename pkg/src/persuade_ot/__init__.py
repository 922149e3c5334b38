"""Optimal information policies on planar priors via entropic power diagrams."""

from .benchmarks import (
    BenchmarkRow,
    best_lloyd_revenue,
    full_info_revenue,
    improvement_table,
    lloyd_revenue,
    no_info_revenue,
)
from .entropic import (
    EntropicConfig,
    SoftCellStats,
    SoftPartition,
    c_transform,
    dual_value,
    sinkhorn_dual_solve,
    soft_partition,
    soft_partition_grads,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateMeasureError,
    NumericFailure,
    SingularPenaltyError,
)
from .grid import DensitySpec, GridMeasure, build_grid, discretize_density
from .objective import (
    ObjectiveConfig,
    ObjectiveReport,
    hard_objective,
    objective_gradient,
    penalty_value,
    soft_objective,
    value_and_grad,
)
from .optimizer import (
    OptimizerConfig,
    OptResult,
    init_sites,
    mc_gradient,
    optimize,
    prune_cells,
)
from .payoffs import (
    MarketConfig,
    PayoffModel,
    PurchaseBreakdown,
    clip_halfplane,
    concave_bowl,
    monopolist_payoff,
    phi_eval,
    phi_grad,
    polygon_area,
    purchase_breakdown,
    revenue,
    tri_modal,
)
from .power_diagram import (
    CellStats,
    DiagramParams,
    HardAssignment,
    hard_assign,
    hard_cell_stats,
    lloyd_solve,
    lloyd_step,
    quantization_energy,
    sd_dual_solve,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkRow",
    "CellStats",
    "ConfigError",
    "ConvergenceError",
    "DegenerateMeasureError",
    "DensitySpec",
    "DiagramParams",
    "EntropicConfig",
    "GridMeasure",
    "HardAssignment",
    "MarketConfig",
    "NumericFailure",
    "ObjectiveConfig",
    "ObjectiveReport",
    "OptResult",
    "OptimizerConfig",
    "PayoffModel",
    "PurchaseBreakdown",
    "SingularPenaltyError",
    "SoftCellStats",
    "SoftPartition",
    "best_lloyd_revenue",
    "build_grid",
    "c_transform",
    "clip_halfplane",
    "concave_bowl",
    "discretize_density",
    "dual_value",
    "full_info_revenue",
    "hard_assign",
    "hard_cell_stats",
    "hard_objective",
    "improvement_table",
    "init_sites",
    "lloyd_revenue",
    "lloyd_solve",
    "lloyd_step",
    "mc_gradient",
    "monopolist_payoff",
    "no_info_revenue",
    "objective_gradient",
    "optimize",
    "penalty_value",
    "phi_eval",
    "phi_grad",
    "polygon_area",
    "prune_cells",
    "purchase_breakdown",
    "quantization_energy",
    "revenue",
    "sd_dual_solve",
    "sinkhorn_dual_solve",
    "soft_objective",
    "soft_partition",
    "soft_partition_grads",
    "tri_modal",
    "value_and_grad",
]
