"""Broad learning systems with fixed and adaptive robust kernels."""

__version__ = "0.1.0"

from .adaptive import AdaptiveConfig, AdaptiveTrace, arbls_fit, determine_scale, select_alpha
from .bench import ExperimentConfig, ExperimentReport, render_report, run_experiment, structure_search
from .data import Dataset, load_csv, mae, normalize, rmse, split, summarize
from .estimators import ARBLSRegressor, BLSRegressor, MBLSRegressor
from .kernels import (
    KernelSpec,
    PartitionTable,
    adaptive_nll,
    build_partition_table,
    influence,
    irls_weight,
    partition_exact,
    partition_truncated,
    rho_general,
)
from .network import NetworkConfig, build_hidden, init_nodes
from .noise import OutlierSpec, StableSpec, add_stable_noise, inject_outliers, sample_stable
from .solvers import (
    FitTrace,
    SolverConfig,
    irls_fit,
    normalized_residuals,
    ridge_solve,
    weighted_ridge_solve,
    weighting_operator,
)
