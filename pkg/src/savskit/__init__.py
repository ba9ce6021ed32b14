"""Sparse Bayesian regression with signal-adaptive post-fit variable selection.

The toolkit fits Gaussian linear models under the horseshoe prior by Gibbs
sampling, converts the (dense) posterior mean into an exact variable
selection with a tuning-free thresholding rule, provides the coordinate
descent machinery that justifies the rule, and ships a seeded Monte Carlo
benchmark harness with confusion-matrix scoring.
"""

__version__ = "0.1.0"

from .bench import (
    BenchConfig,
    BenchReport,
    DesignSpec,
    SignalSpec,
    covariance_entry,
    generate_design,
    generate_truth,
    run_replicates,
)
from .coord_descent import (
    CdTrace,
    EarlyStopReport,
    coordinate_descent,
    early_stop_report,
    objective,
    soft_threshold,
)
from .data import RegressionData, TruthSpec, column_sq_norms, load_csv, save_csv
from .errors import ConfigError, DataError, NumericalError, SavskitError
from .horseshoe import (
    HorseshoeState,
    McmcConfig,
    PosteriorSummary,
    gibbs_fit,
    half_cauchy_mixture,
    initial_state,
    sample_beta_conditional,
    sample_global_scale,
    sample_local_scales,
    sample_noise_variance,
)
from .metrics import AggregateMetrics, SelectionMetrics, aggregate, classify, from_counts
from .savs import SparseEstimate, adaptive_penalties, savs, savs_inclusion_frequency

__all__ = [
    "__version__",
    "AggregateMetrics",
    "BenchConfig",
    "BenchReport",
    "CdTrace",
    "ConfigError",
    "DataError",
    "DesignSpec",
    "EarlyStopReport",
    "HorseshoeState",
    "McmcConfig",
    "NumericalError",
    "PosteriorSummary",
    "RegressionData",
    "SavskitError",
    "SelectionMetrics",
    "SignalSpec",
    "SparseEstimate",
    "TruthSpec",
    "adaptive_penalties",
    "aggregate",
    "classify",
    "column_sq_norms",
    "coordinate_descent",
    "covariance_entry",
    "early_stop_report",
    "from_counts",
    "generate_design",
    "generate_truth",
    "gibbs_fit",
    "half_cauchy_mixture",
    "initial_state",
    "load_csv",
    "objective",
    "run_replicates",
    "sample_beta_conditional",
    "sample_global_scale",
    "sample_local_scales",
    "sample_noise_variance",
    "save_csv",
    "savs",
    "savs_inclusion_frequency",
    "soft_threshold",
]
