"""Second-order uncertainty with Dirichlet mixtures.

Level-2 predictors (Dirichlets, mixtures, point masses), regularized
level-2 losses, quantized-entropy uncertainty measures, an empirical loss
minimizer over two-component mixtures, and a reproducible experiment
harness with a CLI (``elm-lab``).
"""

from .dist import (
    ALPHA_MAX,
    Dirac,
    Dirichlet,
    DirichletMixture,
    DirichletParams,
    Level2Distribution,
    NoDensityError,
    SimplexPoint,
    capped_dirichlet_proxy,
    categorical_sample,
    kl_dirichlet,
    level2_mean,
    level2_pdf,
    level2_sample,
)
from .entropy import (
    SimplexGrid,
    build_simplex_grid,
    dirichlet_differential_entropy,
    get_simplex_grid,
    quantized_entropy,
    quantized_probs,
)
from .experiments import (
    AuditReport,
    CurveResult,
    Scenario,
    TableResult,
    TheoremReport,
    builtin_curve,
    builtin_scenario,
    read_scenario,
    run_appropriateness_audit,
    run_curve,
    run_table,
    run_theorem_report,
    write_results,
)
from .level2 import (
    KLToDirichlet,
    LossConfig,
    NegEntropyUniformPrior,
    NoRegularizer,
    differential_entropy,
    empirical_l2_risk,
    expected_l1,
    expected_l2_risk_under_truth,
    gibbs_posterior,
    jensen_gap,
    level2_loss,
    regularizer_value,
)
from .losses import Level1LossKind, empirical_risk, level1_loss
from .optimizer import ElmFit, FitError, OptimizerConfig, dirac_check, fit_elm
from .rng import SeededRng

__version__ = "0.1.0"

__all__ = [
    "ALPHA_MAX",
    "AuditReport",
    "CurveResult",
    "Dirac",
    "Dirichlet",
    "DirichletMixture",
    "DirichletParams",
    "ElmFit",
    "FitError",
    "KLToDirichlet",
    "Level1LossKind",
    "Level2Distribution",
    "LossConfig",
    "NegEntropyUniformPrior",
    "NoDensityError",
    "NoRegularizer",
    "OptimizerConfig",
    "Scenario",
    "SeededRng",
    "SimplexGrid",
    "SimplexPoint",
    "TableResult",
    "TheoremReport",
    "build_simplex_grid",
    "builtin_curve",
    "builtin_scenario",
    "capped_dirichlet_proxy",
    "categorical_sample",
    "differential_entropy",
    "dirac_check",
    "dirichlet_differential_entropy",
    "empirical_l2_risk",
    "empirical_risk",
    "expected_l1",
    "expected_l2_risk_under_truth",
    "fit_elm",
    "get_simplex_grid",
    "gibbs_posterior",
    "jensen_gap",
    "kl_dirichlet",
    "level1_loss",
    "level2_loss",
    "level2_mean",
    "level2_pdf",
    "level2_sample",
    "quantized_entropy",
    "quantized_probs",
    "read_scenario",
    "regularizer_value",
    "run_appropriateness_audit",
    "run_curve",
    "run_table",
    "run_theorem_report",
    "write_results",
]
