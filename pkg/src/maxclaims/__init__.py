"""Dependence models for the largest claims of two coupled insurance portfolios.

The package builds the copula ``C(u1, u2) = L(-ln Q(v1, v2))`` of componentwise
claim maxima from a base copula ``Q`` and a claim-count law ``N >= 1`` with
Laplace transform ``L``, and ships the surrounding machinery: exact samplers,
pseudo-maximum-likelihood fitting (censored and uncensored), dependence
diagnostics, and Monte Carlo studies for largest-claim influence and
reinsurance premiums.
"""

from .aggregate import (
    PoissonCount,
    PremiumGrid,
    RiskMeasureTable,
    excess_of_loss_premium,
    largest_claim_influence,
    risk_measures,
    stop_loss_premium,
)
from .copulas import (
    ClaytonCopula,
    FrankCopula,
    GumbelCopula,
    IndependenceCopula,
    JoeCopula,
    StudentCopula,
    make_copula,
    student_t_cdf,
    student_t_quantile,
)
from .data import ClaimsDataset, EmpiricalMargin, ParetoMargin, load_csv, save_csv, summarize, synthesize
from .dependence import (
    PickandsGumbel,
    PickandsJoe,
    kendall_tau_empirical,
    pearson,
    pickands_rho,
    pickands_tau,
    spearman_rho_empirical,
    tau_convergence_study,
    upper_tail_empirical,
    upper_tail_theoretical,
)
from .errors import (
    AllocationError,
    BoundaryError,
    ConvergenceError,
    DataError,
    InsufficientDataError,
    MaxclaimsError,
    OptimizationError,
    ParameterError,
    UnsupportedError,
)
from .estimation import (
    FitResult,
    PseudoObservations,
    censored_pml_fit,
    km_pseudo_observations,
    model_grid_fit,
    pml_fit,
    pseudo_observations,
)
from .mixing import ShiftedGeometric, ShiftedPoisson, TruncatedPoisson, make_mixing, mixing_for_mean
from .mixture import MixtureCopula, compound_df
from .sampling import SeededStream, sample_claims, sample_mixture

__version__ = "0.1.0"

__all__ = [
    "AllocationError",
    "BoundaryError",
    "ClaimsDataset",
    "ClaytonCopula",
    "ConvergenceError",
    "DataError",
    "EmpiricalMargin",
    "FitResult",
    "FrankCopula",
    "GumbelCopula",
    "IndependenceCopula",
    "InsufficientDataError",
    "JoeCopula",
    "MaxclaimsError",
    "MixtureCopula",
    "OptimizationError",
    "ParameterError",
    "ParetoMargin",
    "PickandsGumbel",
    "PickandsJoe",
    "PoissonCount",
    "PremiumGrid",
    "PseudoObservations",
    "RiskMeasureTable",
    "SeededStream",
    "ShiftedGeometric",
    "ShiftedPoisson",
    "StudentCopula",
    "TruncatedPoisson",
    "UnsupportedError",
    "censored_pml_fit",
    "compound_df",
    "excess_of_loss_premium",
    "kendall_tau_empirical",
    "km_pseudo_observations",
    "largest_claim_influence",
    "load_csv",
    "make_copula",
    "make_mixing",
    "mixing_for_mean",
    "model_grid_fit",
    "pearson",
    "pickands_rho",
    "pickands_tau",
    "pml_fit",
    "pseudo_observations",
    "risk_measures",
    "sample_claims",
    "sample_mixture",
    "save_csv",
    "spearman_rho_empirical",
    "stop_loss_premium",
    "student_t_cdf",
    "student_t_quantile",
    "summarize",
    "synthesize",
    "tau_convergence_study",
    "upper_tail_empirical",
    "upper_tail_theoretical",
]
