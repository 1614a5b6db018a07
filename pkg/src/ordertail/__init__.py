"""Tail asymptotics for randomly weighted order-statistic aggregates.

Closed-form first-order approximations of P(sum_{i<=k} C_i X_(i) > t) for
portfolios in the Fréchet or Gumbel max-domain of attraction, exact
quadrature oracles, variance-reduced Monte Carlo estimation with
reproducible parallel streams, and VaR/ES approximation for the
large-claims-reinsurance default application.
"""

from .aggregation import lc, order_stats, sample_lc
from .asymptotics import (
    ApproxReport,
    Formula,
    approx,
    breiman_tail,
    frechet_lc_approx,
    gumbel_lc_approx,
    scaled_tail_model_a,
    scaled_tail_model_b,
)
from .dependence import Scenario, eta, sample_risks, validate_correlation
from .errors import (
    DomainError,
    InsufficientSamplesError,
    InvalidOrderingError,
    ModelConsistencyError,
    NumericError,
    OrdertailError,
    UnsupportedOperationError,
    ValidationError,
)
from .marginals import (
    Exponential,
    LambdaWeights,
    LogNormal,
    Marginal,
    MdaClass,
    Pareto,
    Weibullian,
    lambda_weights,
)
from .montecarlo import (
    DiagnosticsConfig,
    TailEstimate,
    check_conditions,
    clopper_pearson,
    conditional_c1,
    crude,
    importance_pareto,
    substream,
    sum_form_check,
    tail_curve,
)
from .oracles import (
    RatioTrend,
    gaussian_joint_survival,
    grid_max_min,
    log_scale_mixture_tail,
    ratio_limit,
    scale_mixture_tail,
)
from .riskmeasures import es_asymptotic, es_empirical, var_asymptotic, var_empirical
from .scenario_io import load_scenario, load_template, parse_scenario
from .weights import (
    Beta,
    Degenerate,
    EndpointClassification,
    EndpointKind,
    ModelA,
    Uniform,
    WeightModel,
    WeightVectorSpec,
    sample_weights,
)

__version__ = "0.1.0"
