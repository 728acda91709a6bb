"""Elementary scores, mixture representations and Murphy diagrams for point forecasts."""

from .crps import StepCdf, crps_as_brier_integral, crps_step_cdf
from .errors import (
    DataError,
    DomainError,
    InsufficientDataError,
    NonAdmissibleError,
    QuadratureError,
    ScoremixError,
)
from .inference import DMResult, confidence_band, dm_test, newey_west_variance, score_diff_series
from .murphy import (
    DominanceVerdict,
    ForecastComparisonSet,
    FunctionalSpec,
    MurphyCurve,
    Verdict,
    area_under_curve,
    best_forecaster_map,
    difference_curve,
    dominance_check,
    empirical_curve,
    knot_set,
)
from .scores import (
    DiscreteDistribution,
    apl_score,
    ase_score,
    brier_score,
    elementary_expectile_score,
    elementary_probability_score,
    elementary_quantile_score,
)

__version__ = "0.1.0"
