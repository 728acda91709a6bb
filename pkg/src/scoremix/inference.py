"""Diebold-Mariano tests on elementary score differences.

The long-run variance of the differences uses the Bartlett-kernel
(Newey-West) estimator with autocovariances normalised by n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InsufficientDataError
from .murphy import ForecastComparisonSet, FunctionalSpec, difference_curve

Lags = Union[int, str, None]


@dataclass(frozen=True)
class ScoreDifferenceSeries:
    values: np.ndarray
    theta: float
    functional: FunctionalSpec


@dataclass(frozen=True)
class DMResult:
    """Diebold-Mariano test output at one threshold.

    ``status`` is "ok", "degenerate" (zero variance, nonzero mean: the
    difference is deterministic) or "null" (zero variance and zero mean).
    ``floored`` marks a negative HAC estimate that was set to zero.
    """

    mean_diff: float
    hac_variance: float
    statistic: float
    p_value: float
    band_halfwidth: float
    lags: int
    n: int
    status: str = "ok"
    floored: bool = False


def score_diff_series(data: ForecastComparisonSet, j1, j2, theta: float) -> ScoreDifferenceSeries:
    """d_i(theta) = S_theta(x_i,j1, y_i) - S_theta(x_i,j2, y_i), in time order."""
    j1, j2 = data.column(j1), data.column(j2)
    f = data.functional
    s1 = np.asarray(f.elementary(theta, data.forecasts[:, j1], data.outcomes), dtype=float)
    s2 = np.asarray(f.elementary(theta, data.forecasts[:, j2], data.outcomes), dtype=float)
    return ScoreDifferenceSeries(s1 - s2, float(theta), f)


def auto_lags(n: int) -> int:
    # integer cube root, robust to floating error in n ** (1/3)
    k = int(round(n ** (1.0 / 3.0)))
    while k**3 > n:
        k -= 1
    while (k + 1) ** 3 <= n:
        k += 1
    return k


def _resolve_lags(lags: Lags, n: int) -> int:
    if lags is None or lags == "auto":
        return auto_lags(n)
    lags = int(lags)
    if lags < 0:
        raise ValueError("lags must be nonnegative")
    return lags


def _newey_west(series: np.ndarray, lags: int) -> tuple[float, bool]:
    n = series.size
    z = series - series.mean()
    var = float(np.dot(z, z)) / n
    for k in range(1, min(lags, n - 1) + 1):
        var += 2.0 * (1.0 - k / (lags + 1.0)) * float(np.dot(z[k:], z[:-k])) / n
    if var < 0:
        return 0.0, True
    return var, False


def newey_west_variance(series: Sequence[float], lags: int) -> float:
    """gamma_0 + 2 sum_{k<=L} (1 - k/(L+1)) gamma_k, floored at zero."""
    series = np.asarray(series, dtype=float)
    if series.size < 2:
        raise InsufficientDataError("HAC variance needs at least two observations")
    return _newey_west(series, _resolve_lags(lags, series.size))[0]


def _norm_sf2(z: float) -> float:
    """Two-sided standard normal tail probability."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def dm_test(series, lags: Lags = "auto", level: float = 0.05) -> DMResult:
    """Two-sided DM test of zero mean difference, normal reference.

    ``level`` is the test size; the band half-width is the matching
    two-sided normal quantile times sqrt(hac / n).
    """
    values = np.asarray(series.values if isinstance(series, ScoreDifferenceSeries) else series, dtype=float)
    n = values.size
    if n < 2:
        raise InsufficientDataError("the Diebold-Mariano test needs n >= 2")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    L = _resolve_lags(lags, n)
    mean = float(values.mean())
    hac, floored = _newey_west(values, L)
    # variances at rounding level of the data count as zero
    scale = float(np.max(np.abs(values)))
    if hac <= (64 * np.finfo(float).eps * scale) ** 2:
        if abs(mean) <= 64 * np.finfo(float).eps * scale:
            return DMResult(mean, 0.0, 0.0, 1.0, 0.0, L, n, "null", floored)
        return DMResult(mean, 0.0, math.copysign(math.inf, mean), 0.0, 0.0, L, n, "degenerate", floored)
    se = math.sqrt(hac / n)
    stat = mean / se
    z = NormalDist().inv_cdf(1.0 - level / 2.0)
    return DMResult(mean, hac, stat, _norm_sf2(stat), z * se, L, n, "ok", floored)


@dataclass(frozen=True)
class BandRow:
    theta: float
    diff: float
    lower: float
    upper: float
    statistic: Optional[float]
    p_value: Optional[float]
    status: str


def confidence_band(
    data: ForecastComparisonSet,
    j1,
    j2,
    thetas: Sequence[float],
    level: float = 0.95,
    lags: Lags = "auto",
) -> list[BandRow]:
    """Pointwise DM confidence band for D_n(theta) at the given thresholds.

    ``level`` is the coverage (0.95 gives 95% bands).  With n < 2 the rows
    carry D_n only, with status "insufficient".
    """
    diff = difference_curve(data, j1, j2)
    rows = []
    for theta in thetas:
        d = float(diff(theta))
        if data.n < 2:
            rows.append(BandRow(float(theta), d, d, d, None, None, "insufficient"))
            continue
        res = dm_test(score_diff_series(data, j1, j2, theta), lags=lags, level=1.0 - level)
        rows.append(
            BandRow(float(theta), d, d - res.band_halfwidth, d + res.band_halfwidth, res.statistic, res.p_value, res.status)
        )
    return rows
