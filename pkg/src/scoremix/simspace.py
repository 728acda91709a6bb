"""Synthetic prediction space with four competing Gaussian forecasters.

mu ~ N(0, 1), Y | mu ~ N(mu, 1), and tau = +-2 with probability 1/2 each,
independent of (mu, Y).  The perfect forecaster issues N(mu, 1), the
climatological one N(0, 2), the unfocused one the mixture
(N(mu, 1) + N(mu + tau, 1)) / 2, and the sign-reversed one N(-mu, 1).

Scores for the mean are reported on the doubled scale 2 S^E_{1/2, theta},
the scale of the closed forms below and of the event-probability score.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from . import gaussian
from .errors import DomainError, QuadratureError
from .murphy import FunctionalSpec
from .scores import check_level, elementary_expectile_score, elementary_probability_score, elementary_quantile_score

TAUS = (-2.0, 2.0)
CHUNK = 1 << 16
TAIL = 9.0
DEFAULT_EVENT_THRESHOLD = 2.0


class ForecasterKind(enum.Enum):
    PERFECT = "perfect"
    CLIMATOLOGICAL = "climatological"
    UNFOCUSED = "unfocused"
    SIGN_REVERSED = "sign_reversed"


@dataclass(frozen=True)
class ScenarioDraw:
    mu: float
    tau: float
    y: float


@dataclass(frozen=True)
class Scenarios:
    mu: np.ndarray
    tau: np.ndarray
    y: np.ndarray

    def __len__(self):
        return self.mu.size


def _chunk_rng(seed: int, index: int, variable: int) -> np.random.Generator:
    # one Philox stream per (chunk, variable), so the k-th draw does not
    # depend on how many draws were requested or how the work was split
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, index, variable]))


def sample_scenarios(n: int, seed: int = 0) -> Scenarios:
    """n independent draws of (mu, tau, Y)."""
    if n < 1:
        raise DomainError("need at least one draw")
    mus, taus, ys = [], [], []
    for k in range(-(-n // CHUNK)):
        m = min(CHUNK, n - k * CHUNK)
        mu = _chunk_rng(seed, k, 0).standard_normal(m)
        eps = _chunk_rng(seed, k, 1).standard_normal(m)
        tau = np.where(_chunk_rng(seed, k, 2).random(m) < 0.5, TAUS[0], TAUS[1])
        mus.append(mu)
        taus.append(tau)
        ys.append(mu + eps)
    return Scenarios(np.concatenate(mus), np.concatenate(taus), np.concatenate(ys))


def sample_scenario(seed: int = 0, index: int = 0) -> ScenarioDraw:
    """The ``index``-th draw of the stream identified by ``seed``."""
    s = sample_scenarios(index + 1, seed)
    return ScenarioDraw(float(s.mu[index]), float(s.tau[index]), float(s.y[index]))


@lru_cache(maxsize=256)
def unfocused_quantile_offset(alpha: float, tau: float) -> float:
    """z_{alpha,tau}: the alpha-quantile of (Phi(x) + Phi(x - tau)) / 2."""
    alpha = check_level(alpha)

    def f(x):
        return 0.5 * (gaussian.cdf(x) + gaussian.cdf(x - tau)) - alpha

    lo = min(0.0, tau) + float(gaussian.ppf(alpha)) - 1.0
    hi = max(0.0, tau) + float(gaussian.ppf(alpha)) + 1.0
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def point_forecast(
    kind: ForecasterKind,
    functional: FunctionalSpec,
    mu,
    tau,
    event_threshold: float = DEFAULT_EVENT_THRESHOLD,
):
    """Point forecast of ``kind`` for the quantile, mean or exceedance probability P(Y > y0)."""
    mu = np.asarray(mu, dtype=float)
    tau = np.broadcast_to(np.asarray(tau, dtype=float), mu.shape)
    if functional.kind == "quantile":
        z = float(gaussian.ppf(functional.alpha))
        if kind is ForecasterKind.PERFECT:
            out = mu + z
        elif kind is ForecasterKind.CLIMATOLOGICAL:
            out = np.full(mu.shape, math.sqrt(2.0) * z)
        elif kind is ForecasterKind.UNFOCUSED:
            zt = {t: unfocused_quantile_offset(functional.alpha, t) for t in TAUS}
            out = mu + np.where(tau < 0, zt[TAUS[0]], zt[TAUS[1]])
        else:
            out = -mu + z
    elif functional.kind == "expectile":
        if functional.alpha != 0.5:
            raise DomainError("only the mean (alpha = 1/2) is available among expectiles")
        if kind is ForecasterKind.PERFECT:
            out = mu.copy()
        elif kind is ForecasterKind.CLIMATOLOGICAL:
            out = np.zeros(mu.shape)
        elif kind is ForecasterKind.UNFOCUSED:
            out = mu + tau / 2
        else:
            out = -mu
    else:
        y0 = event_threshold
        if kind is ForecasterKind.PERFECT:
            out = 1.0 - gaussian.cdf(y0 - mu)
        elif kind is ForecasterKind.CLIMATOLOGICAL:
            out = np.full(mu.shape, 1.0 - gaussian.cdf(y0 / math.sqrt(2.0)))
        elif kind is ForecasterKind.UNFOCUSED:
            out = 1.0 - 0.5 * (gaussian.cdf(y0 - mu) + gaussian.cdf(y0 - mu - tau))
        else:
            out = 1.0 - gaussian.cdf(y0 + mu)
    return float(out) if np.ndim(out) == 0 else out


def _scores(functional: FunctionalSpec, theta: float, x: np.ndarray, y: np.ndarray, event_threshold: float):
    if functional.kind == "quantile":
        return elementary_quantile_score(functional.alpha, theta, x, y)
    if functional.kind == "expectile":
        return 2.0 * elementary_expectile_score(0.5, theta, x, y)
    return elementary_probability_score(theta, x, (y > event_threshold).astype(float))


def monte_carlo_expected_score(
    kind: ForecasterKind,
    functional: FunctionalSpec,
    theta: float,
    n: int = 1_000_000,
    seed: int = 0,
    event_threshold: float = DEFAULT_EVENT_THRESHOLD,
    scenarios: Optional[Scenarios] = None,
) -> tuple[float, float]:
    """Sample mean and standard error of the elementary score over n draws.

    Pass ``scenarios`` to reuse draws across forecasters and thresholds.
    """
    if scenarios is None:
        if n < 2:
            raise DomainError("need at least two draws for a standard error")
        scenarios = sample_scenarios(n, seed)
    x = point_forecast(kind, functional, scenarios.mu, scenarios.tau, event_threshold)
    s = np.asarray(_scores(functional, theta, x, scenarios.y, event_threshold))
    return float(s.mean()), float(s.std(ddof=1) / math.sqrt(s.size))


@dataclass(frozen=True)
class QuantileScoreDecomposition:
    """-alpha Q(Y <= theta) + alpha Q(X <= theta) + Q(X > theta, Y <= theta)."""

    term_outcome: float
    term_forecast: float
    term_joint: float
    total: float


def decompose_expected_quantile_score(
    kind: ForecasterKind,
    alpha: float,
    theta: float,
    n: int = 1_000_000,
    seed: int = 0,
    scenarios: Optional[Scenarios] = None,
) -> QuantileScoreDecomposition:
    alpha = check_level(alpha)
    if scenarios is None:
        scenarios = sample_scenarios(n, seed)
    x = point_forecast(kind, FunctionalSpec.quantile(alpha), scenarios.mu, scenarios.tau)
    y = scenarios.y
    t_out = -alpha * float(np.mean(y <= theta))
    t_fc = alpha * float(np.mean(x <= theta))
    t_joint = float(np.mean((x > theta) & (y <= theta)))
    return QuantileScoreDecomposition(t_out, t_fc, t_joint, t_out + t_fc + t_joint)


# -- closed forms ------------------------------------------------------------

def _tail_integral(theta: float, lo: float = -math.inf, hi: float = math.inf) -> float:
    """Integral of Phi(theta - x) phi(x) over [lo, hi], truncated to |x| <= 9."""
    lo, hi = max(lo, -TAIL), min(hi, TAIL)
    if lo >= hi:
        return 0.0
    value, err = integrate.quad(lambda x: gaussian.cdf(theta - x) * gaussian.pdf(x), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-10:
        raise QuadratureError(f"quadrature error {err:.2e} exceeds 1e-10")
    return value


def analytic_expected_score(kind: ForecasterKind, functional: FunctionalSpec, theta: float) -> float:
    """Closed-form expected elementary score for the quantile or mean functional.

    Quantiles use S^Q_{alpha,theta}; the mean uses 2 S^E_{1/2,theta}.
    """
    theta = float(theta)
    if functional.kind == "quantile":
        a = functional.alpha
        z = float(gaussian.ppf(a))
        base = -a * float(gaussian.cdf(theta / math.sqrt(2.0)))
        if kind is ForecasterKind.PERFECT:
            return base + a * float(gaussian.cdf(theta - z)) + _tail_integral(theta, lo=theta - z)
        if kind is ForecasterKind.CLIMATOLOGICAL:
            return base + min(float(gaussian.cdf(theta / math.sqrt(2.0))), a)
        if kind is ForecasterKind.UNFOCUSED:
            parts = []
            for t in TAUS:
                zt = unfocused_quantile_offset(a, t)
                parts.append(a * float(gaussian.cdf(theta - zt)) + _tail_integral(theta, lo=theta - zt))
            return base + 0.5 * sum(parts)
        return base + a * float(gaussian.cdf(theta - z)) + _tail_integral(theta, hi=z - theta)
    if functional.kind == "expectile" and functional.alpha == 0.5:
        c = theta * float(gaussian.cdf(theta / math.sqrt(2.0))) + math.sqrt(2.0) * gaussian.pdf(theta / math.sqrt(2.0))
        Phi, phi = float(gaussian.cdf(theta)), gaussian.pdf(theta)
        if kind is ForecasterKind.PERFECT:
            return c - theta * Phi - phi
        if kind is ForecasterKind.CLIMATOLOGICAL:
            return c - (theta if theta >= 0 else 0.0)
        if kind is ForecasterKind.UNFOCUSED:
            return c - 0.5 * sum(theta * float(gaussian.cdf(theta - t / 2)) + gaussian.pdf(theta - t / 2) for t in TAUS)
        return c - theta * Phi + phi
    raise DomainError(f"no closed form for {functional.label()}")
