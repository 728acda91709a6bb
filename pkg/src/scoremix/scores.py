"""Consistent scoring functions for quantiles, expectiles and event probabilities.

All scores are negatively oriented (smaller is better) and take the point
forecast ``x`` before the outcome ``y``.  The elementary scores accept numpy
arrays and broadcast; the named families are scalar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NonAdmissibleError

NEGATIVE_SCORE_TOL = 1e-12
EXP_OVERFLOW = 700.0


def check_level(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {alpha!r}")
    return alpha


def _scalars(*args) -> bool:
    return all(isinstance(a, (int, float)) for a in args)


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


# -- elementary (extremal) scores ---------------------------------------------

def elementary_quantile_score(alpha, theta, x, y):
    """S^Q_{alpha,theta}(x, y): 1 - alpha on y <= theta < x, alpha on x <= theta < y."""
    alpha = check_level(alpha)
    if _scalars(theta, x, y):
        return 1.0 - alpha if y <= theta < x else (alpha if x <= theta < y else 0.0)
    theta, x, y = np.asarray(theta), np.asarray(x), np.asarray(y)
    over = (y <= theta) & (theta < x)
    under = (x <= theta) & (theta < y)
    return _out(np.where(over, 1.0 - alpha, np.where(under, alpha, 0.0)))


def elementary_expectile_score(alpha, theta, x, y):
    """S^E_{alpha,theta}(x, y), the piecewise linear extremal expectile score."""
    alpha = check_level(alpha)
    if _scalars(theta, x, y):
        if y <= theta < x:
            return (1.0 - alpha) * abs(y - theta)
        return alpha * abs(y - theta) if x <= theta < y else 0.0
    theta, x, y = np.asarray(theta), np.asarray(x), np.asarray(y)
    dist = np.abs(y - theta)
    over = (y <= theta) & (theta < x)
    under = (x <= theta) & (theta < y)
    return _out(np.where(over, (1.0 - alpha) * dist, np.where(under, alpha * dist, 0.0)))


def elementary_probability_score(theta, p, y):
    """Cost-loss score S^B_theta(p, y) for a probability forecast of a binary event.

    Equals ``theta`` for a false alarm (y = 0, p > theta), ``1 - theta`` for a
    miss (y = 1, p <= theta) and zero otherwise.  The cost-loss ratio
    ``theta`` must lie in [0, 1].
    """
    if np.any(np.asarray(theta) < 0) or np.any(np.asarray(theta) > 1):
        raise DomainError("cost-loss ratio theta must lie in [0, 1]")
    if _scalars(theta, p, y):
        if y == 0 and p > theta:
            return float(theta)
        return 1.0 - theta if y == 1 and p <= theta else 0.0
    theta, p, y = np.asarray(theta), np.asarray(p), np.asarray(y)
    false_alarm = (y == 0) & (p > theta)
    miss = (y == 1) & (p <= theta)
    return _out(np.where(false_alarm, theta, np.where(miss, 1.0 - theta, 0.0)))


# -- standard consistent scores -----------------------------------------------

def apl_score(alpha, x, y):
    """Asymmetric piecewise linear (pinball) loss."""
    alpha = check_level(alpha)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return _out(np.where(y < x, (1.0 - alpha) * (x - y), alpha * (y - x)))


def ase_score(alpha, x, y):
    """Asymmetric squared error, the expectile regression loss."""
    alpha = check_level(alpha)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    sq = (x - y) ** 2
    return _out(np.where(y < x, (1.0 - alpha) * sq, alpha * sq))


def brier_score(p, y):
    p, y = np.asarray(p, dtype=float), np.asarray(y)
    return _out(np.where(y == 0, p**2, (1.0 - p) ** 2))


def quantile_score_from_g(alpha: float, g: Callable[[float], float], x: float, y: float) -> float:
    """Generalized piecewise linear score ``(1(y < x) - alpha) (g(x) - g(y))``.

    ``g`` must be nondecreasing; a clearly negative result means it is not.
    """
    alpha = check_level(alpha)
    if x == y:
        return 0.0
    value = ((1.0 if y < x else 0.0) - alpha) * (g(x) - g(y))
    if value < -NEGATIVE_SCORE_TOL:
        raise NonAdmissibleError(f"negative score {value:.3g}: g is not nondecreasing")
    return max(float(value), 0.0)


def expectile_score_from_phi(
    alpha: float,
    phi: Callable[[float], float],
    phi_left_derivative: Callable[[float], float],
    x: float,
    y: float,
) -> float:
    """Savage-type score ``|1(y < x) - alpha| * (phi(y) - phi(x) - phi'(x)(y - x))``."""
    alpha = check_level(alpha)
    if x == y:
        return 0.0
    weight = abs((1.0 if y < x else 0.0) - alpha)
    value = weight * (phi(y) - phi(x) - phi_left_derivative(x) * (y - x))
    if value < -NEGATIVE_SCORE_TOL:
        raise NonAdmissibleError(f"negative score {value:.3g}: phi is not convex")
    return max(float(value), 0.0)


def _expm1_minus_linear(u: float) -> float:
    # exp(u) - 1 - u without cancellation for small |u|
    if abs(u) < 1e-3:
        return u * u * (0.5 + u * (1 / 6 + u * (1 / 24 + u * (1 / 120 + u / 720))))
    return math.expm1(u) - u


def exponential_bregman_score(a: float, x: float, y: float) -> float:
    """Patton's exponential Bregman loss; tends to (y - x)^2 / 2 as a -> 0."""
    if a == 0:
        raise DomainError("exponential Bregman parameter must be nonzero")
    if max(abs(a * x), abs(a * y)) > EXP_OVERFLOW:
        raise DomainError(f"exp overflow for a={a}, x={x}, y={y}")
    # a^-2 (e^{ay} - e^{ax}) - a^-1 e^{ax} (y - x) = a^-2 e^{ax} (e^{a(y-x)} - 1 - a(y-x))
    return math.exp(a * x) * _expm1_minus_linear(a * (y - x)) / (a * a)


def patton_homogeneous_score(b: float, x: float, y: float) -> float:
    """Homogeneous Bregman family on the positive half line (b = 0 is QLIKE-type)."""
    if x <= 0 or y <= 0:
        raise DomainError(f"homogeneous scores need positive arguments, got x={x}, y={y}")
    u = (y - x) / x
    if b == 0:
        # y/x - log(y/x) - 1
        return max(u - math.log1p(u), 0.0)
    if b == 1:
        # y log(y/x) - (y - x)
        return max(y * math.log1p(u) - (y - x), 0.0)
    if b == 2:
        return 0.5 * (y - x) ** 2
    # x^b / (b (b-1)) * ((1+u)^b - 1 - b u)
    bracket = math.expm1(b * math.log1p(u)) - b * u
    return max(x**b * bracket / (b * (b - 1)), 0.0)


# -- discrete predictive distributions ----------------------------------------

@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported distribution; atoms are stored sorted and merged."""

    values: np.ndarray
    probs: np.ndarray

    def __init__(self, values, probs):
        values = np.asarray(values, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        if values.shape != probs.shape or values.size == 0:
            raise DomainError("values and probabilities must be nonempty and of equal length")
        if not np.all(np.isfinite(values)):
            raise DomainError("atoms must be finite")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must be nonnegative and sum to one")
        order = np.argsort(values, kind="stable")
        values, probs = values[order], probs[order]
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, probs)
        object.__setattr__(self, "values", uniq)
        object.__setattr__(self, "probs", merged)

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls([value], [1.0])

    @property
    def cumprobs(self) -> np.ndarray:
        return np.cumsum(self.probs)

    def cdf(self, t: float) -> float:
        k = np.searchsorted(self.values, t, side="right")
        return 0.0 if k == 0 else float(self.cumprobs[k - 1])

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))


def expected_score_discrete(F: DiscreteDistribution, score: Callable, x: float) -> float:
    """E_F S(x, Y), with ``score`` called as ``score(x, y)``."""
    return float(sum(p * score(x, v) for v, p in zip(F.values, F.probs)))


def quantile_of_discrete(F: DiscreteDistribution, alpha: float) -> tuple[float, float]:
    """Return the closed interval [q-, q+] of alpha-quantiles of F."""
    alpha = check_level(alpha)
    cum = F.cumprobs
    lo = np.searchsorted(cum >= alpha, True)  # first index with F >= alpha
    hi = np.searchsorted(cum > alpha, True)
    n = F.values.size
    return float(F.values[min(lo, n - 1)]), float(F.values[min(hi, n - 1)])


def expectile_of_discrete(F: DiscreteDistribution, alpha: float, tol: float = 1e-12) -> float:
    """Unique root of (1 - alpha) E(t - Y)_+ = alpha E(Y - t)_+, by bisection."""
    alpha = check_level(alpha)
    if alpha == 0.5:
        return F.mean()
    v, p = F.values, F.probs

    def balance(t):
        return (1 - alpha) * np.dot(p, np.maximum(t - v, 0.0)) - alpha * np.dot(p, np.maximum(v - t, 0.0))

    lo, hi = float(v[0]), float(v[-1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if balance(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- decision-theoretic payoff schemes ----------------------------------------

@dataclass(frozen=True)
class Bet:
    """Spread bet: lose ``rho_loss`` if y <= theta, win ``rho_gain`` otherwise."""

    rho_loss: float
    rho_gain: float

    def __post_init__(self):
        if not 0 < self.rho_loss < self.rho_gain:
            raise DomainError("need 0 < rho_loss < rho_gain")


@dataclass(frozen=True)
class Invest:
    """Investment of theta with tax deduction rate on losses and tax rate on gains."""

    kappa_loss: float
    kappa_gain: float

    def __post_init__(self):
        if not (0 <= self.kappa_loss < 1 and 0 <= self.kappa_gain < 1):
            raise DomainError("tax rates must lie in [0, 1)")


PayoffScheme = Bet | Invest


def bet_level_from_payoffs(scheme: Bet) -> float:
    return (scheme.rho_gain - scheme.rho_loss) / scheme.rho_gain


def invest_level_from_taxes(scheme: Invest) -> float:
    return (1 - scheme.kappa_gain) / (2 - scheme.kappa_gain - scheme.kappa_loss)


def regret(scheme: PayoffScheme, theta: float, x: float, y: float) -> float:
    """Regret of the rule "act iff x > theta" relative to an omniscient oracle."""
    acted_wrongly = y <= theta < x
    missed = x <= theta < y
    if isinstance(scheme, Bet):
        if acted_wrongly:
            return scheme.rho_loss
        if missed:
            return scheme.rho_gain - scheme.rho_loss
        return 0.0
    if isinstance(scheme, Invest):
        if acted_wrongly:
            return (1 - scheme.kappa_loss) * (theta - y)
        if missed:
            return (1 - scheme.kappa_gain) * (y - theta)
        return 0.0
    raise TypeError(f"unknown payoff scheme {scheme!r}")
