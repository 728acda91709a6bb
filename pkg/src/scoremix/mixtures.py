"""Mixture (Choquet) representations of consistent scores over elementary scores.

A consistent quantile score is the integral of S^Q_{alpha,theta} against dg,
and a consistent expectile score the integral of S^E_{alpha,theta} against
dphi'.  The helpers here check both sides numerically for absolutely
continuous mixing measures and recover mixing-measure increments from a score.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from scipy import integrate

from . import scores
from .errors import DomainError, QuadratureError

Fn = Callable[[float], float]


@dataclass(frozen=True)
class MixingDensity:
    """Lebesgue density ``h`` of a mixing measure, with its primitives.

    ``antiderivative`` is g with g' = h (quantile side); ``phi`` and
    ``phi_prime`` satisfy phi'' = h (expectile side).  ``bregman`` may supply a
    cancellation-free phi(y) - phi(x) - phi'(x)(y - x); by default it is formed
    from ``phi`` directly.
    """

    h: Fn
    support: tuple[float, float] = (-math.inf, math.inf)
    antiderivative: Optional[Fn] = None
    phi: Optional[Fn] = None
    phi_prime: Optional[Fn] = None
    bregman: Optional[Callable[[float, float], float]] = None
    name: str = "custom"

    def bregman_divergence(self, x: float, y: float) -> float:
        if self.bregman is not None:
            return self.bregman(x, y)
        if self.phi is None or self.phi_prime is None:
            raise DomainError(f"density {self.name!r} has no phi")
        return self.phi(y) - self.phi(x) - self.phi_prime(x) * (y - x)


def constant_density(c: float = 1.0) -> MixingDensity:
    """c times Lebesgue measure: c = 1 gives the pinball loss, c = 2 squared error."""
    if c <= 0:
        raise DomainError("density constant must be positive")
    return MixingDensity(
        h=lambda t: c,
        antiderivative=lambda t: c * t,
        phi=lambda t: 0.5 * c * t * t,
        phi_prime=lambda t: c * t,
        bregman=lambda x, y: 0.5 * c * (y - x) ** 2,
        name=f"constant({c:g})",
    )


def exponential_density(a: float) -> MixingDensity:
    """h(theta) = exp(a theta), generating the exponential Bregman family."""
    if a == 0:
        raise DomainError("exponential density needs a != 0")
    return MixingDensity(
        h=lambda t: math.exp(a * t),
        antiderivative=lambda t: math.exp(a * t) / a,
        phi=lambda t: math.exp(a * t) / (a * a),
        phi_prime=lambda t: math.exp(a * t) / a,
        bregman=lambda x, y: scores.exponential_bregman_score(a, x, y),
        name=f"exponential({a:g})",
    )


def homogeneous_density(b: float) -> MixingDensity:
    """h(theta) = theta^(b-2) on theta > 0, generating Patton's homogeneous family."""
    if b == 1:
        g, phi, dphi = math.log, (lambda t: t * math.log(t)), (lambda t: math.log(t) + 1)
    elif b == 0:
        g, phi, dphi = (lambda t: -1 / t), (lambda t: -math.log(t)), (lambda t: -1 / t)
    else:
        g = lambda t: t ** (b - 1) / (b - 1)  # noqa: E731
        phi = lambda t: t**b / (b * (b - 1))  # noqa: E731
        dphi = g
    return MixingDensity(
        h=lambda t: t ** (b - 2) if t > 0 else 0.0,
        support=(0.0, math.inf),
        antiderivative=g,
        phi=phi,
        phi_prime=dphi,
        bregman=lambda x, y: scores.patton_homogeneous_score(b, x, y),
        name=f"homogeneous({b:g})",
    )


@dataclass(frozen=True)
class MixtureReport:
    """Quadrature side ``lhs`` against closed-form side ``rhs``.

    ``ok`` means abs_error <= tol * max(1, |rhs|).
    """

    lhs: float
    rhs: float
    abs_error: float
    quad_error: float = 0.0
    ok: bool = True

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else self.abs_error / scale


def _integrate(f: Fn, lo: float, hi: float, epsrel: float = 1e-13) -> tuple[float, float]:
    if lo >= hi:
        return 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge: {exc}") from exc
    return value, err


def _check_support(density: MixingDensity, x: float, y: float) -> None:
    lo, hi = density.support
    if min(x, y) < lo or max(x, y) > hi:
        raise DomainError(f"({x}, {y}) outside the support {density.support} of {density.name}")


def mixing_increment_quantile(score: Callable[[float, float], float], alpha: float, x: float, y: float) -> float:
    """H(x) - H(y) = S(x, y) / (1 - alpha) for x > y."""
    alpha = scores.check_level(alpha)
    if not x > y:
        raise DomainError("mixing increments are defined for x > y")
    return score(x, y) / (1.0 - alpha)


def mixing_increment_expectile(
    score: Callable[[float, float], float],
    alpha: float,
    x: float,
    y: float,
    step: float = 1e-6,
    richardson: bool = True,
) -> float:
    """H(x) - H(y) from the left-hand derivative of S(x, .) at y, for x > y.

    The derivative is a backward difference quotient; S(x, .) decreases on
    y < x so the increment is its negative divided by 1 - alpha.  With
    ``richardson`` one extrapolation step removes the O(step) error term.
    """
    alpha = scores.check_level(alpha)
    if step <= 0:
        raise DomainError("finite-difference step must be positive")
    if not x > y:
        raise DomainError("mixing increments are defined for x > y")

    def quotient(hstep):
        return (score(x, y) - score(x, y - hstep)) / hstep

    deriv = quotient(step)
    if richardson:
        deriv = 2.0 * quotient(step / 2) - deriv
    return -deriv / (1.0 - alpha)


def verify_mixture_quantile(density: MixingDensity, alpha: float, x: float, y: float, tol: float = 1e-9) -> MixtureReport:
    """Integrate S^Q_{alpha,theta}(x, y) h(theta) and compare with the g-form score."""
    alpha = scores.check_level(alpha)
    _check_support(density, x, y)
    if x == y:
        return MixtureReport(0.0, 0.0, 0.0)
    # the integrand vanishes outside [min(x, y), max(x, y))
    lhs, qerr = _integrate(
        lambda t: scores.elementary_quantile_score(alpha, t, x, y) * density.h(t), min(x, y), max(x, y)
    )
    rhs = scores.quantile_score_from_g(alpha, density.antiderivative, x, y)
    return _report(lhs, rhs, qerr, tol)


def verify_mixture_expectile(density: MixingDensity, alpha: float, x: float, y: float, tol: float = 1e-9) -> MixtureReport:
    """Integrate S^E_{alpha,theta}(x, y) h(theta) and compare with the phi-form score."""
    alpha = scores.check_level(alpha)
    _check_support(density, x, y)
    if x == y:
        return MixtureReport(0.0, 0.0, 0.0)
    lhs, qerr = _integrate(
        lambda t: scores.elementary_expectile_score(alpha, t, x, y) * density.h(t), min(x, y), max(x, y)
    )
    rhs = abs((1.0 if y < x else 0.0) - alpha) * density.bregman_divergence(x, y)
    return _report(lhs, rhs, qerr, tol)


def verify_mixture_probability(density: MixingDensity, p: float, y: int, tol: float = 1e-9) -> MixtureReport:
    """Integrate S^B_theta(p, y) h(theta) over (0, 1) against the doubled mean-score form."""
    if not 0 <= p <= 1 or y not in (0, 1):
        raise DomainError("probability forecasts need p in [0, 1] and y in {0, 1}")
    lo, hi = (0.0, p) if y == 0 else (p, 1.0)
    lhs, qerr = _integrate(lambda t: scores.elementary_probability_score(t, p, y) * density.h(t), lo, hi)
    # S^B = 2 S^E_{1/2}, and the alpha = 1/2 expectile score is half the Bregman divergence
    rhs = 0.0 if p == y else density.bregman_divergence(p, float(y))
    return _report(lhs, rhs, qerr, tol)


def _report(lhs: float, rhs: float, qerr: float, tol: float) -> MixtureReport:
    err = abs(lhs - rhs)
    return MixtureReport(lhs, rhs, err, qerr, bool(err <= tol * max(1.0, abs(rhs))))
