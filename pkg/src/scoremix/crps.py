"""CRPS of a step (discrete) predictive CDF, in kernel form and as a Brier integral."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scores import brier_score

CUMPROB_TOL = 1e-12


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step CDF jumping to ``cumprobs[k]`` at ``points[k]``."""

    points: np.ndarray
    cumprobs: np.ndarray

    def __init__(self, points, cumprobs):
        points = np.asarray(points, dtype=float).ravel()
        cumprobs = np.asarray(cumprobs, dtype=float).ravel()
        if points.size == 0 or points.shape != cumprobs.shape:
            raise DomainError("points and cumulative probabilities must be nonempty and of equal length")
        if not np.all(np.isfinite(points)) or np.any(np.diff(points) <= 0):
            raise DomainError("support points must be finite and strictly increasing")
        if cumprobs[0] < 0 or np.any(np.diff(cumprobs) < 0):
            raise DomainError("cumulative probabilities must be nonnegative and nondecreasing")
        if abs(cumprobs[-1] - 1.0) > CUMPROB_TOL:
            raise DomainError(f"cumulative probabilities must end at 1, got {cumprobs[-1]!r}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "cumprobs", cumprobs)

    @classmethod
    def from_atoms(cls, values, probs) -> "StepCdf":
        values = np.asarray(values, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, probs)
        return cls(uniq, np.cumsum(merged))

    @property
    def probs(self) -> np.ndarray:
        return np.diff(self.cumprobs, prepend=0.0)

    def __call__(self, t):
        k = np.searchsorted(self.points, t, side="right")
        return np.where(k > 0, self.cumprobs[np.maximum(k - 1, 0)], 0.0)


def crps_step_cdf(F: StepCdf, y: float) -> float:
    """E|X - y| - E|X - X'| / 2 for X, X' iid from F."""
    x, p = F.points, F.probs
    first = float(np.dot(p, np.abs(x - y)))
    second = float(p @ np.abs(x[:, None] - x[None, :]) @ p)
    return max(first - 0.5 * second, 0.0)


def crps_as_brier_integral(F: StepCdf, y: float) -> float:
    """Integral over theta of the Brier score of F(theta) for the event {y <= theta}.

    The integrand is constant between consecutive points of supp(F) and y,
    and vanishes outside their range, so the integral is an exact finite sum.
    """
    grid = np.unique(np.append(F.points, y))
    lo = grid[:-1]
    widths = np.diff(grid)
    event = (lo >= y).astype(float)
    return float(np.sum(widths * np.asarray(brier_score(F(lo), event))))
