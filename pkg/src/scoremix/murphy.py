"""Exact empirical Murphy curves and finite-knot dominance checks.

Every record (x, y) with x != y contributes a single affine piece
``c0 + c1 * theta`` on the half-open interval [min(x, y), max(x, y)) to the
curve theta -> S_theta(x, y).  Summing these pieces with one sorted sweep
over the interval endpoints gives the averaged score curve exactly: it is
piecewise constant for quantiles and piecewise affine for expectiles and
event probabilities, right-continuous, with jumps only at forecast values.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, DomainError
from .scores import (
    check_level,
    elementary_expectile_score,
    elementary_probability_score,
    elementary_quantile_score,
)

DOMINANCE_TOL = 1e-12


@dataclass(frozen=True)
class FunctionalSpec:
    """Which functional the point forecasts target.

    ``kind`` is "quantile", "expectile" or "probability"; the level is ignored
    for event probabilities.
    """

    kind: str
    alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in ("quantile", "expectile", "probability"):
            raise DomainError(f"unknown functional {self.kind!r}")
        if self.kind == "probability":
            object.__setattr__(self, "alpha", 0.5)
        else:
            object.__setattr__(self, "alpha", check_level(self.alpha))

    @classmethod
    def quantile(cls, alpha: float) -> "FunctionalSpec":
        return cls("quantile", alpha)

    @classmethod
    def expectile(cls, alpha: float) -> "FunctionalSpec":
        return cls("expectile", alpha)

    @classmethod
    def mean(cls) -> "FunctionalSpec":
        return cls("expectile", 0.5)

    @classmethod
    def probability(cls) -> "FunctionalSpec":
        return cls("probability")

    @property
    def piecewise_constant(self) -> bool:
        return self.kind == "quantile"

    @property
    def needs_outcome_knots(self) -> bool:
        # kinks at outcomes cancel in differences only for the mean
        return self.kind == "quantile" or (self.kind == "expectile" and self.alpha != 0.5)

    def elementary(self, theta, x, y):
        """Vectorised elementary score S_theta(x, y) for this functional."""
        if self.kind == "quantile":
            return elementary_quantile_score(self.alpha, theta, x, y)
        if self.kind == "expectile":
            return elementary_expectile_score(self.alpha, theta, x, y)
        return elementary_probability_score(theta, x, y)

    def label(self) -> str:
        if self.kind == "probability":
            return "probability"
        if self.kind == "expectile" and self.alpha == 0.5:
            return "mean"
        return f"{self.kind}(alpha={self.alpha:g})"


@dataclass(frozen=True)
class ForecastComparisonSet:
    """n outcomes with an n x l matrix of competing point forecasts."""

    outcomes: np.ndarray
    forecasts: np.ndarray
    functional: FunctionalSpec
    names: tuple = ()

    def __post_init__(self):
        y = np.asarray(self.outcomes, dtype=float).ravel()
        x = np.asarray(self.forecasts, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if y.size < 1 or x.ndim != 2 or x.shape[0] != y.size or x.shape[1] < 1:
            raise DataError(f"need n >= 1 outcomes and an n x l forecast matrix, got {y.shape} and {x.shape}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise DataError("outcomes and forecasts must be finite")
        if self.functional.kind == "probability":
            if not np.all((y == 0) | (y == 1)):
                raise DataError("probability forecasts need binary outcomes coded 0/1")
            if np.any(x < 0) or np.any(x > 1):
                raise DataError("probability forecasts must lie in [0, 1]")
        names = tuple(self.names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DataError("one name per forecast column required")
        object.__setattr__(self, "outcomes", y)
        object.__setattr__(self, "forecasts", x)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.outcomes.size

    @property
    def l(self) -> int:  # noqa: E743
        return self.forecasts.shape[1]

    def column(self, j) -> int:
        if isinstance(j, str):
            try:
                return self.names.index(j)
            except ValueError:
                raise DataError(f"no forecast column named {j!r}") from None
        if not 0 <= j < self.l:
            raise DataError(f"column index {j} out of range for {self.l} forecasters")
        return int(j)


@dataclass(frozen=True)
class MurphyCurve:
    """Exact piecewise affine function of theta.

    On [knots[k], knots[k+1]) the value is ``intercepts[k] + slopes[k] * theta``;
    the last entry covers [knots[-1], inf) and is zero, as is everything left
    of knots[0].  ``left_limits[k]`` is the limit from the left at knots[k].
    """

    functional: FunctionalSpec
    knots: np.ndarray
    intercepts: np.ndarray
    slopes: np.ndarray
    left_limits: np.ndarray
    label: str = ""

    @property
    def support(self) -> tuple[float, float]:
        if self.knots.size == 0:
            return (0.0, 0.0)
        return float(self.knots[0]), float(self.knots[-1])

    def _eval(self, theta, side):
        theta = np.asarray(theta, dtype=float)
        idx = np.searchsorted(self.knots, theta, side=side) - 1
        safe = np.clip(idx, 0, None)
        if self.knots.size == 0:
            out = np.zeros_like(theta)
        else:
            out = np.where(idx >= 0, self.intercepts[safe] + self.slopes[safe] * theta, 0.0)
        return float(out) if out.ndim == 0 else out

    def __call__(self, theta):
        """Right-continuous value at theta (vectorised)."""
        return self._eval(theta, "right")

    def left(self, theta):
        """Limit from the left at theta (vectorised)."""
        return self._eval(theta, "left")

    def slope_at(self, theta: float) -> float:
        k = np.searchsorted(self.knots, theta, side="right") - 1
        return float(self.slopes[k]) if k >= 0 else 0.0

    def values_at_knots(self) -> np.ndarray:
        return self.intercepts + self.slopes * self.knots

    def area(self) -> float:
        widths = np.diff(self.knots)
        mids = 0.5 * (self.knots[:-1] + self.knots[1:])
        return float(np.sum(widths * (self.intercepts[:-1] + self.slopes[:-1] * mids)))

    def rows(self) -> list[tuple[float, float, float]]:
        """Export as (theta, value, left_value) at every knot."""
        return list(zip(self.knots.tolist(), self.values_at_knots().tolist(), self.left_limits.tolist()))

    def __sub__(self, other: "MurphyCurve") -> "MurphyCurve":
        return _combine([(self, 1.0), (other, -1.0)], self.functional)


def curve_eval(curve: MurphyCurve, theta):
    return curve(theta)


def curve_eval_left(curve: MurphyCurve, theta):
    return curve.left(theta)


def _pieces(functional: FunctionalSpec, x: np.ndarray, y: np.ndarray):
    """Per-record interval [lo, hi) and affine coefficients (c0, c1); x == y dropped."""
    keep = x != y
    x, y = x[keep], y[keep]
    over = y < x  # forecast above outcome
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    a = functional.alpha
    if functional.kind == "quantile":
        c0 = np.where(over, 1.0 - a, a)
        c1 = np.zeros_like(c0)
    else:
        scale = 2.0 if functional.kind == "probability" else 1.0
        # (1-a)(theta - y) on [y, x);  a (y - theta) on [x, y)
        w = np.where(over, 1.0 - a, a) * scale
        c0 = np.where(over, -w * y, w * y)
        c1 = np.where(over, w, -w)
    return lo, hi, c0, c1


def _sweep(events, functional: FunctionalSpec, n: int, label: str = "") -> MurphyCurve:
    """Build a curve from (lo, hi, c0, c1, sign) blocks by one sorted sweep."""
    pos = np.concatenate([np.concatenate([lo, hi]) for lo, hi, *_ in events]) if events else np.empty(0)
    if pos.size == 0:
        empty = np.empty(0)
        return MurphyCurve(functional, empty, empty, empty, empty, label)
    d0 = np.concatenate([np.concatenate([s * c0, -s * c0]) for _, _, c0, _, s in events])
    d1 = np.concatenate([np.concatenate([s * c1, -s * c1]) for _, _, _, c1, s in events])
    dc = np.concatenate([np.concatenate([np.ones(lo.size, int), -np.ones(lo.size, int)]) for lo, *_ in events])
    knots, inverse = np.unique(pos, return_inverse=True)
    # aggregate per knot, then prefix sums give the active sums on [knot_k, knot_{k+1})
    agg0 = np.zeros(knots.size)
    agg1 = np.zeros(knots.size)
    aggc = np.zeros(knots.size, dtype=int)
    np.add.at(agg0, inverse, d0)
    np.add.at(agg1, inverse, d1)
    np.add.at(aggc, inverse, dc)
    active = np.cumsum(aggc)
    intercepts = np.cumsum(agg0) / n
    slopes = np.cumsum(agg1) / n
    idle = active == 0
    intercepts[idle] = 0.0
    slopes[idle] = 0.0
    left = np.zeros(knots.size)
    left[1:] = intercepts[:-1] + slopes[:-1] * knots[1:]
    return MurphyCurve(functional, knots, intercepts, slopes, left, label)


def _combine(weighted: Sequence[tuple[MurphyCurve, float]], functional: FunctionalSpec) -> MurphyCurve:
    """Linear combination of curves on the union of their knots."""
    knots = np.unique(np.concatenate([c.knots for c, _ in weighted]))
    inter = np.zeros(knots.size)
    slope = np.zeros(knots.size)
    left = np.zeros(knots.size)
    for c, w in weighted:
        if c.knots.size == 0:
            continue
        idx = np.searchsorted(c.knots, knots, side="right") - 1
        ok = idx >= 0
        inter[ok] += w * c.intercepts[idx[ok]]
        slope[ok] += w * c.slopes[idx[ok]]
        left += w * c.left(knots)
    return MurphyCurve(functional, knots, inter, slope, left)


def empirical_curve(data: ForecastComparisonSet, j) -> MurphyCurve:
    """theta -> (1/n) sum_i S_theta(x_ij, y_i), built in O(n log n)."""
    j = data.column(j)
    lo, hi, c0, c1 = _pieces(data.functional, data.forecasts[:, j], data.outcomes)
    return _sweep([(lo, hi, c0, c1, 1.0)], data.functional, data.n, data.names[j])


def difference_curve(data: ForecastComparisonSet, j1, j2) -> MurphyCurve:
    """theta -> s_j1(theta) - s_j2(theta), swept in one pass over both columns."""
    j1, j2 = data.column(j1), data.column(j2)
    label = f"{data.names[j1]} - {data.names[j2]}"
    if j1 == j2:
        empty = np.empty(0)
        return MurphyCurve(data.functional, empty, empty, empty, empty, label)
    p1 = _pieces(data.functional, data.forecasts[:, j1], data.outcomes)
    p2 = _pieces(data.functional, data.forecasts[:, j2], data.outcomes)
    return _sweep([(*p1, 1.0), (*p2, -1.0)], data.functional, data.n, label)


def area_under_curve(curve: MurphyCurve) -> float:
    return curve.area()


@dataclass(frozen=True)
class KnotSet:
    """Points where the score difference must be checked.

    ``points`` are evaluated right-continuously, ``left_points`` as limits
    from the left.
    """

    points: np.ndarray
    left_points: np.ndarray


def knot_set(data: ForecastComparisonSet, j1, j2) -> KnotSet:
    j1, j2 = data.column(j1), data.column(j2)
    xs = np.concatenate([data.forecasts[:, j1], data.forecasts[:, j2]])
    f = data.functional
    if f.kind == "quantile":
        return KnotSet(np.unique(np.concatenate([xs, data.outcomes])), np.empty(0))
    fx = np.unique(xs)
    if f.needs_outcome_knots:
        return KnotSet(np.unique(np.concatenate([xs, data.outcomes])), fx)
    return KnotSet(fx, fx)


class Verdict(enum.Enum):
    FIRST_DOMINATES = "first_dominates"
    SECOND_DOMINATES = "second_dominates"
    EQUIVALENT = "equivalent"
    NO_DOMINANCE = "no_dominance"


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of the finite-knot check, with the evaluations that produced it.

    ``witness_first`` is a theta where the first forecaster scores strictly
    lower, ``witness_second`` one where the second does (only for
    NO_DOMINANCE).  ``evaluations`` lists (theta, side, difference) with side
    "value" or "left".
    """

    verdict: Verdict
    witness_first: Optional[float] = None
    witness_second: Optional[float] = None
    evaluations: list = field(default_factory=list)


def _interior_witness(diff: MurphyCurve, theta0: float, sign: float, tol: float = DOMINANCE_TOL) -> float:
    """A point left of theta0 where diff has the sign of its left limit there."""
    k = np.searchsorted(diff.knots, theta0, side="left") - 1
    p = float(diff.knots[k])
    va, vb = diff(p), diff.left(theta0)
    if sign * va > tol:
        return p
    # diff is affine on [p, theta0): pick the point where it equals vb / 2
    lam = 0.5 * vb / (vb - va)
    cand = theta0 - (theta0 - p) * lam
    for _ in range(60):
        if p <= cand < theta0 and sign * diff(cand) > tol:
            return float(cand)
        lam *= 0.5
        cand = theta0 - (theta0 - p) * lam
    return float(np.nextafter(theta0, -np.inf))


def dominance_check(data: ForecastComparisonSet, j1, j2, tol: float = DOMINANCE_TOL) -> DominanceVerdict:
    """Decide dominance between two columns from the finite knot set."""
    diff = difference_curve(data, j1, j2)
    ks = knot_set(data, j1, j2)
    right = np.atleast_1d(diff(ks.points))
    left = np.atleast_1d(diff.left(ks.left_points)) if ks.left_points.size else np.empty(0)
    evaluations = [(float(t), "value", float(v)) for t, v in zip(ks.points, right)]
    evaluations += [(float(t), "left", float(v)) for t, v in zip(ks.left_points, left)]
    evaluations.sort(key=lambda e: (e[0], e[1] != "left"))

    first_better = [e for e in evaluations if e[2] < -tol]
    second_better = [e for e in evaluations if e[2] > tol]
    if not first_better and not second_better:
        return DominanceVerdict(Verdict.EQUIVALENT, evaluations=evaluations)
    if not second_better:
        return DominanceVerdict(Verdict.FIRST_DOMINATES, evaluations=evaluations)
    if not first_better:
        return DominanceVerdict(Verdict.SECOND_DOMINATES, evaluations=evaluations)

    def witness(e, sign):
        theta, side, _ = e
        return theta if side == "value" else _interior_witness(diff, theta, sign, tol)

    return DominanceVerdict(
        Verdict.NO_DOMINANCE,
        witness_first=witness(first_better[0], -1.0),
        witness_second=witness(second_better[0], 1.0),
        evaluations=evaluations,
    )


def best_forecaster_map(data: ForecastComparisonSet, tol: float = DOMINANCE_TOL) -> list[tuple[float, float, frozenset]]:
    """Partition the common support into maximal [lo, hi) with a constant argmin set.

    Between consecutive knots every curve is affine, so the argmin can only
    change where two lines cross; those crossings are added as breakpoints
    and the argmin is read off at sub-interval midpoints.
    """
    if data.l < 2:
        raise DomainError("need at least two forecasters")
    curves = [empirical_curve(data, j) for j in range(data.l)]
    knots = np.unique(np.concatenate([c.knots for c in curves]))
    if knots.size < 2:
        return []
    out: list[tuple[float, float, frozenset]] = []
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        vals = np.array([c(mid) for c in curves])
        slps = np.array([c.slope_at(mid) for c in curves])
        cuts = [a, b]
        for i in range(data.l):
            for k in range(i + 1, data.l):
                if slps[i] != slps[k]:
                    t = mid + (vals[k] - vals[i]) / (slps[i] - slps[k])
                    if a < t < b:
                        cuts.append(float(t))
        cuts = sorted(set(cuts))
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            vals = np.array([c(0.5 * (lo + hi)) for c in curves])
            best = frozenset(np.flatnonzero(vals <= vals.min() + tol).tolist())
            if out and out[-1][2] == best and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi, best)
            else:
                out.append((float(lo), float(hi), best))
    return out
