import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scoremix.errors import DataError, DomainError
from scoremix.murphy import (
    ForecastComparisonSet,
    FunctionalSpec,
    Verdict,
    area_under_curve,
    best_forecaster_map,
    curve_eval,
    curve_eval_left,
    difference_curve,
    dominance_check,
    empirical_curve,
    knot_set,
)
from scoremix.scores import apl_score, ase_score, brier_score

Q = FunctionalSpec.quantile(0.5)
M = FunctionalSpec.mean()


def one(x1, x2, y, f=Q):
    return ForecastComparisonSet([y], [[x1, x2]], f)


def direct(data, j, theta):
    return np.mean(data.functional.elementary(theta, data.forecasts[:, j], data.outcomes))


def test_knot_set_examples():
    assert knot_set(one(2, 0, 1), 0, 1).points.tolist() == [0, 1, 2]
    ks = knot_set(one(2, 0, 1, M), 0, 1)
    assert ks.points.tolist() == [0, 2] and ks.left_points.tolist() == [0, 2]
    assert knot_set(one(5, 5, 5), 0, 1).points.tolist() == [5]
    # alpha != 1/2 expectiles also need the outcomes
    ks = knot_set(one(2, 0, 1, FunctionalSpec.expectile(0.3)), 0, 1)
    assert ks.points.tolist() == [0, 1, 2]


def test_empirical_curve_examples():
    d = ForecastComparisonSet([0.0], [[2.0]], Q)
    c = empirical_curve(d, 0)
    assert curve_eval(c, 0.0) == 0.5 and curve_eval_left(c, 0.0) == 0.0
    assert curve_eval(c, 1.9) == 0.5 and curve_eval(c, 2.0) == 0.0
    assert curve_eval(c, -5) == 0.0 and curve_eval(c, 50) == 0.0
    e = empirical_curve(ForecastComparisonSet([0.0], [[2.0]], M), 0)
    assert curve_eval(e, 1.0) == 0.5 and curve_eval(e, 1.5) == 0.75
    assert curve_eval_left(e, 2.0) == pytest.approx(1.0)
    z = empirical_curve(ForecastComparisonSet([1.0, 2.0], [[1.0], [2.0]], Q), 0)
    assert z.knots.size == 0 and curve_eval(z, 1.5) == 0.0


def test_difference_curve_examples():
    d = one(2, 0, 1)
    diff = difference_curve(d, 0, 1)
    assert curve_eval(diff, 0.5) == -0.5 and curve_eval(diff, 1.5) == 0.5
    assert curve_eval(diff, 2.0) == 0.0 and curve_eval(diff, -0.1) == 0.0
    same = difference_curve(d, 1, 1)
    assert curve_eval(same, 0.5) == 0.0
    rng = np.random.default_rng(3)
    y = rng.normal(size=30)
    data = ForecastComparisonSet(y, np.column_stack([y, y + rng.normal(size=30)]), Q)
    grid = np.linspace(-4, 4, 301)
    assert np.all(curve_eval(difference_curve(data, 0, 1), grid) <= 0)


def test_dominance_examples():
    v = dominance_check(one(2, 0, 1), 0, 1)
    assert v.verdict is Verdict.NO_DOMINANCE
    assert v.witness_first == 0.0 and v.witness_second == 1.0
    rng = np.random.default_rng(4)
    y = rng.normal(size=20)
    x2 = y + rng.normal(size=20)
    assert dominance_check(ForecastComparisonSet(y, np.column_stack([y, x2]), Q), 0, 1).verdict is Verdict.FIRST_DOMINATES
    assert dominance_check(ForecastComparisonSet(y, np.column_stack([x2, y]), M), 0, 1).verdict is Verdict.SECOND_DOMINATES
    assert dominance_check(ForecastComparisonSet(y, np.column_stack([x2, x2]), Q), 0, 1).verdict is Verdict.EQUIVALENT


def test_area_examples():
    d = ForecastComparisonSet([0.0], [[2.0]], Q)
    assert area_under_curve(empirical_curve(d, 0)) == 1.0 == apl_score(0.5, 2, 0)
    e = ForecastComparisonSet([0.0], [[2.0]], M)
    assert area_under_curve(empirical_curve(e, 0)) == pytest.approx(ase_score(0.5, 2, 0) / 2)
    z = ForecastComparisonSet([1.0], [[1.0]], Q)
    assert area_under_curve(empirical_curve(z, 0)) == 0.0


def test_best_forecaster_map_examples():
    m = best_forecaster_map(one(2, 0, 1))
    assert [(lo, hi, set(s)) for lo, hi, s in m] == [(0, 1, {0}), (1, 2, {1})]
    rng = np.random.default_rng(5)
    y = rng.normal(size=10)
    m = best_forecaster_map(ForecastComparisonSet(y, np.column_stack([y, y + 1]), Q))
    assert len(m) == 1 and m[0][2] == {0}
    m = best_forecaster_map(ForecastComparisonSet(y, np.column_stack([y + 1, y + 1]), Q))
    assert all(s == {0, 1} for _, _, s in m)
    with pytest.raises(DomainError):
        best_forecaster_map(ForecastComparisonSet(y, y[:, None], Q))


def test_comparison_set_validation():
    with pytest.raises(DataError):
        ForecastComparisonSet([0.5], [[0.2]], FunctionalSpec.probability())
    with pytest.raises(DataError):
        ForecastComparisonSet([1.0], [[1.2]], FunctionalSpec.probability())
    with pytest.raises(DataError):
        ForecastComparisonSet([1.0, np.nan], [[1.0], [2.0]], Q)
    d = ForecastComparisonSet([1.0], [[1.0, 2.0]], Q, ("a", "b"))
    assert d.column("b") == 1
    with pytest.raises(DataError):
        d.column("c")


# -- properties ----------------------------------------------------------------

functionals = st.sampled_from(
    [
        FunctionalSpec.quantile(0.5),
        FunctionalSpec.quantile(0.13),
        FunctionalSpec.expectile(0.5),
        FunctionalSpec.expectile(0.8),
        FunctionalSpec.probability(),
    ]
)


@st.composite
def datasets(draw, max_n=40):
    f = draw(functionals)
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if f.kind == "probability":
        y = (rng.random(n) < 0.4).astype(float)
        x = np.round(rng.random((n, 2)), draw(st.integers(1, 3)))
    else:
        # coarse rounding forces ties between forecasts and outcomes
        y = np.round(rng.normal(size=n), draw(st.integers(0, 2)))
        x = np.round(y[:, None] + rng.normal(size=(n, 2)), 1)
    return ForecastComparisonSet(y, x, f)


@settings(max_examples=80, deadline=None)
@given(datasets(), st.integers(0, 10**6))
def test_curve_matches_direct_summation(data, seed):
    rng = np.random.default_rng(seed)
    lo = min(data.outcomes.min(), data.forecasts.min()) - 0.5
    hi = max(data.outcomes.max(), data.forecasts.max()) + 0.5
    if data.functional.kind == "probability":
        lo, hi = 0.0, 1.0  # cost-loss ratios live in the unit interval
    thetas = np.concatenate([rng.uniform(lo, hi, 200), data.forecasts.ravel(), data.outcomes])
    for j in range(data.l):
        c = empirical_curve(data, j)
        oracle = np.array([direct(data, j, t) for t in thetas])
        assert np.max(np.abs(c(thetas) - oracle)) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(datasets())
def test_area_identities(data):
    f = data.functional
    x, y = data.forecasts[:, 0], data.outcomes
    area = area_under_curve(empirical_curve(data, 0))
    if f.kind == "quantile":
        target = np.mean(apl_score(f.alpha, x, y))
    elif f.kind == "expectile":
        target = np.mean(ase_score(f.alpha, x, y)) / 2
    else:
        target = np.mean(brier_score(x, y)) / 2
    assert area == pytest.approx(target, abs=1e-10)


@settings(max_examples=80, deadline=None)
@given(datasets())
def test_curve_vanishes_outside_support_and_knots_are_data_points(data):
    c = empirical_curve(data, 0)
    lo = min(data.outcomes.min(), data.forecasts[:, 0].min())
    hi = max(data.outcomes.max(), data.forecasts[:, 0].max())
    assert c(lo - 1e-9) == 0.0 and c(hi) == 0.0 and c(hi + 10) == 0.0
    d = difference_curve(data, 0, 1)
    allowed = set(data.forecasts.ravel()) | set(data.outcomes)
    assert set(d.knots.tolist()) <= allowed


@settings(max_examples=80, deadline=None)
@given(datasets(max_n=15))
def test_verdict_consistent_with_dense_scan(data):
    v = dominance_check(data, 0, 1)
    d = difference_curve(data, 0, 1)
    lo, hi = d.support
    grid = np.linspace(lo - 0.1, hi + 0.1, 2001)
    mids = 0.5 * (d.knots[:-1] + d.knots[1:]) if d.knots.size > 1 else np.empty(0)
    vals = np.concatenate([np.atleast_1d(d(grid)), np.atleast_1d(d(mids))])
    if v.verdict is Verdict.FIRST_DOMINATES:
        assert vals.max() <= 1e-12
    elif v.verdict is Verdict.SECOND_DOMINATES:
        assert vals.min() >= -1e-12
    elif v.verdict is Verdict.EQUIVALENT:
        assert np.abs(vals).max() <= 1e-12
    else:
        assert d(v.witness_first) < -1e-12 and d(v.witness_second) > 1e-12


@settings(max_examples=40, deadline=None)
@given(datasets(max_n=12))
def test_best_map_agrees_with_pointwise_minimum(data):
    curves = [empirical_curve(data, j) for j in range(data.l)]
    for lo, hi, best in best_forecaster_map(data):
        t = 0.5 * (lo + hi)
        vals = np.array([c(t) for c in curves])
        assert best == frozenset(np.flatnonzero(vals <= vals.min() + 1e-12).tolist())
