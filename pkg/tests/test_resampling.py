import itertools
import math
import statistics
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.empirical import empirical_quantile, to_level
from src.estimators import Estimator
from src.exceptions import EnumerationError, SpecError
from src.fixedb_limits import LimitKind, cv_lookup
from src.resampling import (
    BlockSpec, Calibration, Method, PValueKind, Shape, build_ci, exact_mbb_pvalue, interval_level,
    mbb_indices, mbb_pvalue, mbb_resample, mbb_stats, pvalue_uniformity, subsample_pvalue,
    subsample_stats,
)
from src.series_gen import Family, ModelSpec, TimeSeries, gen_series


def _trimmed_mean(w, gamma=0.25):
    s = sorted(w)
    cut = math.floor(round(gamma * len(s), 9))
    kept = s[cut:len(s) - cut]
    return sum(kept) / len(kept)


STATS = {
    "mean": lambda w: sum(w) / len(w),
    "median": statistics.median,
    "trimmed_mean:0.25": _trimmed_mean,
}
KINDS = {"upper": PValueKind.UPPER, "lower": PValueKind.LOWER, "symmetric": PValueKind.SYMMETRIC}


def _scaled(scale, d, kind):
    return scale * (abs(d) if kind == "symmetric" else d)


def _hit(value, observed, kind):
    return value <= observed if kind == "lower" else value >= observed


def brute_subsample_pvalue(x, l, stat, theta0, kind):
    n = len(x)
    full = stat(x)
    observed = _scaled(math.sqrt(n), full - theta0, kind)
    values = [_scaled(math.sqrt(l), stat(x[j:j + l]) - full, kind) for j in range(n - l + 1)]
    return Fraction(sum(_hit(v, observed, kind) for v in values), len(values))


def brute_mbb_pvalue(x, l, stat, theta0, kind):
    """Enumerates ordered block-start tuples and every start of the partial block."""
    n = len(x)
    full_blocks, rest = divmod(n, l)
    full = stat(x)
    observed = _scaled(math.sqrt(n), full - theta0, kind)
    extras = range(n - rest + 1) if rest else [None]
    hits = total = 0
    for starts in itertools.product(range(n - l + 1), repeat=full_blocks):
        base = [v for s in starts for v in x[s:s + l]]
        for e in extras:
            sample = base if e is None else base + x[e:e + rest]
            hits += _hit(_scaled(math.sqrt(n), stat(sample) - full, kind), observed, kind)
            total += 1
    return Fraction(hits, total)


def _mbb_size(n, l):
    full_blocks, rest = divmod(n, l)
    return (n - l + 1) ** full_blocks * ((n - rest + 1) if rest else 1)


series_cases = st.lists(st.integers(-4, 4), min_size=2, max_size=8)


@settings(max_examples=200)
@given(series_cases, st.data())
def test_subsample_pvalue_matches_brute_force(values, data):
    n = len(values)
    l = data.draw(st.integers(1, n))
    name = data.draw(st.sampled_from(sorted(STATS)))
    kind = data.draw(st.sampled_from(sorted(KINDS)))
    theta0 = data.draw(st.integers(-8, 8)) / 2
    x = [float(v) for v in values]
    p = subsample_pvalue(TimeSeries(x), BlockSpec(n, l), Estimator.parse(name), [theta0], KINDS[kind])
    assert p == brute_subsample_pvalue(x, l, STATS[name], theta0, kind)


@settings(max_examples=200)
@given(series_cases, st.data())
def test_exact_mbb_pvalue_matches_independent_enumerator(values, data):
    n = len(values)
    l = data.draw(st.integers(1, n))
    assume(_mbb_size(n, l) <= 3000)
    name = data.draw(st.sampled_from(sorted(STATS)))
    kind = data.draw(st.sampled_from(sorted(KINDS)))
    theta0 = data.draw(st.integers(-8, 8)) / 2
    x = [float(v) for v in values]
    p = mbb_pvalue(TimeSeries(x), BlockSpec(n, l), Estimator.parse(name), [theta0], KINDS[kind], exact=True)
    assert p == brute_mbb_pvalue(x, l, STATS[name], theta0, kind)


def test_mbb_example_with_unit_blocks():
    # l = 1 is the iid bootstrap: 2^2 equally likely samples
    ts = TimeSeries([0.0, 2.0])
    p = exact_mbb_pvalue(ts, BlockSpec(2, 1), Estimator.mean(), [0.0], PValueKind.UPPER)
    # theta* - 1 over {0, 1, 1, 2} is {-1, 0, 0, 1}; observed sqrt(2) * 1
    assert p == Fraction(1, 4)


def test_exact_enumeration_is_limited():
    ts = gen_series(ModelSpec(), 13, seed=0)
    with pytest.raises(EnumerationError):
        exact_mbb_pvalue(ts, BlockSpec(13, 3), Estimator.mean(), [0.0], PValueKind.UPPER)


def test_block_spec():
    spec = BlockSpec(100, 10)
    assert spec.b == Fraction(1, 10)
    assert spec.N == 91
    assert BlockSpec.from_fraction(100, 0.1) == spec
    # halves round up
    assert [BlockSpec.from_fraction(n, 0.1).l for n in (25, 35, 45, 24)] == [3, 4, 5, 2]
    assert BlockSpec.from_fraction(30, 0.05).l == 2
    assert BlockSpec.from_fraction(10, 0.01).l == 1
    for l in (0, 101):
        with pytest.raises(SpecError):
            BlockSpec(100, l)
    with pytest.raises(SpecError):
        spec.check(TimeSeries(np.zeros(50)))


def test_pvalue_granularity(ar_series):
    spec = BlockSpec(ar_series.n, 20)
    p = subsample_pvalue(ar_series, spec, Estimator.median(), [0.1], PValueKind.SYMMETRIC)
    assert (p * spec.N).denominator == 1
    assert 0 <= p <= 1


def test_pvalue_at_the_estimate_is_one(ar_series):
    est = Estimator.mean()
    theta = est.apply(ar_series.values)
    spec = BlockSpec(ar_series.n, 10)
    assert subsample_pvalue(ar_series, spec, est, theta, PValueKind.SYMMETRIC) == 1
    assert mbb_pvalue(ar_series, spec, est, theta, PValueKind.SYMMETRIC, B=200, seed=1) == 1


def test_vector_pvalue_needs_matching_theta(ar_series):
    spec = BlockSpec(ar_series.n, 10)
    est = Estimator.parse("mean,median")
    p = subsample_pvalue(ar_series, spec, est, [0.0, 0.0], PValueKind.VECTOR_NORM)
    assert 0 <= p <= 1
    with pytest.raises(SpecError):
        subsample_pvalue(ar_series, spec, est, [0.0], PValueKind.VECTOR_NORM)
    with pytest.raises(SpecError):
        subsample_pvalue(ar_series, spec, est, [0.0, 0.0], PValueKind.SYMMETRIC)


@pytest.mark.parametrize("stat", ["mean", "median", "trimmed_mean:0.25"])
@pytest.mark.parametrize("kind", [PValueKind.UPPER, PValueKind.SYMMETRIC])
def test_pvalues_invariant_to_affine_maps(stat, kind):
    ts = gen_series(ModelSpec(Family.ARMA11, rho=0.5), 120, seed=21)
    mapped = TimeSeries(2.5 * ts.values - 1.3)
    est = Estimator.parse(stat)
    spec = BlockSpec(120, 12)
    for theta0 in (-0.3, 0.0, 0.4):
        p = subsample_pvalue(ts, spec, est, [theta0], kind)
        q = subsample_pvalue(mapped, spec, est, [2.5 * theta0 - 1.3], kind)
        assert p == q
        p = mbb_pvalue(ts, spec, est, [theta0], kind, B=300, seed=4)
        q = mbb_pvalue(mapped, spec, est, [2.5 * theta0 - 1.3], kind, B=300, seed=4)
        assert p == q


def test_mbb_indices_layout():
    spec = BlockSpec(11, 3)
    idx = mbb_indices(spec, seed=8, draws=50)
    assert idx.shape == (50, 11)
    assert idx.min() >= 0 and idx.max() <= 10
    blocks = idx[:, :9].reshape(50, 3, 3)
    np.testing.assert_array_equal(np.diff(blocks, axis=-1), 1)
    np.testing.assert_array_equal(idx[:, 10] - idx[:, 9], 1)
    np.testing.assert_array_equal(mbb_indices(spec, seed=8, draws=20), idx[:20])


def test_mbb_resample_and_stats(ar_series):
    spec = BlockSpec(ar_series.n, 15)
    pseudo = mbb_resample(ar_series, spec, seed=3)
    assert pseudo.n == ar_series.n
    assert set(pseudo.values) <= set(ar_series.values)
    dist = mbb_stats(ar_series, spec, Estimator.mean(), PValueKind.SYMMETRIC, B=400, seed=3)
    assert dist.count == 400
    assert np.all(dist.values >= 0)
    again = mbb_stats(ar_series, spec, Estimator.mean(), PValueKind.SYMMETRIC, B=400, seed=3)
    np.testing.assert_array_equal(dist.values, again.values)
    with pytest.raises(SpecError):
        Method.mbb(B=0)


def test_subsample_stats_count(iid_series):
    dist = subsample_stats(iid_series, BlockSpec(100, 10), Estimator.mean(), PValueKind.UPPER)
    assert dist.count == 91


def test_interval_levels():
    ss, mbb = Method.ss(), Method.mbb(100)
    assert interval_level(0.05, 0.1, ss, Calibration.SMALL_B, Shape.SYMMETRIC) == Fraction(1, 20)
    assert interval_level(0.05, 0.1, ss, Calibration.SMALL_B, Shape.EQUAL_TAILED) == Fraction(1, 40)
    fixed = interval_level(0.05, 0.1, ss, Calibration.FIXED_B, Shape.SYMMETRIC)
    assert fixed == to_level(cv_lookup(LimitKind.GTILDE, 0.05, 0.1))
    assert interval_level(0.1, 0.1, mbb, Calibration.FIXED_B, Shape.ONE_SIDED_UPPER) == \
        to_level(cv_lookup(LimitKind.H, 0.1, 0.1))
    with pytest.raises(SpecError):
        interval_level(1.0, 0.1, ss, Calibration.SMALL_B, Shape.SYMMETRIC)


def test_upper_pvalue_by_hand():
    # observed sqrt(4) * 0.5 = 1; window statistics sqrt(2) * (-1, 0, 1)
    ts = TimeSeries([1.0, 2.0, 3.0, 4.0])
    assert subsample_pvalue(ts, BlockSpec(4, 2), Estimator.mean(), [2.0], PValueKind.UPPER) == Fraction(1, 3)


def test_exact_mbb_symmetric_pvalue_by_hand():
    # |sqrt(2)(mean* - 1)| over {0, 1, 1, 2} is {sqrt 2, 0, 0, sqrt 2}
    ts = TimeSeries([0.0, 2.0])
    p = mbb_pvalue(ts, BlockSpec(2, 1), Estimator.mean(), [0.0], PValueKind.SYMMETRIC, exact=True)
    assert p == Fraction(1, 2)


def test_symmetric_interval_by_hand():
    interval = build_ci(TimeSeries([1.0, 2.0, 3.0, 4.0]), BlockSpec(4, 2), Estimator.mean(), 0.05)
    assert interval.lo == pytest.approx(2.5 - math.sqrt(2) / 2, abs=1e-12)
    assert interval.hi == pytest.approx(2.5 + math.sqrt(2) / 2, abs=1e-12)
    assert interval.level == Fraction(1, 20)


@pytest.mark.parametrize("seed", range(30))
def test_interval_membership_agrees_with_pvalues_at_the_endpoints(seed):
    ts = gen_series(ModelSpec(Family.ARMA11, rho=0.5), 100, seed=seed)
    spec = BlockSpec(100, 10)
    est = Estimator.mean()
    theta = est.apply(ts.values)[0]
    root_n = np.sqrt(ts.n)
    for shape, kind in ((Shape.SYMMETRIC, PValueKind.SYMMETRIC), (Shape.ONE_SIDED_UPPER, PValueKind.UPPER)):
        interval = build_ci(ts, spec, est, 0.05, shape=shape)
        dist = subsample_stats(ts, spec, est, kind)
        c = empirical_quantile(dist, Fraction(19, 20))
        edges = (interval.lo, interval.hi) if shape is Shape.SYMMETRIC else (interval.lo,)
        for edge in edges:
            for x in (edge, math.nextafter(edge, -math.inf), math.nextafter(edge, math.inf)):
                scaled = root_n * (abs(theta - x) if shape is Shape.SYMMETRIC else theta - x)
                assert (x in interval) == (scaled <= c)
                p = subsample_pvalue(ts, spec, est, [x], kind)
                assert (x in interval) == (p >= dist.exceedance(c))


def test_fixed_b_interval_is_wider(ar_series):
    spec = BlockSpec(ar_series.n, 20)
    est = Estimator.mean()
    small = build_ci(ar_series, spec, est, 0.05)
    fixed = build_ci(ar_series, spec, est, 0.05, calibration=Calibration.FIXED_B)
    theta = est.apply(ar_series.values)[0]
    assert theta in small and theta in fixed
    assert fixed.width >= small.width > 0
    assert small.lo + small.hi == pytest.approx(2 * theta)


@pytest.mark.parametrize("method", [Method.ss(), Method.mbb(500, seed=2)])
def test_interval_shapes(ar_series, method):
    spec = BlockSpec(ar_series.n, 10)
    est = Estimator.trimmed_mean()
    upper = build_ci(ar_series, spec, est, 0.1, method, Calibration.FIXED_B, Shape.ONE_SIDED_UPPER)
    lower = build_ci(ar_series, spec, est, 0.1, method, Calibration.FIXED_B, Shape.ONE_SIDED_LOWER)
    tails = build_ci(ar_series, spec, est, 0.1, method, Calibration.FIXED_B, Shape.EQUAL_TAILED)
    assert upper.hi == math.inf and math.isfinite(upper.lo)
    assert lower.lo == -math.inf and math.isfinite(lower.hi)
    assert tails.lo <= tails.hi


def test_interval_errors(ar_series):
    spec = BlockSpec(ar_series.n, 60)
    with pytest.raises(SpecError):
        build_ci(ar_series, spec, Estimator.parse("mean,median"), 0.05)
    from src.exceptions import TableDomainError
    with pytest.raises(TableDomainError):
        build_ci(ar_series, spec, Estimator.mean(), 0.05, calibration=Calibration.FIXED_B)
    with pytest.raises(TableDomainError):
        build_ci(ar_series, BlockSpec(ar_series.n, 10), Estimator.mean(), 0.01,
                 calibration=Calibration.FIXED_B)


def test_pvalue_uniformity_diagnostic(caplog):
    uniform = [Fraction(i, 100) for i in range(1, 101)]
    assert pvalue_uniformity(uniform) <= 0.011
    assert pvalue_uniformity([Fraction(1)] * 50) > 0.9
    assert "non-uniform" in caplog.text
