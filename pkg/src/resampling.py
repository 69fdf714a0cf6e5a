"""
First-stage resampling: subsampling and the moving block bootstrap.

Both engines approximate the law of sqrt(n)(theta_hat - theta) by recomputing the
estimator on resampled data. p-values use the closed inequalities of their defining
sums (ties count as exceedances) and are returned as exact fractions.
"""

import enum
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .empirical import EmpiricalDist, count_at_least, empirical_quantile, to_level
from .estimators import windows
from .exceptions import EnumerationError, SpecError
from .fixedb_limits import LimitKind, cv_lookup
from .series_gen import TimeSeries
from .streams import as_generator

logger = logging.getLogger(__name__)

DEFAULT_BOOTSTRAP_REPS = 5000
MAX_EXACT_N = 12
_ENUM_CHUNK = 100_000


class PValueKind(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    SYMMETRIC = "symmetric"
    VECTOR_NORM = "vector_norm"


class Shape(enum.Enum):
    ONE_SIDED_UPPER = "one-sided-upper"
    ONE_SIDED_LOWER = "one-sided-lower"
    EQUAL_TAILED = "equal-tailed"
    SYMMETRIC = "symmetric"


class Calibration(enum.Enum):
    SMALL_B = "small-b"
    FIXED_B = "fixed-b"


@dataclass(frozen=True)
class BlockSpec:
    """Window or block length l for a series of length n."""

    n: int
    l: int

    def __post_init__(self):
        if not 1 <= self.l <= self.n:
            raise SpecError(f"block length must satisfy 1 <= l <= n, got l={self.l}, n={self.n}")

    @property
    def b(self):
        return Fraction(self.l, self.n)

    @property
    def N(self):
        return self.n - self.l + 1

    @classmethod
    def from_fraction(cls, n, b):
        """l = ⌊b n + 1/2⌋ in exact arithmetic (halves round up), at least 1."""
        n = int(n)
        return cls(n, max(1, math.floor(to_level(b) * n + Fraction(1, 2))))

    def check(self, ts):
        if ts.n != self.n:
            raise SpecError(f"block spec is for n={self.n}, series has n={ts.n}")
        return self


@dataclass(frozen=True)
class Method:
    """SS, or MBB with B draws from ``seed``."""

    name: str = "ss"
    B: int = DEFAULT_BOOTSTRAP_REPS
    seed: int = 0

    @classmethod
    def ss(cls):
        return cls("ss")

    @classmethod
    def mbb(cls, B=DEFAULT_BOOTSTRAP_REPS, seed=0):
        if int(B) < 1:
            raise SpecError(f"B must be >= 1, got {B}")
        return cls("mbb", int(B), int(seed))

    @property
    def is_mbb(self):
        return self.name == "mbb"


@dataclass(frozen=True)
class Interval:
    """Interval for theta with its defining critical values.

    Membership is decided on the root-n scale, c_lower <= sqrt(n)(theta_hat - x) <= c_upper
    (|.| for SYMMETRIC), so it agrees with the p-value arithmetic at the endpoints; ``lo``
    and ``hi`` are the rounded endpoints for reporting.
    """

    lo: float
    hi: float
    level: Fraction
    shape: Shape
    theta: float
    root_n: float
    c_lower: float = -math.inf
    c_upper: float = math.inf

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        x = float(x)
        if math.isnan(x):
            return False
        if self.shape is Shape.SYMMETRIC:
            return float(self.root_n * abs(self.theta - x)) <= self.c_upper
        scaled = float(self.root_n * (self.theta - x))
        return self.c_lower <= scaled <= self.c_upper


def _check_kind(kind, k):
    if kind is not PValueKind.VECTOR_NORM and k != 1:
        raise SpecError(f"{kind.value} p-values need a scalar estimator, got k={k}")


def _scaled(diff, scale, kind):
    """scale * (diff), scale * |diff| or scale * ||diff|| by kind."""
    if kind in (PValueKind.UPPER, PValueKind.LOWER):
        return scale * diff[..., 0]
    if kind is PValueKind.SYMMETRIC:
        return scale * np.abs(diff[..., 0])
    return scale * np.linalg.norm(diff, axis=-1)


def observed_statistic(theta_hat, theta0, n, kind):
    theta0 = np.asarray(theta0, dtype=float).reshape(-1)
    if theta0.size != theta_hat.size:
        raise SpecError(f"theta0 has length {theta0.size}, estimator has k={theta_hat.size}")
    return float(_scaled((theta_hat - theta0)[None, :], np.sqrt(n), kind)[0])


def exceedance_count(dist, observed, kind):
    """#{resampled values on the rejection-opposite side of ``observed``}."""
    if kind is PValueKind.LOWER:
        return int(np.searchsorted(dist.sorted_values, observed, side="right"))
    return count_at_least(dist.sorted_values, observed)


def subsample_stats(ts, spec, est, kind):
    """sqrt(l)(theta_j - theta_n) (or |.|, ||.||) over the N windows."""
    spec.check(ts)
    _check_kind(kind, est.k)
    theta_n = est.apply(ts.values)
    theta_j = est.apply(windows(ts.values, spec.l))
    return EmpiricalDist(_scaled(theta_j - theta_n, np.sqrt(spec.l), kind))


def subsample_pvalue(ts, spec, est, theta0, kind):
    dist = subsample_stats(ts, spec, est, kind)
    observed = observed_statistic(est.apply(ts.values), theta0, ts.n, kind)
    return Fraction(exceedance_count(dist, observed, kind), dist.count)


def _mbb_shape(spec):
    full = spec.n // spec.l
    return full, spec.n - full * spec.l


def mbb_indices(spec, seed, draws):
    """Index matrix (draws, n) of moving-block bootstrap samples.

    Draw i reads the i-th row of one uniform matrix from the Philox stream of ``seed``,
    so it does not depend on how many other draws are made.
    """
    full, rest = _mbb_shape(spec)
    rng = as_generator(seed)
    u = rng.random((int(draws), full + 1))
    starts = np.floor(u[:, :full] * spec.N).astype(np.int64)
    idx = (starts[:, :, None] + np.arange(spec.l)).reshape(int(draws), full * spec.l)
    if rest:
        extra = np.floor(u[:, full] * (spec.n - rest + 1)).astype(np.int64)
        idx = np.hstack([idx, extra[:, None] + np.arange(rest)])
    return idx


def mbb_resample(ts, spec, seed):
    """One MBB pseudo-series: ⌊n/l⌋ full blocks plus a leading fraction of one more."""
    spec.check(ts)
    return TimeSeries(ts.values[mbb_indices(spec, seed, 1)[0]])


def mbb_stats(ts, spec, est, kind, B=DEFAULT_BOOTSTRAP_REPS, seed=0):
    """sqrt(n)(theta*_n - theta_n) (or |.|, ||.||) over B bootstrap draws."""
    spec.check(ts)
    _check_kind(kind, est.k)
    if int(B) < 1:
        raise SpecError(f"B must be >= 1, got {B}")
    theta_n = est.apply(ts.values)
    theta_star = est.apply(ts.values[mbb_indices(spec, seed, B)])
    return EmpiricalDist(_scaled(theta_star - theta_n, np.sqrt(spec.n), kind))


def exact_mbb_pvalue(ts, spec, est, theta0, kind):
    """MBB p-value by enumerating every bootstrap sample (n <= 12).

    The estimators are symmetric in the sample, so the order of the full blocks does
    not matter: block multisets are enumerated with multinomial weights.
    """
    spec.check(ts)
    _check_kind(kind, est.k)
    if ts.n > MAX_EXACT_N:
        raise EnumerationError(f"exact enumeration is limited to n <= {MAX_EXACT_N}, got {ts.n}")
    full, rest = _mbb_shape(spec)
    x = ts.values
    theta_n = est.apply(x)
    observed = observed_statistic(theta_n, theta0, ts.n, kind)
    scale = np.sqrt(ts.n)
    extras = range(spec.n - rest + 1) if rest else [None]
    block = np.arange(spec.l)

    hits = 0
    combos = itertools.combinations_with_replacement(range(spec.N), full)
    while True:
        chunk = list(itertools.islice(combos, _ENUM_CHUNK))
        if not chunk:
            break
        starts = np.asarray(chunk, dtype=np.int64).reshape(len(chunk), full)
        weights = np.array([_multinomial(c) for c in chunk], dtype=object)
        base = (starts[:, :, None] + block).reshape(len(chunk), full * spec.l)
        for extra in extras:
            idx = base if extra is None else np.hstack(
                [base, np.broadcast_to(extra + np.arange(rest), (len(chunk), rest))]
            )
            values = _scaled(est.apply(x[idx]) - theta_n, scale, kind)
            if kind is PValueKind.LOWER:
                mask = observed >= values
            else:
                mask = observed <= values
            hits += int(weights[mask].sum()) if mask.any() else 0

    total = spec.N ** full * len(extras)
    return Fraction(hits, total)


def _multinomial(combo):
    out = math.factorial(len(combo))
    for c in Counter(combo).values():
        out //= math.factorial(c)
    return out


def mbb_pvalue(ts, spec, est, theta0, kind, B=DEFAULT_BOOTSTRAP_REPS, seed=0, exact=False):
    """E*[1{observed <= bootstrap analog}], by B draws or by exact enumeration."""
    if exact:
        return exact_mbb_pvalue(ts, spec, est, theta0, kind)
    dist = mbb_stats(ts, spec, est, kind, B, seed)
    observed = observed_statistic(est.apply(ts.values), theta0, ts.n, kind)
    return Fraction(exceedance_count(dist, observed, kind), dist.count)


def pvalue_uniformity(pvalues):
    """Sup distance between the p-value ECDF and U(0, 1).

    A diagnostic only: a large value is logged, never raised.
    """
    p = np.sort(np.asarray([float(v) for v in pvalues]))
    if p.size == 0:
        raise ValueError("no p-values given")
    upper = np.arange(1, p.size + 1) / p.size - p
    lower = p - np.arange(p.size) / p.size
    distance = float(max(upper.max(), lower.max()))
    if distance > 1.36 / math.sqrt(p.size):
        logger.warning("⚠️  p-values look non-uniform: KS distance %.4f over %d values", distance, p.size)
    return distance


def _limit_kind(method, shape):
    symmetric = shape is Shape.SYMMETRIC
    if method.is_mbb:
        return LimitKind.HTILDE if symmetric else LimitKind.H
    return LimitKind.GTILDE if symmetric else LimitKind.G


def interval_level(alpha, b, method, calibration, shape, table=None):
    """The level a used in the quantile calls (per tail for EQUAL_TAILED)."""
    alpha = to_level(alpha)
    if not 0 < alpha < 1:
        raise SpecError(f"alpha must be in (0, 1), got {float(alpha)}")
    nominal = alpha / 2 if shape is Shape.EQUAL_TAILED else alpha
    if calibration is Calibration.SMALL_B:
        return nominal
    return to_level(cv_lookup(_limit_kind(method, shape), nominal, b, table))


def build_ci(ts, spec, est, alpha, method=Method(), calibration=Calibration.SMALL_B,
             shape=Shape.SYMMETRIC, table=None):
    """Small-b or fixed-b calibrated confidence interval for a scalar parameter.

    ``table`` overrides the shipped critical-value table for FIXED_B.
    """
    if est.k != 1:
        raise SpecError(f"confidence intervals need a scalar estimator, got k={est.k}")
    spec.check(ts)
    level = interval_level(alpha, float(spec.b), method, calibration, shape, table)
    kind = PValueKind.SYMMETRIC if shape is Shape.SYMMETRIC else PValueKind.UPPER
    if method.is_mbb:
        dist = mbb_stats(ts, spec, est, kind, method.B, method.seed)
    else:
        dist = subsample_stats(ts, spec, est, kind)

    theta = float(est.apply(ts.values)[0])
    root_n = math.sqrt(ts.n)
    upper_q = float(empirical_quantile(dist, 1 - level))
    lower_q = -math.inf
    if shape is Shape.SYMMETRIC:
        lo, hi = theta - upper_q / root_n, theta + upper_q / root_n
    elif shape is Shape.ONE_SIDED_UPPER:
        lo, hi = theta - upper_q / root_n, math.inf
    elif shape is Shape.ONE_SIDED_LOWER:
        lower_q, upper_q = float(empirical_quantile(dist, level)), math.inf
        lo, hi = -math.inf, theta - lower_q / root_n
    else:
        lower_q = float(empirical_quantile(dist, level))
        lo, hi = theta - upper_q / root_n, theta - lower_q / root_n
    return Interval(lo, hi, level, shape, theta, root_n, lower_q, upper_q)
