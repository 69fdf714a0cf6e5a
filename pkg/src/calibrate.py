"""
Double subsampling: calibrated confidence regions and bands.

A first-stage subsampling p-value is computed on every length-n' subsample (its
"second-stage" replicate), and the empirical law of those replicates gives the
calibrated threshold c(alpha) that replaces the nominal alpha. Regions and bands are
obtained by exact inversion of the nonincreasing step-function p-value.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .empirical import EmpiricalDist, ecdf_sup_distance, order_index, to_level, upper_order_statistic
from .estimators import StepFunction
from .exceptions import CalibrationError, SpecError
from .resampling import BlockSpec
from .targets import BaseTarget, TargetKind, resolve_target

logger = logging.getLogger(__name__)

DEFAULT_REGION_NPRIME = 15
DEFAULT_BAND_NPRIME = 30


@dataclass(frozen=True)
class SecondStageSpec:
    """Subsample length n' with its inner window length l' and the shared b = l/n."""

    n_prime: int
    l_prime: int
    b: Fraction

    def __post_init__(self):
        if self.n_prime < 1 or self.l_prime < 1:
            raise SpecError("n' and l' must be positive")
        if self.l_prime > self.n_prime:
            raise SpecError(f"l' = {self.l_prime} exceeds n' = {self.n_prime}")

    @property
    def N_prime(self):
        return self.n_prime - self.l_prime + 1

    @classmethod
    def for_target(cls, n_prime, b, target=TargetKind.REGION):
        """l' = ⌈n' b⌉, and at least 2 for the spectral target."""
        n_prime = int(n_prime)
        b = to_level(b)
        l_prime = math.ceil(n_prime * b)
        if TargetKind.parse(getattr(target, "kind", target)) is TargetKind.SPEC_BAND:
            l_prime = max(l_prime, 2)
        return cls(n_prime, l_prime, b)

    def check(self, n):
        if self.n_prime >= n:
            raise SpecError(f"n' must be smaller than n, got n'={self.n_prime}, n={n}")
        return self


@dataclass(frozen=True)
class CalibratedSet:
    """Closed ball (region) or sup-norm tube (band) around the full-sample estimate.

    Membership is decided by the defining inequality p-value >= threshold, computed
    with the same arithmetic as the first-stage p-value; ``radius`` is reported for
    sizes only.
    """

    target: BaseTarget
    center: object
    radius: float
    threshold: Fraction
    alpha: Fraction
    stats: EmpiricalDist
    n: int
    grid: np.ndarray = None

    @property
    def kind(self):
        return self.target.kind

    @property
    def width(self):
        return 2 * self.radius

    def _center_values(self):
        if isinstance(self.center, StepFunction):
            return self.center.values
        return np.asarray(self.center, dtype=float)

    def pvalue_at(self, distance):
        observed = float(np.sqrt(self.n) * distance)
        return self.stats.exceedance(observed)

    def covers_distance(self, distance):
        return self.pvalue_at(distance) >= self.threshold

    def distance_to(self, candidate):
        values = self.target.candidate_values(candidate, self.grid)
        return float(self.target.distance(self._center_values() - values))

    def contains(self, candidate):
        return self.covers_distance(self.distance_to(candidate))

    def __contains__(self, candidate):
        return self.contains(candidate)


def _inputs(ts, spec, target, est):
    target = resolve_target(target, est)
    spec.check(ts)
    target.check_length(spec.l)
    return target, target.grid(ts)


def second_stage_pvalues(ts, spec, s2, target, est=None):
    """First-stage p-values recomputed on each of the n - n' + 1 subsamples.

    Inside subsample t the inner windows of length l' are the global windows
    t..t+N'-1, so every window statistic is computed once per length.
    """
    target, grid = _inputs(ts, spec, target, est)
    s2.check(ts.n)
    target.check_length(s2.l_prime)
    x = ts.values
    full = target.full_value(ts, grid)
    outer = target.window_values(x, s2.n_prime, grid)
    inner = target.window_values(x, s2.l_prime, grid)
    count = s2.N_prime
    root_n, root_l = np.sqrt(s2.n_prime), np.sqrt(s2.l_prime)

    out = []
    for t in range(outer.shape[0]):
        observed = root_n * target.distance(outer[t] - full)
        stats = root_l * target.distance(inner[t:t + count] - outer[t])
        out.append(Fraction(int(np.count_nonzero(stats >= observed)), count))
    return out


def calibrated_threshold(values, alpha):
    """⌈alpha·count⌉-th order statistic of the second-stage p-values."""
    alpha = to_level(alpha)
    if not 0 < alpha < 1:
        raise SpecError(f"alpha must be in (0, 1), got {float(alpha)}")
    values = sorted(Fraction(v) for v in values)
    if not values:
        raise ValueError("no second-stage p-values given")
    return values[order_index(alpha, len(values)) - 1]


def first_stage_pvalue(ts, spec, target, candidate, est=None):
    """#{sqrt(l) d(window, full) >= sqrt(n) d(full, candidate)} / N."""
    target, grid = _inputs(ts, spec, target, est)
    stats = target.first_stage_stats(ts, spec, grid)
    center = target.full_value(ts, grid)
    distance = float(target.distance(center - target.candidate_values(candidate, grid)))
    return stats.exceedance(float(np.sqrt(ts.n) * distance))


def _build_set(ts, spec, target, grid, threshold, alpha):
    stats = target.first_stage_stats(ts, spec, grid)
    center = target.full_value(ts, grid)
    if grid is not None:
        center = StepFunction(grid, center)
    radius = upper_order_statistic(stats, threshold) / math.sqrt(ts.n)
    logger.debug("%s: threshold %s, radius %.6g", target.name, threshold, radius)
    return CalibratedSet(target, center, radius, to_level(threshold), to_level(alpha), stats, ts.n, grid)


def _calibrated(ts, spec, target, alpha, s2, est):
    target, grid = _inputs(ts, spec, target, est)
    if s2 is None:
        n_prime = DEFAULT_REGION_NPRIME if target.kind is TargetKind.REGION else DEFAULT_BAND_NPRIME
        s2 = SecondStageSpec.for_target(n_prime, spec.b, target)
    threshold = calibrated_threshold(second_stage_pvalues(ts, spec, s2, target), alpha)
    return _build_set(ts, spec, target, grid, threshold, alpha)


def calibrated_region(ts, spec, est, alpha, s2=None):
    """Ball {theta : p-value(theta) >= c(alpha)} around theta_hat."""
    return _calibrated(ts, spec, TargetKind.REGION, alpha, s2, est)


def traditional_region(ts, spec, est, alpha):
    target, grid = _inputs(ts, spec, TargetKind.REGION, est)
    return _build_set(ts, spec, target, grid, to_level(alpha), alpha)


def calibrated_band(ts, spec, alpha, s2=None, target=TargetKind.CDF_BAND):
    if resolve_target(target).kind is TargetKind.REGION:
        raise SpecError("calibrated_band needs a CDF or spectral target")
    return _calibrated(ts, spec, target, alpha, s2, None)


def traditional_band(ts, spec, alpha, target=TargetKind.CDF_BAND):
    target, grid = _inputs(ts, spec, target, None)
    if target.kind is TargetKind.REGION:
        raise SpecError("traditional_band needs a CDF or spectral target")
    return _build_set(ts, spec, target, grid, to_level(alpha), alpha)


@dataclass(frozen=True)
class BlockSizeSelection:
    n_prime: int
    candidates: tuple
    distances: tuple
    j0: int


def bickel_sakov_candidates(K1, K2, g):
    """n_j = ⌊g^(j-1) K2⌋ for j = 1..J+1, J = ⌊log(K2/K1)/(-log g)⌋."""
    if not 0 < g < 1:
        raise SpecError(f"g must be in (0, 1), got {g}")
    if not 0 < K1 < K2:
        raise SpecError(f"need 0 < K1 < K2, got K1={K1}, K2={K2}")
    steps = math.floor(math.log(K2 / K1) / -math.log(g) + 1e-12)
    if steps < 1:
        raise CalibrationError(
            f"K1={K1}, K2={K2}, g={g} give fewer than 2 candidate windows"
        )
    return tuple(math.floor(g ** (j - 1) * K2 + 1e-9) for j in range(1, steps + 2))


def bickel_sakov_select(ts, b, K1, K2, g, target, est=None):
    """Pick n' where consecutive second-stage p-value laws are closest.

    Ties go to the smallest j (largest window). The chosen window is ⌊g^j0 K2⌋, i.e.
    the next candidate after n_j0.
    """
    target = resolve_target(target, est)
    if K2 >= ts.n:
        raise SpecError(f"K2 must be smaller than n, got K2={K2}, n={ts.n}")
    spec = BlockSpec.from_fraction(ts.n, b)
    candidates = bickel_sakov_candidates(K1, K2, g)
    laws = [
        [float(p) for p in second_stage_pvalues(
            ts, spec, SecondStageSpec.for_target(n_j, spec.b, target), target)]
        for n_j in candidates
    ]
    distances = tuple(ecdf_sup_distance(a, c) for a, c in zip(laws, laws[1:]))
    j0 = 1 + min(range(len(distances)), key=lambda i: (distances[i], i))
    n_prime = candidates[j0]
    logger.info("Selected n' = %d from %s (j0 = %d)", n_prime, candidates, j0)
    return BlockSizeSelection(n_prime, candidates, distances, j0)
