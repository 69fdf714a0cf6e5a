"""
Empirical distributions of resampled statistics.

Levels and p-values are kept as exact rationals so that a quantile at level q and the
test "p-value >= q" are two readings of the same inequality.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def to_level(x):
    """Interpret a level as an exact rational.

    Floats are read through their shortest decimal repr, so ``0.1`` is ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


def order_index(q, count):
    """The 1-based order statistic ⌈q·count⌉ for q in (0, 1]."""
    q = to_level(q)
    if not 0 < q <= 1:
        raise ValueError(f"quantile level must be in (0, 1], got {float(q)}")
    return min(max(math.ceil(q * count), 1), count)


def count_at_least(sorted_values, x):
    """#{v : v >= x} for an ascending array."""
    return len(sorted_values) - int(np.searchsorted(sorted_values, x, side="left"))


@dataclass(frozen=True)
class EmpiricalDist:
    """A finite multiset of statistic values."""

    values: np.ndarray
    sorted_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise ValueError("an empirical distribution needs at least one value")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sorted_values", np.sort(values))

    @property
    def count(self):
        return int(self.values.size)

    def cdf(self, x):
        """L(x) = #{v <= x} / count."""
        return Fraction(int(np.searchsorted(self.sorted_values, x, side="right")), self.count)

    def exceedance(self, x):
        """#{v >= x} / count: the closed upper-tail fraction used by every p-value."""
        return Fraction(count_at_least(self.sorted_values, x), self.count)

    def quantile(self, q):
        return empirical_quantile(self, q)


def empirical_quantile(dist, q):
    """inf{x : L(x) >= q}, i.e. the ⌈q·count⌉-th order statistic."""
    return float(dist.sorted_values[order_index(q, dist.count) - 1])


def upper_order_statistic(dist, threshold):
    """Largest x with #{v >= x}/count >= threshold.

    Returns ``inf`` for a nonpositive threshold (every x qualifies) and ``-inf`` when
    no value qualifies.
    """
    threshold = to_level(threshold)
    if threshold <= 0:
        return math.inf
    k = math.ceil(threshold * dist.count)
    if k > dist.count:
        return -math.inf
    return float(dist.sorted_values[dist.count - k])


def ecdf_sup_distance(a, b):
    """sup_x |F_a(x) - F_b(x)| for two samples, evaluated on the union of their atoms."""
    a = np.sort(np.asarray(a, dtype=float).reshape(-1))
    b = np.sort(np.asarray(b, dtype=float).reshape(-1))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    atoms = np.union1d(a, b)
    fa = np.searchsorted(a, atoms, side="right") / a.size
    fb = np.searchsorted(b, atoms, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
