"""
Statistics computed on contiguous segments of a series.

Segments are addressed Python style: ``start`` is 0-based and the segment is
``values[start:start + length]``. Every function also has a batch form over all
windows of one length, which the resampling engines use.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.stats import trim_mean

from .empirical import to_level
from .exceptions import EstimationError, SegmentError, SpecError


class Stat(enum.Enum):
    MEAN = "mean"
    TRIMMED_MEAN = "trimmed_mean"
    MEDIAN = "median"


@dataclass(frozen=True)
class Component:
    kind: Stat
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind is Stat.TRIMMED_MEAN and not 0 <= self.gamma < 0.5:
            raise SpecError(f"trimming proportion must be in [0, 0.5), got {self.gamma}")

    @property
    def label(self):
        if self.kind is Stat.TRIMMED_MEAN:
            return f"trimmed_mean:{self.gamma:g}"
        return self.kind.value

    def apply(self, windows):
        if self.kind is Stat.MEAN:
            return np.mean(windows, axis=-1)
        if self.kind is Stat.MEDIAN:
            return np.median(windows, axis=-1)
        length = windows.shape[-1]
        cut = math.floor(to_level(self.gamma) * length)
        # scipy truncates proportion*length; offsetting by half an observation makes
        # that truncation land on the exact per-tail count
        return trim_mean(windows, (cut + 0.5) / length, axis=-1)


@dataclass(frozen=True)
class Estimator:
    """A vector of point statistics, k = len(components)."""

    components: tuple

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise SpecError("an estimator needs at least one component")
        object.__setattr__(self, "components", components)

    @property
    def k(self):
        return len(self.components)

    @property
    def label(self):
        return ",".join(c.label for c in self.components)

    @classmethod
    def mean(cls):
        return cls((Component(Stat.MEAN),))

    @classmethod
    def median(cls):
        return cls((Component(Stat.MEDIAN),))

    @classmethod
    def trimmed_mean(cls, gamma=0.25):
        return cls((Component(Stat.TRIMMED_MEAN, gamma),))

    @classmethod
    def parse(cls, text):
        """Parse ``"mean,median"`` or ``"trimmed_mean:0.25"``."""
        components = []
        for token in text.split(","):
            name, _, arg = token.strip().lower().partition(":")
            try:
                kind = Stat(name.replace("-", "_"))
            except ValueError:
                raise SpecError(f"unknown statistic: {token.strip()!r}") from None
            gamma = float(arg) if arg else (0.25 if kind is Stat.TRIMMED_MEAN else 0.0)
            components.append(Component(kind, gamma))
        return cls(tuple(components))

    def apply(self, windows):
        """Evaluate on the last axis of ``windows``; returns shape (..., k)."""
        windows = np.asarray(windows, dtype=float)
        return np.stack([c.apply(windows) for c in self.components], axis=-1)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function: value ``values[i]`` on [grid[i], grid[i+1])."""

    grid: np.ndarray
    values: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if grid.shape != values.shape:
            raise ValueError("grid and values must have the same length")
        if grid.size > 1 and np.any(np.diff(grid) < 0):
            raise ValueError("grid must be sorted")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        idx = np.searchsorted(self.grid, points, side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], self.floor)
        return out


def _segment(ts, start, length):
    start, length = int(start), int(length)
    if length < 1 or start < 0 or start + length > ts.n:
        raise SegmentError(
            f"segment start={start}, length={length} does not fit a series of length {ts.n}"
        )
    return ts.values[start:start + length]


def windows(values, length):
    """All contiguous windows of ``length``, shape (n - length + 1, length)."""
    return sliding_window_view(np.asarray(values, dtype=float), int(length))


def point_estimate(ts, start, length, est):
    return est.apply(_segment(ts, start, length))


def ecdf(ts, start, length, grid):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    seg = np.sort(_segment(ts, start, length))
    return StepFunction(grid, np.searchsorted(seg, grid, side="right") / seg.size)


def ecdf_matrix(values, length, grid):
    """ECDFs of every length-``length`` window evaluated on ``grid``."""
    values = np.asarray(values, dtype=float)
    below = (values[:, None] <= np.asarray(grid, dtype=float)[None, :]).astype(np.int64)
    cum = np.vstack([np.zeros((1, below.shape[1]), dtype=np.int64), np.cumsum(below, axis=0)])
    return (cum[length:] - cum[:-length]) / length


def fourier_grid(length):
    """Fourier frequencies 2πs/length, s = 1..⌊length/2⌋."""
    return 2 * np.pi * np.arange(1, length // 2 + 1) / length


def _centered(block):
    centered = block - block.mean(axis=-1, keepdims=True)
    centered[np.ptp(block, axis=-1) == 0] = 0.0
    return centered


def periodogram_matrix(block, method="direct"):
    """Periodogram of each row of ``block`` at its Fourier frequencies."""
    block = np.atleast_2d(np.asarray(block, dtype=float))
    length = block.shape[-1]
    if length < 2:
        raise EstimationError("the periodogram needs a segment of length >= 2")
    centered = _centered(block)
    half = length // 2
    if method == "direct":
        phase = np.exp(1j * np.outer(np.arange(1, length + 1), fourier_grid(length)))
        dft = centered @ phase
    elif method == "fft":
        dft = np.fft.fft(centered, axis=-1)[:, 1:half + 1]
    else:
        raise ValueError(f"unknown periodogram method: {method!r}")
    return np.abs(dft) ** 2 / (2 * np.pi * length)


def periodogram(ts, start, length, method="direct"):
    seg = _segment(ts, start, length)
    if seg.size < 2:
        raise EstimationError("the periodogram needs a segment of length >= 2")
    return StepFunction(fourier_grid(seg.size), periodogram_matrix(seg, method)[0])


def _cumulative_spectrum(block, method):
    length = block.shape[-1]
    return 2 * np.pi / length * np.cumsum(periodogram_matrix(block, method), axis=-1)


def _normalize(spectra, block, flat="raise"):
    """Divide by F(pi); a zero-energy row raises, or becomes NaN with ``flat="nan"``."""
    zero = np.ptp(block, axis=-1) == 0
    if not np.any(zero):
        return spectra / spectra[:, -1:]
    if flat == "raise":
        raise EstimationError("normalized spectral distribution undefined: F(pi) = 0")
    total = spectra[:, -1:].copy()
    total[zero] = np.nan
    return spectra / total


def spectral_distribution(ts, start, length, normalized, method="direct"):
    seg = _segment(ts, start, length)
    if seg.size < 2:
        raise EstimationError("the spectral distribution needs a segment of length >= 2")
    block = seg[None, :]
    spectra = _cumulative_spectrum(block, method)
    if normalized:
        spectra = _normalize(spectra, block)
    return StepFunction(fourier_grid(seg.size), spectra[0])


def spectral_matrix(values, length, n_full, normalized=True, method="direct", flat="raise"):
    """Spectral distributions of every window, stepped onto the grid 2πs/n_full.

    A window of length L contributes its own frequency 2πs/L at every full-grid point
    2πs'/n_full with s·n_full <= s'·L, compared in integers. With ``flat="nan"`` a
    zero-energy window gives a row of NaN instead of raising.
    """
    block = windows(values, length)
    spectra = _cumulative_spectrum(block, method)
    if normalized:
        spectra = _normalize(spectra, block, flat)
    full = np.arange(1, n_full // 2 + 1)
    own = np.minimum(spectra.shape[1], (full * length) // n_full)
    padded = np.hstack([np.zeros((spectra.shape[0], 1)), spectra])
    out = padded[:, own]
    out[np.isnan(spectra).any(axis=-1)] = np.nan
    return out


def sup_distance(f, g, grid):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    return float(np.max(np.abs(f(grid) - g(grid))))
