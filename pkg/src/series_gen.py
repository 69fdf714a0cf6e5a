"""
Synthetic stationary series for the coverage experiments.

Models:
    ARMA11          X_t = mu + u_t,  u_t = rho u_{t-1} + e_t + theta e_{t-1}
    NONLINEAR_SINE  X_t = 0.6 sin(X_{t-1}) + e_t
    TAR1            X_t = 0.3 X_{t-1} 1(X_{t-1} > 0) + 0.8 X_{t-1} 1(X_{t-1} <= 0) + e_t

Innovations are N(0, 1) or EXP(1) - 1. Recursions start at zero and run through a
burn-in of ``BURN_IN`` steps that is discarded.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import SpecError
from .streams import as_generator

logger = logging.getLogger(__name__)

BURN_IN = 1000


class Family(enum.Enum):
    ARMA11 = "arma11"
    NONLINEAR_SINE = "nonlinear_sine"
    TAR1 = "tar1"


class ErrorDist(enum.Enum):
    GAUSSIAN = "gaussian"
    CENTERED_EXPONENTIAL = "centered_exponential"


@dataclass(frozen=True)
class ModelSpec:
    family: Family = Family.ARMA11
    rho: float = 0.0
    theta: float = 0.0
    mu: float = 0.0
    err_dist: ErrorDist = ErrorDist.GAUSSIAN

    def validate(self):
        if not isinstance(self.family, Family):
            raise SpecError(f"unknown model family: {self.family!r}")
        if not isinstance(self.err_dist, ErrorDist):
            raise SpecError(f"unknown error distribution: {self.err_dist!r}")
        for name in ("rho", "theta", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise SpecError(f"{name} must be finite")
        if self.family is Family.ARMA11 and abs(self.rho) >= 1:
            raise SpecError(f"ARMA11 needs |rho| < 1 for stationarity, got rho={self.rho}")
        return self

    @property
    def label(self):
        if self.family is Family.ARMA11:
            return "arma11"
        return self.family.value


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations; n >= 2, all finite."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 2:
            raise SpecError(f"a time series needs n >= 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise SpecError("time series values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return int(self.values.size)

    def __len__(self):
        return self.n

    @classmethod
    def from_file(cls, path):
        """Read one real per line; blank lines and ``#`` comments are ignored."""
        values = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise SpecError(f"{path}:{lineno}: not a number: {text!r}") from None
        return cls(np.asarray(values))


def draw_innovations(err_dist, size, rng):
    if err_dist is ErrorDist.GAUSSIAN:
        return rng.standard_normal(size)
    return rng.standard_exponential(size) - 1.0


def _innovations(spec, n, seed):
    rng = as_generator(seed)
    return draw_innovations(spec.err_dist, BURN_IN + n, rng)


def innovation_stream(spec, n, seed):
    """The n innovations aligned with the emitted observations of ``gen_series``."""
    return _innovations(spec.validate(), n, seed)[BURN_IN:]


def _arma11(eps, rho, theta):
    # u_t = rho u_{t-1} + e_t + theta e_{t-1} with u_0 = e_0 = 0
    return lfilter([1.0, theta], [1.0, -rho], eps)


def _nonlinear_sine(eps):
    out = np.empty_like(eps)
    prev = 0.0
    for i, e in enumerate(eps.tolist()):
        prev = 0.6 * math.sin(prev) + e
        out[i] = prev
    return out


def _tar1(eps):
    out = np.empty_like(eps)
    prev = 0.0
    for i, e in enumerate(eps.tolist()):
        prev = (0.3 if prev > 0 else 0.8) * prev + e
        out[i] = prev
    return out


def simulate_path(spec, eps):
    """Run the model recursion over a full innovation array (burn-in included)."""
    if spec.family is Family.ARMA11:
        return spec.mu + _arma11(eps, spec.rho, spec.theta)
    if spec.family is Family.NONLINEAR_SINE:
        return _nonlinear_sine(eps)
    return _tar1(eps)


def gen_series(spec, n, seed):
    """Generate n observations of ``spec``; deterministic in (spec, n, seed)."""
    spec.validate()
    if int(n) < 2:
        raise SpecError(f"n must be >= 2, got {n}")
    n = int(n)
    path = simulate_path(spec, _innovations(spec, n, seed))
    return TimeSeries(path[BURN_IN:])
