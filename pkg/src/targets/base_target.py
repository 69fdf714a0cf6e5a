import abc
import enum

import numpy as np

from ..empirical import EmpiricalDist
from ..exceptions import SpecError


class TargetKind(enum.Enum):
    REGION = "region"
    CDF_BAND = "cdf-band"
    SPEC_BAND = "spec-band"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == text:
                return kind
        raise SpecError(f"unknown target: {value!r}")


class BaseTarget(abc.ABC):
    """A parameter (vector or function) estimated on every window of a series.

    Window values are vectors on a common evaluation grid, so a whole window length
    is one (count, d) array and distances reduce over the last axis.
    """

    kind = None
    min_length = 1

    def __init__(self, name: str = None):
        self.name = name or self.kind.value

    def grid(self, ts):
        return None

    @abc.abstractmethod
    def window_values(self, values, length, grid):
        """Values on ``grid`` for every window of ``length``; shape (count, d)."""

    def full_value(self, ts, grid):
        return self.window_values(ts.values, ts.n, grid)[0]

    @abc.abstractmethod
    def distance(self, diff):
        pass

    def candidate_values(self, candidate, grid):
        if callable(candidate):
            candidate = candidate(grid)
        values = np.asarray(candidate, dtype=float).reshape(-1)
        expected = grid.size if grid is not None else values.size
        if values.size != expected:
            raise SpecError(f"candidate has {values.size} values, the evaluation grid has {expected}")
        return values

    def check_length(self, length):
        if length < self.min_length:
            raise SpecError(f"{self.name} needs windows of length >= {self.min_length}, got {length}")

    def first_stage_stats(self, ts, spec, grid):
        """sqrt(l) * distance(window value - full value) over the N windows."""
        spec.check(ts)
        self.check_length(spec.l)
        diff = self.window_values(ts.values, spec.l, grid) - self.full_value(ts, grid)
        return EmpiricalDist(np.sqrt(spec.l) * self.distance(diff))
