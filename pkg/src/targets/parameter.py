import numpy as np

from ..estimators import Estimator, windows
from ..exceptions import SpecError
from .base_target import BaseTarget, TargetKind


class ParameterTarget(BaseTarget):
    """A k-vector of point statistics; confidence sets are Euclidean balls."""

    kind = TargetKind.REGION

    def __init__(self, est: Estimator = None):
        if est is None:
            raise SpecError("a region target needs an estimator")
        self.est = est
        super().__init__(f"region[{est.label}]")

    def window_values(self, values, length, grid):
        return self.est.apply(windows(values, length))

    def full_value(self, ts, grid):
        return self.est.apply(ts.values)

    def distance(self, diff):
        return np.linalg.norm(diff, axis=-1)

    def candidate_values(self, candidate, grid):
        values = np.asarray(candidate, dtype=float).reshape(-1)
        if values.size != self.est.k:
            raise SpecError(f"theta has length {values.size}, estimator has k={self.est.k}")
        return values
