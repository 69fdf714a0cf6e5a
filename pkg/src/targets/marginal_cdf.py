import numpy as np

from ..estimators import ecdf_matrix
from .base_target import BaseTarget, TargetKind


class MarginalCdfTarget(BaseTarget):
    """Marginal distribution function m(s) = P(X <= s).

    Every empirical CDF involved jumps only at data points, so sup-norms taken over the
    distinct values of the full sample are exact.
    """

    kind = TargetKind.CDF_BAND

    def grid(self, ts):
        return np.unique(ts.values)

    def window_values(self, values, length, grid):
        return ecdf_matrix(values, length, grid)

    def distance(self, diff):
        return np.max(np.abs(diff), axis=-1)
