import numpy as np

from ..estimators import fourier_grid, spectral_matrix
from ..exceptions import EstimationError
from .base_target import BaseTarget, TargetKind

# sup-distance between two normalized spectral distributions never exceeds 1
UNDEFINED_DISTANCE = 1.0


class SpectralTarget(BaseTarget):
    """Normalized spectral distribution F~(λ) = F(λ)/F(π) on the full-sample Fourier grid.

    A window whose values are all equal has no normalized spectral distribution; its
    row is NaN and it sits at the maximal distance from everything. The full sample
    itself must not be constant.
    """

    kind = TargetKind.SPEC_BAND
    min_length = 2

    def __init__(self, method="direct"):
        self.method = method
        super().__init__()

    def grid(self, ts):
        return fourier_grid(ts.n)

    def _n_full(self, grid):
        # grid is 2πs/n for s = 1..⌊n/2⌋
        return int(round(2 * np.pi / grid[0]))

    def window_values(self, values, length, grid):
        return spectral_matrix(values, length, self._n_full(grid), normalized=True, method=self.method,
                               flat="nan")

    def full_value(self, ts, grid):
        value = super().full_value(ts, grid)
        if np.isnan(value).any():
            raise EstimationError("normalized spectral distribution undefined: the series is constant")
        return value

    def distance(self, diff):
        diff = np.asarray(diff, dtype=float)
        undefined = np.isnan(diff).any(axis=-1)
        return np.where(undefined, UNDEFINED_DISTANCE, np.max(np.abs(np.nan_to_num(diff)), axis=-1))
