"""
Fixed-b limiting null distributions of subsampling and MBB p-values.

    G(b)      = (1-b)^-1 ∫ 1[W(1) <= {W(b+t)-W(t)-bW(1)}/√b] dt
    G~(b)     = same with absolute values
    G~(b; k)  = same with Euclidean norms of Σ^{1/2} W_k
    H(b)      = (1-b)^-R ∫...∫ 1[Σ_h {W(t_h+b)-W(t_h)} >= 2W(1)] dt_1..dt_R,  R = 1/b
    H~(b)     = same with |Σ_h {..} - W(1)| >= |W(1)|

Brownian motion is approximated by normalized partial sums of ``grid_n`` iid normals.
The t-integral of G is a deterministic average over the path grid; the R-fold integral
of H is estimated with ``boot_draws`` uniform draws of (t_1..t_R) from the same grid.
Path i always uses substream (seed, PATH_STREAM, i).
"""

import enum
import functools
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from .empirical import order_index, to_level
from .exceptions import CalibrationError, SpecError, TableDomainError
from .streams import PATH_STREAM, chunk_ranges, parallel_map, substream

logger = logging.getLogger(__name__)

DEFAULT_TABLE = Path(__file__).with_name("cv_table.csv")
TABLE_COLUMNS = ["kind", "alpha", "a0", "a1", "a2", "r2"]
TABLE_B_MAX = 0.2
PAPER_B_GRID = tuple(round(0.01 * i, 2) for i in range(1, 21))


class LimitKind(enum.Enum):
    G = "G"
    GTILDE = "Gtilde"
    H = "H"
    HTILDE = "Htilde"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).strip().lower():
                return kind
        raise SpecError(f"unknown limit kind: {value!r}")


@dataclass(frozen=True)
class LimitSimConfig:
    paths: int = 50_000
    grid_n: int = 5_000
    boot_draws: int = 50_000
    seed: int = 0
    workers: int = 1
    chunk: int = 250

    def validate(self):
        for name in ("paths", "grid_n", "boot_draws", "chunk"):
            if getattr(self, name) < 1:
                raise SpecError(f"{name} must be positive")
        return self

    def scaled(self, **changes):
        return replace(self, **changes)


PAPER_SCALE = LimitSimConfig()
DESK_SCALE = LimitSimConfig(paths=10_000, grid_n=2_000, boot_draws=10_000)


@dataclass(frozen=True)
class BrownianPath:
    """W(i/grid_n), i = 0..grid_n, for k coordinates; shape (grid_n + 1, k)."""

    grid_n: int
    values: np.ndarray

    @classmethod
    def simulate(cls, grid_n, k, rng):
        z = rng.standard_normal((grid_n, k))
        values = np.vstack([np.zeros((1, k)), np.cumsum(z, axis=0)]) / math.sqrt(grid_n)
        return cls(grid_n, values)

    @property
    def end(self):
        return self.values[-1]


@dataclass(frozen=True)
class CvFit:
    """cv(b) = a0 + a1 b + a2 b^2 with a0 = alpha."""

    kind: LimitKind
    alpha: float
    a0: float
    a1: float
    a2: float
    r2: float

    def __call__(self, b):
        return self.a0 + self.a1 * b + self.a2 * b * b

    def as_row(self):
        return {
            "kind": self.kind.value if self.kind else "",
            "alpha": self.alpha,
            "a0": self.a0,
            "a1": self.a1,
            "a2": self.a2,
            "r2": self.r2,
        }


def _lag(b, grid_n):
    b = float(b)
    if not 0 < b < 1:
        raise SpecError(f"b must be in (0, 1), got {b}")
    lag = int(round(b * grid_n))
    if lag < 1 or lag >= grid_n:
        raise SpecError(f"b * grid_n must be at least 1, got b={b}, grid_n={grid_n}")
    return lag


def blocks_per_sample(b):
    """R_b = 1/b, which must be an integer for the MBB limits."""
    b = float(b)
    if not 0 < b < 1:
        raise SpecError(f"b must be in (0, 1), got {b}")
    r = round(1 / b)
    if abs(1 / b - r) > 1e-9:
        raise SpecError(f"the MBB limit needs 1/b to be an integer, got b={b}")
    return int(r)


def _factor(sigma):
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape[0] != sigma.shape[1] or not np.allclose(sigma, sigma.T):
        raise SpecError("sigma must be a symmetric square matrix")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise SpecError("sigma must be positive definite") from None


def _path_block(seed, start, stop, grid_n, k):
    """Brownian paths start..stop-1 stacked: shape (stop - start, grid_n + 1, k)."""
    return np.stack([
        BrownianPath.simulate(grid_n, k, substream(seed, PATH_STREAM, i)).values
        for i in range(start, stop)
    ])


def _subsample_limits(paths, lag, signed):
    """Per-path grid averages of the G indicator; ``paths`` is (P, grid_n + 1, k)."""
    grid_n = paths.shape[1] - 1
    beff = lag / grid_n
    end = paths[:, -1, :]
    spread = (paths[:, lag:, :] - paths[:, :-lag, :] - beff * end[:, None, :]) / math.sqrt(beff)
    if signed:
        return np.mean(end[:, None, 0] <= spread[:, :, 0], axis=1)
    lhs = np.linalg.norm(end, axis=-1)
    rhs = np.linalg.norm(spread, axis=-1)
    return np.mean(lhs[:, None] <= rhs, axis=1)


def _g_chunk(bounds, seed, grid_n, lags, factor):
    start, stop = bounds
    paths = _path_block(seed, start, stop, grid_n, factor.shape[0])
    if factor.shape[0] > 1 or factor[0, 0] != 1.0:
        paths = paths @ factor.T
    out = np.empty((len(lags), 2, stop - start))
    for i, lag in enumerate(lags):
        out[i, 0] = _subsample_limits(paths, lag, signed=True) if factor.shape[0] == 1 else np.nan
        out[i, 1] = _subsample_limits(paths, lag, signed=False)
    return out


def _simulate_subsampling(b_values, cfg, sigma=None):
    cfg.validate()
    lags = [_lag(b, cfg.grid_n) for b in b_values]
    factor = np.ones((1, 1)) if sigma is None else _factor(sigma)
    task = functools.partial(_g_chunk, seed=cfg.seed, grid_n=cfg.grid_n, lags=lags, factor=factor)
    parts = parallel_map(task, chunk_ranges(cfg.paths, cfg.chunk), cfg.workers)
    return np.concatenate(parts, axis=2)


def simulate_G_grid(b_values, cfg):
    """{(kind, b): per-path realizations} for G and G~, sharing paths across b."""
    sims = _simulate_subsampling(b_values, cfg)
    out = {}
    for i, b in enumerate(b_values):
        out[(LimitKind.G, b)] = sims[i, 0]
        out[(LimitKind.GTILDE, b)] = sims[i, 1]
    return out


def simulate_G_sample(b, kind, cfg):
    kind = LimitKind.parse(kind)
    if kind not in (LimitKind.G, LimitKind.GTILDE):
        raise SpecError(f"simulate_G handles G and Gtilde, got {kind.value}")
    return simulate_G_grid([b], cfg)[(kind, b)]


def path_quantile(values, alpha):
    """Empirical alpha-quantile over paths (⌈alpha·paths⌉-th order statistic)."""
    values = np.sort(np.asarray(values, dtype=float))
    return float(values[order_index(alpha, values.size) - 1])


def simulate_G(b, alpha, kind, cfg):
    return path_quantile(simulate_G_sample(b, kind, cfg), alpha)


def simulate_Gk_sample(b, k, sigma, cfg):
    """Realizations of G~(b; k) with long-run covariance ``sigma``.

    Σ^{1/2} is taken as the lower Cholesky factor A (A Aᵀ = Σ); only norms of
    A·(Gaussian vector) enter, so any such factor gives the same law.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape != (int(k), int(k)):
        raise SpecError(f"sigma must be {k}x{k}, got {sigma.shape}")
    return _simulate_subsampling([b], cfg, sigma)[0, 1]


def _h_chunk(bounds, seed, grid_n, lag, blocks, boot_draws):
    start, stop = bounds
    out = np.empty((2, stop - start))
    draw_chunk = max(1, 2_000_000 // blocks)
    for j, i in enumerate(range(start, stop)):
        rng = substream(seed, PATH_STREAM, i)
        path = BrownianPath.simulate(grid_n, 1, rng).values[:, 0]
        end = path[-1]
        increments = path[lag:] - path[:-lag]
        hits_h = hits_ht = 0
        for lo, hi in chunk_ranges(boot_draws, draw_chunk):
            picks = rng.integers(0, increments.size, size=(hi - lo, blocks))
            total = increments[picks].sum(axis=1)
            hits_h += int(np.count_nonzero(total >= 2 * end))
            hits_ht += int(np.count_nonzero(np.abs(total - end) >= abs(end)))
        out[0, j] = hits_h / boot_draws
        out[1, j] = hits_ht / boot_draws
    return out


def simulate_H_pair(b, cfg):
    """Per-path realizations of (H(b), H~(b)) from shared paths and draws."""
    cfg.validate()
    blocks = blocks_per_sample(b)
    lag = _lag(b, cfg.grid_n)
    task = functools.partial(
        _h_chunk, seed=cfg.seed, grid_n=cfg.grid_n, lag=lag, blocks=blocks,
        boot_draws=cfg.boot_draws,
    )
    parts = parallel_map(task, chunk_ranges(cfg.paths, cfg.chunk), cfg.workers)
    sims = np.concatenate(parts, axis=1)
    return {LimitKind.H: sims[0], LimitKind.HTILDE: sims[1]}


def simulate_H_sample(b, kind, cfg):
    kind = LimitKind.parse(kind)
    if kind not in (LimitKind.H, LimitKind.HTILDE):
        raise SpecError(f"simulate_H handles H and Htilde, got {kind.value}")
    return simulate_H_pair(b, cfg)[kind]


def simulate_H(b, alpha, kind, cfg):
    return path_quantile(simulate_H_sample(b, kind, cfg), alpha)


def fit_cv_poly(b_grid, cv_values, alpha, kind=None):
    """OLS of (cv - alpha) on (b, b^2) without intercept, so that cv(0) = alpha.

    R^2 is taken against the centered total sum of squares of ``cv_values``; a
    constant response has R^2 = 0 by convention.
    """
    b = np.asarray(b_grid, dtype=float).reshape(-1)
    cv = np.asarray(cv_values, dtype=float).reshape(-1)
    if b.size != cv.size:
        raise CalibrationError("b_grid and cv_values must have the same length")
    if b.size < 3:
        raise CalibrationError(f"a quadratic fit needs at least 3 points, got {b.size}")
    design = np.column_stack([b, b * b])
    if np.linalg.matrix_rank(design) < 2:
        raise CalibrationError("rank-deficient design: b_grid needs at least two distinct values")
    alpha = float(alpha)
    (a1, a2), *_ = np.linalg.lstsq(design, cv - alpha, rcond=None)
    fitted = alpha + design @ np.array([a1, a2])
    total = float(np.sum((cv - cv.mean()) ** 2))
    r2 = 0.0 if total == 0 else 1.0 - float(np.sum((cv - fitted) ** 2)) / total
    return CvFit(
        LimitKind.parse(kind) if kind is not None else None,
        alpha, alpha, float(a1), float(a2), r2,
    )


def load_cv_table(path=None):
    """Read ``kind,alpha,a0,a1,a2,r2`` rows into {(kind, alpha): CvFit}."""
    frame = pd.read_csv(path or DEFAULT_TABLE, comment="#")
    missing = set(TABLE_COLUMNS) - set(frame.columns)
    if missing:
        raise SpecError(f"critical-value table is missing columns: {sorted(missing)}")
    table = {}
    for row in frame.itertuples(index=False):
        kind = LimitKind.parse(row.kind)
        table[(kind, to_level(float(row.alpha)))] = CvFit(
            kind, float(row.alpha), float(row.a0), float(row.a1), float(row.a2), float(row.r2)
        )
    return table


def write_cv_table(fits, path_or_buf):
    frame = pd.DataFrame([fit.as_row() for fit in fits], columns=TABLE_COLUMNS)
    frame.to_csv(path_or_buf, index=False, float_format="%.6g")
    return frame


@functools.lru_cache(maxsize=4)
def _shipped_table(path):
    return load_cv_table(path)


def cv_lookup(kind, alpha, b, table=None):
    """Calibrated level from the stored quadratic fits.

    A nonpositive polynomial value is an error, never clamped.
    """
    kind = LimitKind.parse(kind)
    table = table if table is not None else _shipped_table(str(DEFAULT_TABLE))
    key = (kind, to_level(alpha))
    if key not in table:
        raise TableDomainError(f"no critical-value row for {kind.value} at alpha={float(alpha)}")
    b = float(b)
    if not 0 < b <= TABLE_B_MAX:
        raise TableDomainError(f"b must be in (0, {TABLE_B_MAX}] for the stored table, got {b}")
    level = table[key](b)
    if level <= 0:
        raise CalibrationError(
            f"calibrated level {level:.6g} for {kind.value} at alpha={float(alpha)}, b={b} is not positive"
        )
    return level
