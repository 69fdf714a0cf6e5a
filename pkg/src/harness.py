"""
Monte Carlo coverage experiments and regeneration of the critical-value table.

Replication r always simulates its series from substream (seed, SERIES_STREAM, r)
and draws its bootstrap samples from (seed, BOOTSTRAP_STREAM, r), so rows depend on
the configuration and seed only, never on the worker count or on the ledger.
"""

import functools
import logging

import numpy as np
import pandas as pd

from .calibrate import (
    SecondStageSpec, bickel_sakov_select, calibrated_band, calibrated_region,
    traditional_band, traditional_region,
)
from .estimators import Estimator
from .exceptions import SpecError
from .experiment import CSV_COLUMNS, CoverageRow
from .fixedb_limits import (
    LimitKind, blocks_per_sample, fit_cv_poly, path_quantile, simulate_G_grid, simulate_H_pair,
)
from .oracles import DEFAULT_ORACLE_DRAWS, cdf_sup_distance, true_cdf, true_parameter, true_spectral
from .resampling import BlockSpec, Calibration, Method, build_ci
from .series_gen import gen_series
from .streams import BOOTSTRAP_STREAM, SERIES_STREAM, derive_seed, parallel_map
from .targets import TargetKind

logger = logging.getLogger(__name__)


def _double_ss_set(ts, spec, cfg, choice, b, est):
    kind = cfg.target.set_kind
    if choice.name == "bickel-sakov":
        n_prime = bickel_sakov_select(ts, b, choice.K1, choice.K2, choice.g, kind, est).n_prime
    else:
        n_prime = choice.n_prime
    s2 = SecondStageSpec.for_target(n_prime, spec.b, kind)
    if kind is TargetKind.REGION:
        return calibrated_region(ts, spec, est, cfg.alpha, s2)
    return calibrated_band(ts, spec, cfg.alpha, s2, kind)


def _score_interval(ts, spec, cfg, choice, b, est, truth, rep):
    if choice.is_double:
        region = _double_ss_set(ts, spec, cfg, choice, b, est)
        return region.contains(truth), 2 * region.radius
    method = cfg.method
    if method.is_mbb:
        method = Method.mbb(method.B, derive_seed(cfg.seed, BOOTSTRAP_STREAM, rep))
    calibration = Calibration.FIXED_B if choice.name == "fixed-b" else Calibration.SMALL_B
    interval = build_ci(ts, spec, est, cfg.alpha, method, calibration, cfg.shape)
    return truth[0] in interval, interval.width


def _score_set(ts, spec, cfg, choice, b, est, truth):
    kind = cfg.target.set_kind
    if choice.is_double:
        region = _double_ss_set(ts, spec, cfg, choice, b, est)
    elif kind is TargetKind.REGION:
        region = traditional_region(ts, spec, est, cfg.alpha)
    else:
        region = traditional_band(ts, spec, cfg.alpha, kind)

    if kind is TargetKind.REGION:
        return region.contains(truth), region.radius
    if kind is TargetKind.CDF_BAND:
        return region.covers_distance(cdf_sup_distance(ts.values, truth)), region.width
    return region.contains(truth(region.grid)), region.width


@functools.lru_cache(maxsize=8)
def _truth(cfg, oracle_draws):
    kind = cfg.target.set_kind
    if kind is TargetKind.REGION:
        return true_parameter(cfg.model, Estimator.parse(cfg.target.estimator_text), oracle_draws)
    if kind is TargetKind.CDF_BAND:
        return true_cdf(cfg.model, oracle_draws)
    return functools.partial(true_spectral, cfg.model, draws=oracle_draws)


def _replicate(rep, cfg, b, oracle_draws):
    """(covered, size) for every calibration of ``cfg`` on replication ``rep``."""
    ts = gen_series(cfg.model, cfg.n, derive_seed(cfg.seed, SERIES_STREAM, rep))
    spec = BlockSpec.from_fraction(cfg.n, b)
    est = Estimator.parse(cfg.target.estimator_text) if cfg.target.estimator_text else None
    truth = _truth(cfg, oracle_draws)
    out = []
    for choice in cfg.calibrations:
        if cfg.target.is_interval:
            covered, size = _score_interval(ts, spec, cfg, choice, b, est, truth, rep)
        else:
            covered, size = _score_set(ts, spec, cfg, choice, b, est, truth)
        out.append((bool(covered), float(size)))
    return out


def run_experiment(cfg, workers=1, store=None, oracle_draws=DEFAULT_ORACLE_DRAWS):
    """One CoverageRow per (b, calibration), in b_list then calibration order."""
    cfg.validate()
    fingerprint = cfg.fingerprint(oracle_draws)
    rows = []
    for b in cfg.b_list:
        cached = None
        if store is not None:
            cached = [store.get_cell(fingerprint, b, c.label) for c in cfg.calibrations]
            if any(cell is None or cell[1] != cfg.reps for cell in cached):
                cached = None
        if cached is not None:
            logger.info("📊 b=%g: reusing %d ledger cells", b, len(cached))
            cells = [(hits, size) for hits, _, size in cached]
        else:
            logger.info("🔄 b=%g: running %d replications", b, cfg.reps)
            task = functools.partial(_replicate, cfg=cfg, b=b, oracle_draws=oracle_draws)
            results = parallel_map(task, range(cfg.reps), workers)
            cells = []
            for i, choice in enumerate(cfg.calibrations):
                hits = sum(1 for rep in results if rep[i][0])
                sizes = [rep[i][1] for rep in results]
                size = float(np.mean(sizes))
                unbounded = sum(1 for s in sizes if np.isinf(s))
                if unbounded:
                    logger.warning("⚠️  b=%g %s: %d of %d sets are unbounded, mean_size is inf",
                                   b, choice.label, unbounded, cfg.reps)
                cells.append((hits, size))
                if store is not None:
                    store.record_cell(fingerprint, b, choice.label, hits, cfg.reps, size)
        for choice, (hits, size) in zip(cfg.calibrations, cells):
            rows.append(CoverageRow.for_cell(cfg, b, choice.label, hits, size))
    return rows


def rows_frame(rows):
    return pd.DataFrame([vars(row) for row in rows], columns=CSV_COLUMNS)


def write_rows(rows, path_or_buf):
    frame = rows_frame(rows)
    frame.to_csv(path_or_buf, index=False)
    return frame


def regen_cv_table(cfg, b_grid, alphas=(0.05, 0.1)):
    """Simulate limit quantiles on ``b_grid`` and fit one quadratic per (kind, alpha).

    H and Htilde use only the grid points with integer 1/b.
    """
    b_grid = tuple(float(b) for b in b_grid)
    if not b_grid:
        raise SpecError("b_grid is empty")
    quantiles = {}

    logger.info("🔄 Simulating G and Gtilde at %d values of b", len(b_grid))
    g_samples = simulate_G_grid(b_grid, cfg)
    for kind in (LimitKind.G, LimitKind.GTILDE):
        for alpha in alphas:
            quantiles[(kind, alpha)] = (
                list(b_grid), [path_quantile(g_samples[(kind, b)], alpha) for b in b_grid]
            )

    h_grid = []
    for b in b_grid:
        try:
            blocks_per_sample(b)
        except SpecError:
            logger.info("Skipping b=%g for H and Htilde: 1/b is not an integer", b)
            continue
        h_grid.append(b)
    h_samples = {}
    for b in h_grid:
        logger.info("🔄 Simulating H and Htilde at b=%g", b)
        pair = simulate_H_pair(b, cfg)
        h_samples[(LimitKind.H, b)] = pair[LimitKind.H]
        h_samples[(LimitKind.HTILDE, b)] = pair[LimitKind.HTILDE]
    for kind in (LimitKind.H, LimitKind.HTILDE):
        for alpha in alphas:
            quantiles[(kind, alpha)] = (
                h_grid, [path_quantile(h_samples[(kind, b)], alpha) for b in h_grid]
            )

    fits = []
    for (kind, alpha), (grid, values) in quantiles.items():
        fit = fit_cv_poly(grid, values, alpha, kind)
        logger.info("📊 %s alpha=%g: a1=%.4f a2=%.4f R2=%.4f", kind.value, alpha, fit.a1, fit.a2, fit.r2)
        fits.append(fit)
    return fits
