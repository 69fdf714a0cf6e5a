"""
Calibration Manager for fixedb-calib
Main orchestrator behind the command line: loads series, runs inference and experiments
"""

import functools
import logging
import os
import sys

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from scipy.stats import norm

# Handle imports for both direct execution and package import
try:
    from .calibrate import (
        DEFAULT_BAND_NPRIME, DEFAULT_REGION_NPRIME, SecondStageSpec, bickel_sakov_select,
        calibrated_band, calibrated_region, traditional_band, traditional_region,
    )
    from .config import Config
    from .estimators import Estimator
    from .exceptions import SpecError
    from .experiment import CONFIG_TEMPLATE, ExperimentConfig, parse_err, parse_family
    from .fixedb_limits import PAPER_B_GRID, load_cv_table, write_cv_table
    from .harness import regen_cv_table, run_experiment, write_rows
    from .oracles import arma_autocovariances, cdf_sup_distance, normalized_spectral_cdf
    from .resampling import (
        BlockSpec, Calibration, Method, PValueKind, Shape, build_ci, mbb_pvalue, subsample_pvalue,
    )
    from .result_store import ResultStore
    from .series_gen import ModelSpec, TimeSeries, gen_series
    from .targets import TargetKind
except ImportError:
    # When running as script directly
    sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    from src.calibrate import (
        DEFAULT_BAND_NPRIME, DEFAULT_REGION_NPRIME, SecondStageSpec, bickel_sakov_select,
        calibrated_band, calibrated_region, traditional_band, traditional_region,
    )
    from src.config import Config
    from src.estimators import Estimator
    from src.exceptions import SpecError
    from src.experiment import CONFIG_TEMPLATE, ExperimentConfig, parse_err, parse_family
    from src.fixedb_limits import PAPER_B_GRID, load_cv_table, write_cv_table
    from src.harness import regen_cv_table, run_experiment, write_rows
    from src.oracles import arma_autocovariances, cdf_sup_distance, normalized_spectral_cdf
    from src.resampling import (
        BlockSpec, Calibration, Method, PValueKind, Shape, build_ci, mbb_pvalue, subsample_pvalue,
    )
    from src.result_store import ResultStore
    from src.series_gen import ModelSpec, TimeSeries, gen_series
    from src.targets import TargetKind

logger = logging.getLogger(__name__)


def _fmt(x):
    return repr(float(x))


def parse_null(text):
    """Null function for band p-values.

    ``normal:<mu>:<sigma>`` for a marginal CDF, ``white-noise`` or
    ``arma:<rho>:<theta>`` for a normalized spectral distribution.
    """
    name, *args = [p.strip() for p in text.strip().lower().split(":")]
    try:
        values = [float(a) for a in args]
    except ValueError:
        raise SpecError(f"invalid null: {text!r}") from None
    if name == "normal" and len(values) == 2:
        return TargetKind.CDF_BAND, functools.partial(norm.cdf, loc=values[0], scale=values[1])
    if name == "white-noise" and not values:
        values = [0.0, 0.0]
        name = "arma"
    if name == "arma" and len(values) == 2:
        gamma = arma_autocovariances(values[0], values[1], 2000)
        return TargetKind.SPEC_BAND, functools.partial(normalized_spectral_cdf, gamma)
    raise SpecError(f"invalid null: {text!r}")


class CalibrationManager:
    """Main manager that orchestrates inference, experiments and table regeneration"""

    def __init__(self, config=None):
        self.config = config or Config()
        logger.debug("Configuration:\n%s", self.config)
        self._table = None

    @property
    def cv_table(self):
        if self._table is None and self.config.CV_TABLE_PATH:
            self._table = load_cv_table(self.config.CV_TABLE_PATH)
        return self._table

    def init_project(self, path="experiment.cfg"):
        """Write a commented experiment configuration template."""
        if os.path.exists(path):
            print(f"⚠️  Configuration file '{path}' already exists.")
            response = input("Do you want to overwrite it? (y/N): ")
            if response.lower() != 'y':
                print("❌ Configuration file creation cancelled.")
                return

        with open(path, "w", encoding="utf-8") as f:
            f.write(CONFIG_TEMPLATE)

        print(f"✅ Configuration file '{path}' created successfully!")
        print(f"📝 Edit it, then run: fixedb-calib coverage --config {path} --out results.csv")

    def load_series(self, data=None, model="arma11", rho=0.0, theta=0.0, mu=0.0, err="gaussian",
                    n=100, seed=0):
        """Read ``data`` (one number per line) or simulate a series."""
        if data:
            ts = TimeSeries.from_file(data)
            logger.info("📝 Read %d observations from %s", ts.n, data)
            return ts
        spec = ModelSpec(parse_family(model), float(rho), float(theta), float(mu), parse_err(err))
        logger.info("🔄 Simulating %s series of length %d (seed %d)", spec.label, n, seed)
        return gen_series(spec, int(n), int(seed))

    @staticmethod
    def block_spec(ts, l=None, b=None):
        if l is not None:
            return BlockSpec(ts.n, int(l))
        if b is not None:
            return BlockSpec.from_fraction(ts.n, b)
        raise SpecError("give a window length with --l or a fraction with --b")

    def _method(self, name, B=None, seed=0):
        if name == "mbb":
            return Method.mbb(B or self.config.BOOTSTRAP_REPS, seed)
        if name == "ss":
            return Method.ss()
        raise SpecError(f"unknown method: {name!r}")

    def confidence_interval(self, ts, spec, estimator, alpha, method="ss", calibration="small-b",
                            shape="symmetric", B=None, seed=0):
        interval = build_ci(
            ts, spec, Estimator.parse(estimator), alpha, self._method(method, B, seed),
            Calibration(calibration), Shape(shape), self.cv_table,
        )
        logger.info("📊 %s interval at calibrated level %s", interval.shape.value, interval.level)
        print(f"{_fmt(interval.lo)} {_fmt(interval.hi)}")
        return interval

    def region(self, ts, spec, estimator, alpha, n_prime=None, traditional=False):
        est = Estimator.parse(estimator)
        if traditional:
            region = traditional_region(ts, spec, est, alpha)
        else:
            s2 = SecondStageSpec.for_target(n_prime or DEFAULT_REGION_NPRIME, spec.b, TargetKind.REGION)
            region = calibrated_region(ts, spec, est, alpha, s2)
        print("center " + " ".join(_fmt(v) for v in region.center))
        print(f"radius {_fmt(region.radius)}")
        print(f"threshold {region.threshold} ({float(region.threshold):.6g})")
        return region

    def band(self, ts, spec, alpha, target="cdf-band", n_prime=None, traditional=False, out=None):
        kind = TargetKind.parse(target)
        if traditional:
            band = traditional_band(ts, spec, alpha, kind)
        else:
            s2 = SecondStageSpec.for_target(n_prime or DEFAULT_BAND_NPRIME, spec.b, kind)
            band = calibrated_band(ts, spec, alpha, s2, kind)
        print(f"radius {_fmt(band.radius)}")
        print(f"width {_fmt(band.width)}")
        print(f"threshold {band.threshold} ({float(band.threshold):.6g})")
        if out:
            center = band.center.values
            pd.DataFrame({
                "grid": band.grid,
                "center": center,
                "lower": center - band.radius,
                "upper": center + band.radius,
            }).to_csv(out, index=False)
            print(f"✅ Band written to {out}")
        return band

    def pvalue(self, ts, spec, estimator=None, theta0=None, kind="symmetric", method="ss",
               B=None, seed=0, exact=False, null=None):
        """Scalar or vector parameter p-value, or a band p-value against ``null``."""
        if null is not None:
            target, fn = parse_null(null)
            band = traditional_band(ts, spec, 0.5, target)
            if target is TargetKind.CDF_BAND:
                p = band.pvalue_at(cdf_sup_distance(ts.values, fn))
            else:
                p = band.pvalue_at(band.distance_to(fn))
        else:
            if theta0 is None:
                raise SpecError("give --theta0 for a parameter p-value or --null for a band")
            est = Estimator.parse(estimator or "mean")
            theta0 = np.array([float(v) for v in str(theta0).split(",")])
            pkind = PValueKind(kind.replace("-", "_"))
            if method == "mbb":
                p = mbb_pvalue(ts, spec, est, theta0, pkind, B or self.config.BOOTSTRAP_REPS, seed, exact)
            else:
                p = subsample_pvalue(ts, spec, est, theta0, pkind)
        print(f"{p} {_fmt(p)}")
        return p

    def select_blocksize(self, ts, b, K1=None, K2=None, g=0.75, target="cdf-band", estimator=None):
        kind = TargetKind.parse(target)
        if K1 is None or K2 is None:
            K1, K2 = (5, 40) if kind is TargetKind.REGION else (10, 60)
        est = Estimator.parse(estimator or "mean,median") if kind is TargetKind.REGION else None
        selection = bickel_sakov_select(ts, b, K1, K2, g, kind, est)
        print(f"n' = {selection.n_prime}")
        print("candidates " + " ".join(str(c) for c in selection.candidates))
        return selection

    def _store(self, enabled):
        url = self.config.RESULTS_DB_URL
        if enabled and not url:
            url = "sqlite:///fixedb_results.db"
        return ResultStore(url) if url else None

    def run_coverage(self, config_path=None, preset=None, paper_scale=False, seed=None, out=None,
                     workers=None, store=False):
        values = dict(dotenv_values(config_path)) if config_path else {}
        if preset:
            values["preset"] = preset
        if seed is not None:
            values["seed"] = str(seed)
        cfg = ExperimentConfig.from_mapping(values)
        if paper_scale:
            cfg = cfg.paper_scale()

        print(f"🔄 Running {cfg.target.value} coverage: {len(cfg.b_list)} b values x "
              f"{len(cfg.calibrations)} calibrations x {cfg.reps} replications", file=sys.stderr)
        rows = run_experiment(
            cfg, workers or self.config.WORKERS, self._store(store), self.config.ORACLE_DRAWS
        )
        write_rows(rows, out or sys.stdout)
        if out:
            print(f"✅ {len(rows)} coverage rows written to {out}", file=sys.stderr)
        return rows

    def regen_table(self, seed=0, out=None, b_grid=None, alphas=(0.05, 0.1), workers=None,
                    paths=None, grid_n=None, boot_draws=None):
        cfg = self.config.sim_config(seed).scaled(
            paths=paths or self.config.SIM_PATHS,
            grid_n=grid_n or self.config.SIM_GRID_N,
            boot_draws=boot_draws or self.config.SIM_BOOT_DRAWS,
            workers=workers or self.config.WORKERS,
        )
        print(f"🔄 Simulating limit quantiles: paths={cfg.paths}, grid_n={cfg.grid_n}, "
              f"boot_draws={cfg.boot_draws}", file=sys.stderr)
        fits = regen_cv_table(cfg, b_grid or PAPER_B_GRID, alphas)
        write_cv_table(fits, out or sys.stdout)
        if out:
            print(f"✅ Critical-value table written to {out}", file=sys.stderr)
        return fits

