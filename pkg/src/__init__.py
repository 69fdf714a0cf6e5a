"""
fixedb-calib - Fixed-b calibrated subsampling and moving block bootstrap inference for time series
"""

__version__ = "0.1.0"

from .calibrate import (
    CalibratedSet,
    SecondStageSpec,
    bickel_sakov_select,
    calibrated_band,
    calibrated_region,
    calibrated_threshold,
    second_stage_pvalues,
)
from .estimators import Estimator
from .fixedb_limits import LimitKind, LimitSimConfig, cv_lookup, fit_cv_poly
from .manager import CalibrationManager
from .resampling import BlockSpec, Calibration, Method, PValueKind, Shape, build_ci, mbb_pvalue, subsample_pvalue
from .series_gen import ModelSpec, TimeSeries, gen_series

__all__ = [
    "BlockSpec",
    "CalibratedSet",
    "Calibration",
    "CalibrationManager",
    "Estimator",
    "LimitKind",
    "LimitSimConfig",
    "Method",
    "ModelSpec",
    "PValueKind",
    "SecondStageSpec",
    "Shape",
    "TimeSeries",
    "bickel_sakov_select",
    "build_ci",
    "calibrated_band",
    "calibrated_region",
    "calibrated_threshold",
    "cv_lookup",
    "fit_cv_poly",
    "gen_series",
    "mbb_pvalue",
    "second_stage_pvalues",
    "subsample_pvalue",
]
