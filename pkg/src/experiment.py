"""
Coverage experiment configuration and result rows.

Experiment files are flat ``key = value`` text with ``#`` comments:

    preset = desk-ci
    model = arma11
    rho = 0.5
    err = gaussian
    b_list = 0.08, 0.12, 0.16
    calibrations = small-b, fixed-b
    target = ci-mean
    seed = 7

Keys given in the file override the named preset.
"""

import enum
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace

from dotenv import dotenv_values

from .calibrate import SecondStageSpec
from .empirical import to_level
from .exceptions import FixedBError, SpecError
from .fixedb_limits import TABLE_B_MAX
from .oracles import DEFAULT_ORACLE_DRAWS
from .resampling import DEFAULT_BOOTSTRAP_REPS, BlockSpec, Calibration, Method, Shape, interval_level
from .series_gen import ErrorDist, Family, ModelSpec
from .targets import TargetKind

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "model", "rho", "theta", "err", "n", "b", "method", "calibration",
    "target", "alpha", "coverage", "mean_size", "reps", "seed",
]


def _grid(lo, hi, step=0.01):
    count = int(round((hi - lo) / step)) + 1
    return ",".join(f"{lo + i * step:.2f}" for i in range(count))


PRESETS = {
    "paper-ci": {
        "n": "100", "reps": "10000", "B": "5000", "alpha": "0.05",
        "b_list": _grid(0.03, 0.16), "target": "ci-mean", "calibrations": "small-b,fixed-b",
    },
    "paper-region": {
        "n": "200", "reps": "1000", "alpha": "0.05", "b_list": _grid(0.01, 0.20),
        "target": "region-mean-median",
        "calibrations": "small-b,double-ss:15,bickel-sakov:5:40:0.75",
    },
    "paper-band": {
        "n": "200", "reps": "1000", "alpha": "0.05", "b_list": _grid(0.01, 0.20),
        "target": "cdf-band", "calibrations": "small-b,double-ss:30,bickel-sakov:10:60:0.75",
    },
    "paper-spec-band": {
        "n": "200", "reps": "1000", "alpha": "0.05", "b_list": _grid(0.04, 0.30),
        "target": "spec-band", "calibrations": "small-b,double-ss:30,bickel-sakov:10:60:0.75",
    },
}
PRESETS["desk-ci"] = {**PRESETS["paper-ci"], "reps": "1000", "B": "500"}
PRESETS["desk-region"] = {**PRESETS["paper-region"], "reps": "300"}
PRESETS["desk-band"] = {**PRESETS["paper-band"], "reps": "300"}
PRESETS["desk-spec-band"] = {**PRESETS["paper-spec-band"], "reps": "300"}


class ExperimentTarget(enum.Enum):
    CI_MEAN = "ci-mean"
    CI_TRIMMED_MEAN = "ci-trimmed-mean"
    REGION_MEAN_MEDIAN = "region-mean-median"
    CDF_BAND = "cdf-band"
    SPEC_BAND = "spec-band"

    @property
    def is_interval(self):
        return self in (ExperimentTarget.CI_MEAN, ExperimentTarget.CI_TRIMMED_MEAN)

    @property
    def set_kind(self):
        if self.is_interval or self is ExperimentTarget.REGION_MEAN_MEDIAN:
            return TargetKind.REGION
        return TargetKind(self.value)

    @property
    def estimator_text(self):
        return {
            ExperimentTarget.CI_MEAN: "mean",
            ExperimentTarget.CI_TRIMMED_MEAN: "trimmed_mean:0.25",
            ExperimentTarget.REGION_MEAN_MEDIAN: "mean,median",
        }.get(self)


@dataclass(frozen=True)
class CalibrationChoice:
    """small-b, fixed-b, double-ss:<n'> or bickel-sakov:<K1>:<K2>:<g>."""

    name: str
    n_prime: int = None
    K1: int = None
    K2: int = None
    g: float = None

    @classmethod
    def parse(cls, text):
        parts = [p.strip() for p in text.strip().lower().split(":")]
        name = parts[0]
        try:
            if name in ("small-b", "fixed-b") and len(parts) == 1:
                return cls(name)
            if name == "double-ss" and len(parts) == 2:
                return cls(name, n_prime=int(parts[1]))
            if name == "bickel-sakov" and len(parts) == 4:
                return cls(name, K1=int(parts[1]), K2=int(parts[2]), g=float(parts[3]))
        except ValueError:
            pass
        raise SpecError(f"unknown calibration: {text.strip()!r}")

    @property
    def label(self):
        if self.name == "double-ss":
            return f"double-ss:{self.n_prime}"
        if self.name == "bickel-sakov":
            return f"bickel-sakov:{self.K1}:{self.K2}:{self.g:g}"
        return self.name

    @property
    def is_double(self):
        return self.name in ("double-ss", "bickel-sakov")


_ERR_ALIASES = {
    "gaussian": ErrorDist.GAUSSIAN,
    "normal": ErrorDist.GAUSSIAN,
    "n01": ErrorDist.GAUSSIAN,
    "exp": ErrorDist.CENTERED_EXPONENTIAL,
    "exponential": ErrorDist.CENTERED_EXPONENTIAL,
    "centered_exponential": ErrorDist.CENTERED_EXPONENTIAL,
}


def parse_err(text):
    try:
        return _ERR_ALIASES[text.strip().lower().replace("-", "_")]
    except KeyError:
        raise SpecError(f"unknown error distribution: {text!r}") from None


def parse_family(text):
    key = text.strip().lower().replace("-", "_")
    key = {"ar1": "arma11", "ma1": "arma11", "arma": "arma11", "sine": "nonlinear_sine",
           "tar": "tar1"}.get(key, key)
    try:
        return Family(key)
    except ValueError:
        raise SpecError(f"unknown model: {text!r}") from None


def _floats(text):
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec = ModelSpec()
    n: int = 100
    b_list: tuple = (0.1,)
    alpha: float = 0.05
    method: Method = Method()
    calibrations: tuple = (CalibrationChoice("small-b"),)
    target: ExperimentTarget = ExperimentTarget.CI_MEAN
    shape: Shape = Shape.SYMMETRIC
    reps: int = 1000
    seed: int = 0
    preset: str = field(default=None, compare=False)

    def validate(self):
        self.model.validate()
        if self.reps < 1:
            raise SpecError(f"reps must be >= 1, got {self.reps}")
        if self.n < 2:
            raise SpecError(f"n must be >= 2, got {self.n}")
        if not 0 < to_level(self.alpha) < 1:
            raise SpecError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.b_list:
            raise SpecError("b_list is empty")
        if not self.calibrations:
            raise SpecError("no calibrations given")
        for b in self.b_list:
            if not 0 < b < 1:
                raise SpecError(f"every b must be in (0, 1), got {b}")
            BlockSpec.from_fraction(self.n, b)
        if self.method.is_mbb and not self.target.is_interval:
            raise SpecError("the moving block bootstrap is only available for confidence intervals")
        if self.target.is_interval is False and self.shape is not Shape.SYMMETRIC:
            raise SpecError("shape applies to confidence intervals only")
        for choice in self.calibrations:
            self._validate_choice(choice)
        return self

    def _validate_choice(self, choice):
        if choice.name == "fixed-b":
            if not self.target.is_interval:
                raise SpecError("fixed-b calibration applies to confidence intervals only")
            too_large = [b for b in self.b_list if BlockSpec.from_fraction(self.n, b).b > to_level(TABLE_B_MAX)]
            if too_large:
                raise SpecError(f"fixed-b calibration needs b <= {TABLE_B_MAX}, got {too_large}")
            for b in self.b_list:
                # nonpositive fitted levels raise CalibrationError
                interval_level(self.alpha, float(BlockSpec.from_fraction(self.n, b).b), self.method,
                               Calibration.FIXED_B, self.shape)
        if choice.is_double:
            if self.method.is_mbb:
                raise SpecError("double subsampling uses subsampling as the first stage")
            if self.target.is_interval and self.shape is not Shape.SYMMETRIC:
                raise SpecError("double subsampling gives symmetric intervals only")
        if choice.name == "double-ss":
            for b in self.b_list:
                s2 = SecondStageSpec.for_target(choice.n_prime, BlockSpec.from_fraction(self.n, b).b,
                                                self.target.set_kind)
                s2.check(self.n)
        if choice.name == "bickel-sakov":
            if not 0 < choice.g < 1 or not 0 < choice.K1 < choice.K2 < self.n:
                raise SpecError(f"bickel-sakov needs 0 < K1 < K2 < n and 0 < g < 1, got {choice.label}")

    @classmethod
    def from_mapping(cls, values):
        """Build from string key/values; a ``preset`` key supplies defaults."""
        values = {k.strip(): v for k, v in values.items() if v is not None}
        preset = values.get("preset")
        if preset:
            if preset not in PRESETS:
                raise SpecError(f"unknown preset: {preset!r}; choose from {sorted(PRESETS)}")
            values = {**PRESETS[preset], **values}
        known = {"model", "rho", "theta", "mu", "err", "n", "b_list", "alpha", "method", "B",
                 "calibrations", "target", "shape", "reps", "seed", "preset"}
        unknown = set(values) - known
        if unknown:
            raise SpecError(f"unknown experiment keys: {sorted(unknown)}")

        try:
            model = ModelSpec(
                family=parse_family(values.get("model", "arma11")),
                rho=float(values.get("rho", 0.0)),
                theta=float(values.get("theta", 0.0)),
                mu=float(values.get("mu", 0.0)),
                err_dist=parse_err(values.get("err", "gaussian")),
            )
            method_name = values.get("method", "ss").strip().lower()
            if method_name == "ss":
                method = Method.ss()
            elif method_name == "mbb":
                method = Method.mbb(int(values.get("B", DEFAULT_BOOTSTRAP_REPS)))
            else:
                raise SpecError(f"unknown method: {method_name!r}")
            return cls(
                model=model,
                n=int(values.get("n", 100)),
                b_list=_floats(values.get("b_list", "0.1")),
                alpha=float(values.get("alpha", 0.05)),
                method=method,
                calibrations=tuple(CalibrationChoice.parse(c)
                                   for c in values.get("calibrations", "small-b").split(",") if c.strip()),
                target=ExperimentTarget(values.get("target", "ci-mean").strip().lower()),
                shape=Shape(values.get("shape", "symmetric").strip().lower()),
                reps=int(values.get("reps", 1000)),
                seed=int(values.get("seed", 0)),
                preset=preset,
            ).validate()
        except FixedBError:
            raise
        except ValueError as e:
            raise SpecError(f"invalid experiment configuration: {e}") from None

    @classmethod
    def from_file(cls, path):
        return cls.from_mapping(dotenv_values(path))

    def paper_scale(self):
        """Same experiment at the replication counts of the published studies."""
        if self.target.is_interval:
            method = Method.mbb(5000, self.method.seed) if self.method.is_mbb else self.method
            return replace(self, reps=10_000, method=method)
        return replace(self, reps=1000)

    def fingerprint(self, oracle_draws=DEFAULT_ORACLE_DRAWS):
        """Ledger key: everything a cell depends on except b and the calibration."""
        payload = {
            "model": asdict(self.model),
            "n": self.n,
            "alpha": self.alpha,
            "method": asdict(self.method),
            "target": self.target.value,
            "shape": self.shape.value,
            "reps": self.reps,
            "seed": self.seed,
            "oracle_draws": int(oracle_draws),
        }
        text = json.dumps(payload, sort_keys=True, default=lambda o: getattr(o, "value", str(o)))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class CoverageRow:
    model: str
    rho: float
    theta: float
    err: str
    n: int
    b: float
    method: str
    calibration: str
    target: str
    alpha: float
    coverage: float
    mean_size: float
    reps: int
    seed: int

    @classmethod
    def for_cell(cls, cfg, b, calibration, hits, mean_size):
        return cls(
            model=cfg.model.label,
            rho=cfg.model.rho,
            theta=cfg.model.theta,
            err=cfg.model.err_dist.value,
            n=cfg.n,
            b=b,
            method=cfg.method.name,
            calibration=calibration,
            target=cfg.target.value,
            alpha=cfg.alpha,
            coverage=hits / cfg.reps,
            mean_size=mean_size,
            reps=cfg.reps,
            seed=cfg.seed,
        )


CONFIG_TEMPLATE = """\
# Coverage experiment for fixedb-calib (flat key = value; '#' starts a comment)
# Presets: {presets}
preset = desk-ci

# Data-generating process: arma11 | nonlinear_sine | tar1
model = arma11
rho = 0.5
theta = 0.0
mu = 0.0
# Innovations: gaussian | exp (EXP(1) - 1)
err = gaussian

# Inference: method ss | mbb (with B draws), shape for intervals
method = ss
# B = 500
shape = symmetric
# calibrations: small-b, fixed-b, double-ss:<n'>, bickel-sakov:<K1>:<K2>:<g>
calibrations = small-b, fixed-b
# target: ci-mean | ci-trimmed-mean | region-mean-median | cdf-band | spec-band
target = ci-mean

# b_list = 0.08, 0.12, 0.16
# reps = 1000
seed = 0
""".format(presets=", ".join(sorted(PRESETS)))
