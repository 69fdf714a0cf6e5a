import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from src.series_gen import Family, ModelSpec, TimeSeries, gen_series

settings.register_profile("ci", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", deadline=None, max_examples=25)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))

CONFIG_NAMES = (
    "LOG_LEVEL", "RESULTS_DB_URL", "WORKERS", "SIM_PATHS", "SIM_GRID_N", "SIM_BOOT_DRAWS",
    "BOOTSTRAP_REPS", "ORACLE_DRAWS", "CV_TABLE_PATH",
)


@pytest.fixture
def iid_series():
    return gen_series(ModelSpec(), 100, seed=3)


@pytest.fixture
def ar_series():
    return gen_series(ModelSpec(Family.ARMA11, rho=0.5), 200, seed=11)


@pytest.fixture
def small_series():
    return TimeSeries(np.array([0.0, 3.0, 1.0, 4.0, 1.0, 5.0]))


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run in an empty directory so no .env or fixedb_config.py is picked up."""
    monkeypatch.chdir(tmp_path)
    for name in CONFIG_NAMES:
        # set first so teardown also removes values a .env file loads
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    return tmp_path
