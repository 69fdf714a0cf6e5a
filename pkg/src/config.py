import importlib.util
import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "fixedb_config.py"


class Config:
    def __init__(self, config_file=DEFAULT_CONFIG_FILE, env_file=".env"):
        # Load environment variables from .env if available
        if os.path.exists(env_file):
            load_dotenv(env_file)
            logger.debug("Loaded environment variables from %s", env_file)

        # Attempt to load user config
        self.load_user_config(config_file)

        # Set defaults if not provided
        self.LOG_LEVEL = str(self._setting("LOG_LEVEL", "INFO")).upper()
        self.RESULTS_DB_URL = self._setting("RESULTS_DB_URL", None) or None
        self.WORKERS = int(self._setting("WORKERS", 1))
        self.SIM_PATHS = int(self._setting("SIM_PATHS", 50_000))
        self.SIM_GRID_N = int(self._setting("SIM_GRID_N", 5_000))
        self.SIM_BOOT_DRAWS = int(self._setting("SIM_BOOT_DRAWS", 50_000))
        self.BOOTSTRAP_REPS = int(self._setting("BOOTSTRAP_REPS", 5_000))
        self.ORACLE_DRAWS = int(self._setting("ORACLE_DRAWS", 10_000_000))
        self.CV_TABLE_PATH = self._setting("CV_TABLE_PATH", None) or None

    def _setting(self, name, default):
        return getattr(self, name, os.getenv(name, default))

    def load_user_config(self, config_file):
        if os.path.exists(config_file):
            spec = importlib.util.spec_from_file_location("user_config", config_file)
            user_config = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(user_config)

            # Dynamically load user config
            for attr in dir(user_config):
                if attr.isupper():
                    setattr(self, attr, getattr(user_config, attr))
            logger.debug("User config loaded from %s", config_file)
        else:
            logger.debug("No user config found at %s; using defaults or environment variables", config_file)

    def sim_config(self, seed=0):
        from .fixedb_limits import LimitSimConfig

        return LimitSimConfig(
            paths=self.SIM_PATHS,
            grid_n=self.SIM_GRID_N,
            boot_draws=self.SIM_BOOT_DRAWS,
            seed=seed,
            workers=self.WORKERS,
        )

    def __str__(self):
        return (f"Log level: {self.LOG_LEVEL}\n"
                f"Results ledger: {self.RESULTS_DB_URL or 'disabled'}\n"
                f"Workers: {self.WORKERS}\n"
                f"Limit simulation: paths={self.SIM_PATHS}, grid_n={self.SIM_GRID_N}, "
                f"boot_draws={self.SIM_BOOT_DRAWS}\n"
                f"Critical-value table: {self.CV_TABLE_PATH or 'shipped'}")
