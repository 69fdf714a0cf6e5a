"""
Result Store for fixedb-calib
Ledger of finished coverage cells, so interrupted runs resume where they stopped
"""

import logging

from sqlalchemy import create_engine, text
from sqlalchemy.orm import sessionmaker

logger = logging.getLogger(__name__)


class ResultStore:
    """Keeps (fingerprint, b, calibration) -> (hits, reps, mean_size) in any SQLAlchemy database"""

    def __init__(self, url, table="coverage_cells"):
        self.url = url
        self.engine = create_engine(url)
        self.SessionLocal = sessionmaker(bind=self.engine)
        self.table = table
        self.create_table()

    def create_table(self):
        """Creates the ledger table if it does not exist."""
        with self.SessionLocal() as session:
            session.execute(text(f"""
                CREATE TABLE IF NOT EXISTS {self.table} (
                    fingerprint VARCHAR(64) NOT NULL,
                    b VARCHAR(32) NOT NULL,
                    calibration VARCHAR(64) NOT NULL,
                    hits INTEGER NOT NULL,
                    reps INTEGER NOT NULL,
                    mean_size DOUBLE PRECISION NOT NULL,
                    PRIMARY KEY (fingerprint, b, calibration)
                );
            """))
            session.commit()
        logger.debug("Ledger table %s ensured at %s", self.table, self.url)

    def get_cell(self, fingerprint, b, calibration):
        """Return (hits, reps, mean_size) for a finished cell, or None."""
        with self.SessionLocal() as session:
            row = session.execute(
                text(f"SELECT hits, reps, mean_size FROM {self.table} "
                     "WHERE fingerprint = :fingerprint AND b = :b AND calibration = :calibration"),
                {"fingerprint": fingerprint, "b": repr(float(b)), "calibration": calibration},
            ).first()
        return None if row is None else (int(row[0]), int(row[1]), float(row[2]))

    def record_cell(self, fingerprint, b, calibration, hits, reps, mean_size):
        """Record a finished cell, replacing any earlier record."""
        params = {"fingerprint": fingerprint, "b": repr(float(b)), "calibration": calibration}
        with self.SessionLocal() as session:
            session.execute(
                text(f"DELETE FROM {self.table} "
                     "WHERE fingerprint = :fingerprint AND b = :b AND calibration = :calibration"),
                params,
            )
            session.execute(
                text(f"INSERT INTO {self.table} (fingerprint, b, calibration, hits, reps, mean_size) "
                     "VALUES (:fingerprint, :b, :calibration, :hits, :reps, :mean_size)"),
                {**params, "hits": int(hits), "reps": int(reps), "mean_size": float(mean_size)},
            )
            session.commit()

    def count_cells(self, fingerprint=None):
        with self.SessionLocal() as session:
            if fingerprint is None:
                result = session.execute(text(f"SELECT COUNT(*) FROM {self.table}"))
            else:
                result = session.execute(
                    text(f"SELECT COUNT(*) FROM {self.table} WHERE fingerprint = :fingerprint"),
                    {"fingerprint": fingerprint},
                )
            return int(result.scalar())
