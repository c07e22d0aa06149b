import logging
import sqlite3
import threading
import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional

import pytz

logger = logging.getLogger(__name__)


class RunHistory:
    """SQLite record of CLI runs. Nothing here is read back by a computation."""

    def __init__(self, db_path: str = ":memory:"):
        self.db_path = db_path
        self.connection = sqlite3.connect(self.db_path, check_same_thread=False)
        self._lock = threading.Lock()
        self._create_runs_table()

    def _create_runs_table(self) -> None:
        with self._lock:
            try:
                self.connection.execute("BEGIN")
                self.connection.execute(
                    """
                    CREATE TABLE IF NOT EXISTS runs (
                        id             TEXT PRIMARY KEY,
                        command        TEXT,
                        config_digest  TEXT,
                        outputs        TEXT,
                        exit_code      INTEGER,
                        created_at     DATETIME
                    )
                """
                )
                self.connection.execute("COMMIT")
            except Exception as e:
                self.connection.execute("ROLLBACK")
                logger.error(f"Failed to create runs table: {e}")
                raise

    def add_run(
        self,
        command: str,
        config_digest: str,
        outputs: List[str],
        exit_code: int,
        *,
        created_at: Optional[str] = None,
    ) -> str:
        run_id = str(uuid.uuid4())
        created_at = created_at or datetime.now(pytz.utc).isoformat()
        with self._lock:
            try:
                self.connection.execute("BEGIN")
                self.connection.execute(
                    """
                    INSERT INTO runs (id, command, config_digest, outputs, exit_code, created_at)
                    VALUES (?, ?, ?, ?, ?, ?)
                """,
                    (run_id, command, config_digest, "\n".join(outputs), exit_code, created_at),
                )
                self.connection.execute("COMMIT")
            except Exception as e:
                self.connection.execute("ROLLBACK")
                logger.error(f"Failed to add run record: {e}")
                raise
        return run_id

    def get_runs(self, command: Optional[str] = None) -> List[Dict[str, Any]]:
        query = "SELECT id, command, config_digest, outputs, exit_code, created_at FROM runs"
        params: tuple = ()
        if command is not None:
            query += " WHERE command = ?"
            params = (command,)
        query += " ORDER BY created_at ASC"
        with self._lock:
            rows = self.connection.execute(query, params).fetchall()

        return [
            {
                "id": r[0],
                "command": r[1],
                "config_digest": r[2],
                "outputs": r[3].split("\n") if r[3] else [],
                "exit_code": r[4],
                "created_at": r[5],
            }
            for r in rows
        ]

    def reset(self) -> None:
        """Drop and recreate the runs table."""
        with self._lock:
            try:
                self.connection.execute("BEGIN")
                self.connection.execute("DROP TABLE IF EXISTS runs")
                self.connection.execute("COMMIT")
            except Exception as e:
                self.connection.execute("ROLLBACK")
                logger.error(f"Failed to reset runs table: {e}")
                raise
        self._create_runs_table()

    def close(self) -> None:
        if self.connection:
            self.connection.close()
            self.connection = None

    def __del__(self):
        self.close()
