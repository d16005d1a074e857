"""
Logger for lens-search trials.

Writes one JSON object per trial to a JSON-lines file for later re-ranking.
"""

from __future__ import annotations

import json
import os
import uuid
from datetime import datetime
from typing import TYPE_CHECKING

from hotmapper.core.types import PointCloud

if TYPE_CHECKING:
    from hotmapper.search import SearchConfig, TrialResult


class SearchLogger:
    """Logger that writes TrialResult data to a JSON-lines file."""

    def __init__(self, log_dir: str, file_name: str = "search"):
        self.log_dir = log_dir
        os.makedirs(log_dir, exist_ok=True)

        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        self.run_id = str(uuid.uuid4())[:8]
        self.log_file_path = os.path.join(log_dir, f"{file_name}_{timestamp}_{self.run_id}.jsonl")

        self._trial_count = 0
        self._metadata_logged = False

    def _append(self, entry: dict) -> None:
        with open(self.log_file_path, "a", encoding="utf-8") as f:
            json.dump(entry, f)
            f.write("\n")

    def log_metadata(self, config: SearchConfig, cloud: PointCloud | None = None):
        """Log the search configuration as the first entry in the file."""
        if self._metadata_logged:
            return

        entry = {
            "type": "metadata",
            "run_id": self.run_id,
            "timestamp": datetime.now().isoformat(),
            "config": config.to_dict(),
        }
        if cloud is not None:
            entry["n_points"] = cloud.n_points
            entry["dim"] = cloud.dim
        self._append(entry)
        self._metadata_logged = True

    def log(self, result: TrialResult):
        self._trial_count += 1
        self._append(
            {
                "type": "trial",
                "timestamp": datetime.now().isoformat(),
                "elapsed": result.elapsed,
                **result.to_dict(),
            }
        )

    @property
    def trial_count(self) -> int:
        return self._trial_count
