"""Run manifests: the inputs, seed and timing written next to every result."""

import json
import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import scipy
from pydantic import BaseModel, Field

from spin_inverse import __version__
from spin_inverse.errors import OutputError
from spin_inverse.models import RunConfig
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)


def runtime_versions() -> Dict[str, str]:
    return {
        "spin_inverse": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


class RunManifest(BaseModel):
    """Everything needed to replay a run.

    ``config`` is the flat run configuration; loading the manifest as a
    config document reproduces the run.
    """
    config: Dict[str, Any]
    seed: int
    started_at: str
    wall_time_seconds: Optional[float] = None
    outputs: List[str] = Field(default_factory=list)
    versions: Dict[str, str] = Field(default_factory=runtime_versions)

    @classmethod
    def create(cls, config: RunConfig) -> "RunManifest":
        return cls(
            config=config.to_document(),
            seed=config.seed,
            started_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    def finalize(self, wall_time_seconds: float, outputs: List[Path]) -> None:
        self.wall_time_seconds = wall_time_seconds
        self.outputs = [str(path) for path in outputs]

    def save(self, path: Path) -> Path:
        """Write the manifest as JSON.

        Raises:
            OutputError: if the file cannot be written
        """
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(self.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(path, e.strerror or str(e)) from e
        logger.debug(f"Saved manifest to {path}")
        return path

    @staticmethod
    def load(path: Path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            return RunManifest.model_validate(json.load(f))


class Stopwatch:
    """Wall-clock timer for a run."""

    def __init__(self) -> None:
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start
