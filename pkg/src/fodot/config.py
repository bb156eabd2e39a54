"""Engine configuration: solver command, timeouts, service limits.

Resolution order: explicit arguments, then the FODOT_SOLVER / FODOT_CONFIG
environment variables, then `fodot.json` in the working directory, then the
bundled solver.
"""

from __future__ import annotations

import json
import os
import shlex
from dataclasses import dataclass
from pathlib import Path


@dataclass
class Config:
    solver_command: list[str] | None = None  # None = bundled solver
    timeout_ms: int = 30000
    optimize_epsilon: str = "1/1000000"      # tolerance for real objectives
    session_ttl_s: int = 1800
    eager_relevance: bool = True
    port: int = 8000

    @staticmethod
    def load(path: str | os.PathLike | None = None) -> "Config":
        cfg = Config()
        file = path or os.environ.get("FODOT_CONFIG")
        if file is None and Path("fodot.json").is_file():
            file = "fodot.json"
        if file is not None and Path(file).is_file():
            data = json.loads(Path(file).read_text())
            if "solver_command" in data:
                value = data["solver_command"]
                cfg.solver_command = shlex.split(value) \
                    if isinstance(value, str) else list(value)
            for key in ("timeout_ms", "session_ttl_s", "eager_relevance",
                        "port", "optimize_epsilon"):
                if key in data:
                    setattr(cfg, key, data[key])
        env = os.environ.get("FODOT_SOLVER")
        if env:
            cfg.solver_command = shlex.split(env)
        return cfg
