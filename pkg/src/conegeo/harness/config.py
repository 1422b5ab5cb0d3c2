from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

from .catalog import CATALOG

SUITES = ("geometry", "groups", "unitarize", "split", "interpolate")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a suite run depends on; no other source of randomness exists."""

    seed: int = 20240611
    dims: tuple = (2, 4, 8, 16)
    trials: int = 1000          # instances per dimension (geometry) and per inequality check
    groups: int = 50            # generated groups per group-level check
    pairs: int = 200            # (matrix, expectation) / (group, point) pairs
    thmacs: int = 20            # block-diagonal canonical-unitarizer instances
    grid: int = 11              # interpolation grid points on [0, 1]
    cond_max: float = 6.0       # condition targets are drawn in [1, cond_max]
    catalog: tuple = CATALOG
    suites: tuple = SUITES
    tol_overrides: dict = field(default_factory=dict)
    out: str | None = None
    threads: int | None = None

    def workers(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        return max(1, int(os.environ.get("CONEGEO_THREADS", "1")))

    def scaled(self, n: int) -> int:
        """Instance counts shrink to zero with ``trials`` (an empty run stays empty)."""
        return 0 if self.trials <= 0 else n

    def to_json(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        d["catalog"] = list(self.catalog)
        d["suites"] = list(self.suites)
        return d
