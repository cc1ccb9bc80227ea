"""Run configuration: tolerances, seeds and search bounds."""

import os
from dataclasses import dataclass, field, fields


@dataclass(frozen=True)
class RunConfig:
    float_eq: float = 1e-9          # generic float equality
    integrality: float = 1e-9       # distance-to-integer tests (resonance, eq. 12)
    ode: float = 1e-12              # per-path transport tolerance
    matching: float = 1e-9          # asymptotic matching tolerance at sector seeds
    rank_threshold: float = 1e-8    # SVD rank cut, relative to sigma_max
    direction_merge: float = 1e-9   # radians; two rays closer than this coincide
    seed: int = 0
    reducibility_bound: int = 200_000
    output: str = "json"            # json | table | csv
    threads: int = field(default_factory=lambda: _threads_from_env())

    def __post_init__(self):
        for name in ("float_eq", "integrality", "ode", "matching",
                     "rank_threshold", "direction_merge"):
            if getattr(self, name) <= 0:
                raise ValueError(f"tolerance {name} must be > 0")
        if self.output not in ("json", "table", "csv"):
            raise ValueError(f"unknown output format {self.output!r}")

    def replace(self, **kw) -> "RunConfig":
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(kw)
        return RunConfig(**current)


def _threads_from_env() -> int:
    raw = os.environ.get("STOKESLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


DEFAULT = RunConfig()
