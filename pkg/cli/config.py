"""
Run configuration for the command line.
Every numeric threshold lives in Tolerances with its default and is echoed
into the reports.
"""

import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

from experiments.density import MATCH_TOL
from spectral.secular import SINGULAR_TOL
from spectral.solver import K_TOL, MAX_EXPECTED, MERGE_TOL
from spectral.traces import CLASSIFY_TOL, NONVANISHING_TOL, SUPPORT_TOL

COMMANDS = ("solve", "trace", "verify-factor", "expand", "density", "compare", "info")
FORMATS = ("csv", "report")


def default_workers() -> int:
    """Worker count from $QGRAPH_WORKERS (default 1)."""
    try:
        return max(1, int(os.environ.get("QGRAPH_WORKERS", 1)))
    except ValueError:
        return 1


@dataclass
class Tolerances:
    """Numeric thresholds. onmanifold=None means 1e-10 * 2N."""
    onmanifold: Optional[float] = None
    singular: float = SINGULAR_TOL
    classify: float = CLASSIFY_TOL
    nonvanishing: float = NONVANISHING_TOL
    support: float = SUPPORT_TOL
    match: float = MATCH_TOL
    merge: float = MERGE_TOL
    k_accuracy: float = K_TOL
    max_expected: int = MAX_EXPECTED

    def as_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def describe() -> str:
        """One line per default, for --help."""
        defaults = Tolerances().as_dict()
        defaults["onmanifold"] = "1e-10*2N"
        return ", ".join(f"{name}={value}" for name, value in defaults.items())


@dataclass
class RunConfig:
    """Everything one CLI invocation needs; randomness flows only through seed."""
    command: str
    graphs: List[str] = field(default_factory=list)
    lengths: Optional[Tuple[float, ...]] = None
    length_range: Tuple[float, float] = (1.0, 2.0)
    k_min: float = 1e-6
    k_max: float = 10.0
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: Optional[str] = None
    format: str = "csv"
    workers: int = field(default_factory=default_workers)
    k: Optional[float] = None
    index: Optional[int] = None
    property: str = "simple"
    samples: int = 10_000

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command '{self.command}'")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format '{self.format}'")

    def as_dict(self) -> dict:
        data = asdict(self)
        data["lengths"] = None if self.lengths is None else list(self.lengths)
        data["length_range"] = list(self.length_range)
        return data
