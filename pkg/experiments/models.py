"""
Data models for the statistical experiments.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple


class Property(Enum):
    """Per-eigenvalue properties measured by the genericity experiments."""
    SIMPLE = "simple"
    NONVANISHING = "nonvanishing"
    LOOP_SUPPORTED = "loop_supported"
    FULL_SUPPORT = "full_support"
    COMMON_SPECTRUM = "common_spectrum"


@dataclass
class DensityReport:
    """Fraction of eigenvalues in a window with (or failing) a property.

    For simple, nonvanishing and full_support the count is of failures; for
    loop_supported and common_spectrum it is of occurrences.
    """
    property_name: str
    graphs: Tuple[str, ...]
    lengths: Tuple[float, ...]
    seed: Optional[int]
    k_min: float
    k_max: float
    total: int
    count: int
    offenders: List[float] = field(default_factory=list)
    wilson: Optional[Tuple[float, float]] = None
    expected: Optional[float] = None
    matched_pairs: List[Tuple[float, float]] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)

    MAX_OFFENDERS = 50

    def __post_init__(self):
        if not 0 <= self.count <= max(self.total, 0):
            raise ValueError(f"count {self.count} outside [0, {self.total}]")

    @property
    def fraction(self) -> float:
        return self.count / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "property": self.property_name,
            "graphs": list(self.graphs),
            "lengths": list(self.lengths),
            "seed": self.seed,
            "window": [self.k_min, self.k_max],
            "total": self.total,
            "count": self.count,
            "fraction": self.fraction,
            "wilson_95": None if self.wilson is None else list(self.wilson),
            "expected": self.expected,
            "offenders": list(self.offenders[:self.MAX_OFFENDERS]),
            "matched_pairs": [list(p) for p in self.matched_pairs[:self.MAX_OFFENDERS]],
            "tolerances": dict(self.tolerances),
        }
