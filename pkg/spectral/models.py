"""
Data models for the spectral computations.
Bond systems, secular polynomial values and tables, eigenvalue records and
trace vectors.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from graph.models import MetricGraph


class Regularity(Enum):
    """Position of a torus point relative to the secular manifold."""
    OFF_MANIFOLD = "off_manifold"
    REGULAR = "regular"
    SINGULAR = "singular"


class SymmetryKind(Enum):
    """Symmetry type of a trace vector."""
    GENERIC = "generic"
    LOOP_SUPPORTED = "loop_supported"
    LOOP_SYMMETRIC = "loop_symmetric"
    MANDARIN_SYMMETRIC = "mandarin_symmetric"
    MANDARIN_ANTISYMMETRIC = "mandarin_antisymmetric"


@dataclass(frozen=True, eq=False)
class BondSystem:
    """Directed-bond description of a graph.

    Edge j owns the forward bond j (increasing t_j) and the reverse bond N+j.
    S, J and M do not depend on lengths or on k.
    """
    graph: MetricGraph
    S: np.ndarray
    J: np.ndarray
    M: np.ndarray
    trace_order: np.ndarray
    vertex_projector: np.ndarray
    reversed_convention: bool = False

    @property
    def n_edges(self) -> int:
        return self.graph.n_edges

    @property
    def bond_index(self) -> Dict[int, Tuple[int, int]]:
        n = self.n_edges
        return {j: (j, n + j) for j in range(n)}

    @property
    def M_edge(self) -> np.ndarray:
        """M with rows reordered to the per-edge (A_j, B_j, C_j, D_j) layout."""
        return self.M[self.trace_order]


@dataclass(frozen=True, eq=False)
class SecularValue:
    """P_Γ and its gradient at a point, with the manifold classification."""
    z: np.ndarray
    value: complex
    gradient: np.ndarray
    regularity: Regularity
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True, eq=False)
class PolyTable:
    """Monomial coefficients of a polynomial of degree at most 2 in each variable.

    coefficients[d_1, ..., d_N] is the coefficient of z_1^d_1 ... z_N^d_N.
    """
    n_edges: int
    coefficients: np.ndarray

    def evaluate(self, z) -> complex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        value = self.coefficients
        # contract the last axis first so the remaining axes keep their order
        for j in reversed(range(self.n_edges)):
            powers = np.array([1.0, z[j], z[j] ** 2], dtype=complex)
            value = value @ powers
        return complex(value)

    def to_dict(self, cutoff: float = 1e-12) -> Dict[Tuple[int, ...], complex]:
        """Sparse view: multi-degree -> coefficient, dropping entries below cutoff."""
        scale = max(float(np.abs(self.coefficients).max()), 1.0)
        table = {}
        for degrees in itertools.product(range(3), repeat=self.n_edges):
            c = complex(self.coefficients[degrees])
            if abs(c) > cutoff * scale:
                table[degrees] = c
        return table

    def degree_in(self, j: int, cutoff: float = 1e-10) -> int:
        """Degree of the polynomial in z_j."""
        moved = np.moveaxis(self.coefficients, j, 0)
        scale = max(float(np.abs(self.coefficients).max()), 1.0)
        for d in (2, 1):
            if np.abs(moved[d]).max() > cutoff * scale:
                return d
        return 0


@dataclass
class FactorizationReport:
    """Numerical verification of the secular polynomial factorizations."""
    graph_name: str
    n_edges: int
    samples: int
    seed: int
    loop_remainders: Dict[int, float] = field(default_factory=dict)
    mandarin_constant: Optional[complex] = None
    mandarin_deviation: Optional[float] = None
    flower_constant: Optional[complex] = None
    flower_deviation: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def pair(c: Optional[complex]):
            return None if c is None else [c.real, c.imag]

        return {
            "graph": self.graph_name,
            "n_edges": self.n_edges,
            "samples": self.samples,
            "seed": self.seed,
            "loop_remainders": {str(j): r for j, r in sorted(self.loop_remainders.items())},
            "mandarin_constant": pair(self.mandarin_constant),
            "mandarin_deviation": self.mandarin_deviation,
            "flower_constant": pair(self.flower_constant),
            "flower_deviation": self.flower_deviation,
            "notes": list(self.notes),
        }


@dataclass(frozen=True, eq=False)
class EigenvalueRecord:
    """One eigenvalue k (square root of the Laplacian eigenvalue) with its kernel."""
    k: float
    multiplicity: int
    kernel_basis: np.ndarray
    residual: float

    @property
    def is_simple(self) -> bool:
        return self.multiplicity == 1


@dataclass
class SpectrumWindow:
    """All eigenvalues in (k_min, k_max], ordered and counted with multiplicity."""
    lengths: Tuple[float, ...]
    k_min: float
    k_max: float
    records: List[EigenvalueRecord] = field(default_factory=list)

    @property
    def total_count(self) -> int:
        return sum(r.multiplicity for r in self.records)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    def ks(self, with_multiplicity: bool = True) -> np.ndarray:
        if with_multiplicity:
            return np.array([r.k for r in self.records for _ in range(r.multiplicity)])
        return np.array([r.k for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True, eq=False)
class TraceVector:
    """Scale-invariant trace: per edge (A_j, B_j, C_j, D_j) with its base point z.

    x is stored flat in the per-edge layout (A_0, B_0, C_0, D_0, A_1, ...).
    """
    z: np.ndarray
    x: np.ndarray
    k: Optional[float] = None

    @property
    def n_edges(self) -> int:
        return len(self.z)

    def per_edge(self) -> np.ndarray:
        """Array of shape (N, 4) with rows (A_j, B_j, C_j, D_j)."""
        return self.x.reshape(-1, 4)

    def edge(self, j: int) -> Tuple[complex, complex, complex, complex]:
        a, b, c, d = self.per_edge()[j]
        return complex(a), complex(b), complex(c), complex(d)


@dataclass(frozen=True)
class SymmetryClass:
    """Symmetry type of a trace with the tolerance used to decide it."""
    kind: SymmetryKind
    edge: Optional[int] = None
    tolerance: float = 1e-7

    def __str__(self) -> str:
        if self.kind == SymmetryKind.LOOP_SUPPORTED:
            return f"{self.kind.value}({self.edge})"
        return self.kind.value


@dataclass(frozen=True, eq=False)
class TraceResiduals:
    """Residuals of the vertex and edge equations for a candidate trace."""
    vertex: float
    edge_equation_1: np.ndarray
    edge_equation_2: np.ndarray
    norm_mismatch: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(max(self.vertex, self.edge_equation_1.max(initial=0.0),
                         self.edge_equation_2.max(initial=0.0),
                         self.norm_mismatch.max(initial=0.0)))


@dataclass(frozen=True)
class WeylReport:
    """Eigenvalue count against the leading Weyl term (L/pi) k_max."""
    count: int
    predicted: float
    deviation: float
    bound: float
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "predicted": self.predicted,
            "deviation": self.deviation,
            "bound": self.bound,
            "flagged": self.flagged,
        }
