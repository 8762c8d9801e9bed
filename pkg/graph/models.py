"""
Core data models for metric graphs.
Defines the graph, its edges and the structural classification using
dataclasses and enums.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx
import numpy as np

from spectral.errors import GraphValidationError


class ViolationReason(Enum):
    """Reasons a graph fails the standing assumption."""
    DEGREE_TWO_VERTEX = "degree-two vertex"
    SINGLE_CYCLE = "single cycle"
    DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class Edge:
    """An edge with a fixed orientation: arc length runs from tail (t=0) to head (t=length)."""
    id: int
    tail: str
    head: str

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class MetricGraph:
    """A connected combinatorial graph with a positive length on every edge.

    Edge ids are 0..N-1 and fix the coordinate order of z and lengths everywhere.
    Multi-edges and loops are allowed; a loop adds two to the degree of its vertex.
    """
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    lengths: Tuple[float, ...]
    name: str = "graph"

    def __post_init__(self):
        """Normalise containers to tuples and validate the graph invariants."""
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        ok, reasons = self.validate()
        if not ok:
            raise GraphValidationError(reasons[0], reasons)

    def validate(self) -> Tuple[bool, List[str]]:
        """Check every invariant, returning all problems found."""
        reasons: List[str] = []
        if not self.vertices:
            reasons.append("graph has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            reasons.append("duplicate vertex identifier")
        if not self.edges:
            reasons.append("graph has no edges")
        if len(self.lengths) != len(self.edges):
            reasons.append("one length per edge is required")

        ids = [e.id for e in self.edges]
        if sorted(ids) != list(range(len(self.edges))) or ids != sorted(ids):
            reasons.append("edge ids must be 0..N-1 in order")

        known = set(self.vertices)
        for edge in self.edges:
            for end in (edge.tail, edge.head):
                if end not in known:
                    reasons.append(f"unknown vertex reference '{end}' on edge {edge.id}")

        for j, length in enumerate(self.lengths):
            if not np.isfinite(length) or length <= 0:
                reasons.append(f"non-positive length {length} on edge {j}")

        if not reasons and not nx.is_connected(self.to_networkx()):
            reasons.append("disconnected graph")

        return not reasons, reasons

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @property
    def length_array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)

    def to_networkx(self) -> nx.MultiGraph:
        """Undirected multigraph view; networkx counts a self-loop twice in the degree."""
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for edge in self.edges:
            g.add_edge(edge.tail, edge.head, key=edge.id)
        return g

    def degrees(self) -> Dict[str, int]:
        """Vertex degrees with loops counted twice."""
        deg = {v: 0 for v in self.vertices}
        for edge in self.edges:
            deg[edge.tail] += 1
            deg[edge.head] += 1
        return deg

    def degree(self, vertex: str) -> int:
        return self.degrees()[vertex]

    def __str__(self) -> str:
        return f"{self.name} ({len(self.vertices)} vertices, {self.n_edges} edges, L={self.total_length:.6g})"


@dataclass(frozen=True)
class GraphClass:
    """Structural flags of a graph relevant to the secular polynomial factorization."""
    satisfies_assumption: bool
    violation_reasons: Tuple[str, ...] = ()
    loop_edges: FrozenSet[int] = field(default_factory=frozenset)
    is_mandarin: bool = False
    is_flower: bool = False
    reflection_symmetries: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "satisfies_assumption": self.satisfies_assumption,
            "violation_reasons": list(self.violation_reasons),
            "loop_edges": sorted(self.loop_edges),
            "is_mandarin": self.is_mandarin,
            "is_flower": self.is_flower,
            "reflection_symmetries": list(self.reflection_symmetries),
        }
