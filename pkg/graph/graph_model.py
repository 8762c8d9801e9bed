"""
Graph documents, structural classification and the named graph families.
Handles loading, validation against the standing assumption and building
the graphs used by the experiments.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Set, Tuple

from graph.models import Edge, GraphClass, MetricGraph, ViolationReason
from spectral.errors import GraphValidationError

logger = logging.getLogger(__name__)


def load_graph(text: str, name: str = "graph") -> MetricGraph:
    """Parse a graph description document (JSON) into a validated MetricGraph."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphValidationError(f"parse failure: {e}") from e

    if not isinstance(data, dict):
        raise GraphValidationError("parse failure: document must be an object")

    return _graph_from_data(data, name)


def load_graph_file(path: str) -> MetricGraph:
    """Load a graph document from disk; the file stem becomes the graph name."""
    graph_path = Path(path)
    if not graph_path.exists():
        raise FileNotFoundError(f"Graph file not found: {path}")

    with open(graph_path, "r") as f:
        graph = load_graph(f.read(), name=graph_path.stem)

    logger.info(f"Loaded {graph} from {path}")
    return graph


def _graph_from_data(data: Dict[str, Any], name: str) -> MetricGraph:
    """Create a MetricGraph from decoded document data."""
    vertices = data.get("vertices")
    edges_data = data.get("edges")
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise GraphValidationError("parse failure: 'vertices' must be a list of strings")
    if not isinstance(edges_data, list) or not edges_data:
        raise GraphValidationError("parse failure: 'edges' must be a non-empty list")

    records = []
    for record in edges_data:
        try:
            records.append((int(record["id"]), str(record["tail"]), str(record["head"]),
                            float(record["length"])))
        except (KeyError, TypeError, ValueError) as e:
            raise GraphValidationError(f"parse failure: bad edge record {record!r}") from e

    ids = [r[0] for r in records]
    if sorted(ids) != list(range(len(records))):
        raise GraphValidationError(f"edge ids must be 0..{len(records) - 1}, got {ids}")

    records.sort(key=lambda r: r[0])
    edges = tuple(Edge(id=r[0], tail=r[1], head=r[2]) for r in records)
    lengths = tuple(r[3] for r in records)
    return MetricGraph(vertices=tuple(vertices), edges=edges, lengths=lengths,
                       name=str(data.get("name", name)))


def dump_graph(g: MetricGraph) -> str:
    """Serialize a graph to its document form (inverse of load_graph)."""
    data = {
        "name": g.name,
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "length": float(length)}
            for e, length in zip(g.edges, g.lengths)
        ],
    }
    return json.dumps(data, indent=2)


def classify(g: MetricGraph) -> GraphClass:
    """Compute the structural flags of a graph. Total and deterministic."""
    degrees = g.degrees()
    loop_edges = frozenset(e.id for e in g.edges if e.is_loop)

    reasons: List[str] = []
    if any(d == 2 for d in degrees.values()):
        reasons.append(ViolationReason.DEGREE_TWO_VERTEX.value)
    if all(d == 2 for d in degrees.values()):
        reasons.append(ViolationReason.SINGLE_CYCLE.value)

    is_flower = len(g.vertices) == 1 and len(loop_edges) == g.n_edges
    is_mandarin = (len(g.vertices) == 2 and not loop_edges and g.n_edges >= 2)

    symmetries: Tuple[str, ...] = ()
    if is_mandarin:
        symmetries = ("mandarin",)
    elif loop_edges:
        symmetries = tuple(f"loop:{j}" for j in sorted(loop_edges))

    return GraphClass(
        satisfies_assumption=not reasons,
        violation_reasons=tuple(reasons),
        loop_edges=loop_edges,
        is_mandarin=is_mandarin,
        is_flower=is_flower,
        reflection_symmetries=symmetries,
    )


def leaf_endpoints(g: MetricGraph) -> Set[Tuple[int, str]]:
    """Edge ends ("tail"/"head") that sit on a degree-one vertex."""
    degrees = g.degrees()
    ends: Set[Tuple[int, str]] = set()
    for edge in g.edges:
        if degrees[edge.tail] == 1:
            ends.add((edge.id, "tail"))
        if degrees[edge.head] == 1:
            ends.add((edge.id, "head"))
    return ends


def with_lengths(g: MetricGraph, lengths: Sequence[float]) -> MetricGraph:
    """Same combinatorial graph with new edge lengths."""
    if len(lengths) != g.n_edges:
        raise GraphValidationError(f"expected {g.n_edges} lengths, got {len(lengths)}")
    return MetricGraph(vertices=g.vertices, edges=g.edges, lengths=tuple(lengths), name=g.name)


def scaled(g: MetricGraph, r: float) -> MetricGraph:
    """Scale every edge length by r > 0."""
    return with_lengths(g, [r * x for x in g.lengths])


def _build(name: str, vertices: List[str], ends: List[Tuple[str, str]],
           lengths: Sequence[float]) -> MetricGraph:
    if len(lengths) != len(ends):
        raise GraphValidationError(f"{name} needs {len(ends)} lengths, got {len(lengths)}")
    edges = tuple(Edge(id=j, tail=t, head=h) for j, (t, h) in enumerate(ends))
    return MetricGraph(vertices=tuple(vertices), edges=edges, lengths=tuple(lengths), name=name)


def interval(length: float = math.pi) -> MetricGraph:
    """A single edge v0 -> v1."""
    return _build("interval", ["v0", "v1"], [("v0", "v1")], [length])


def star(lengths: Sequence[float]) -> MetricGraph:
    """Star with center 'c'; edge j runs from the center to leaf u{j}."""
    leaves = [f"u{j}" for j in range(len(lengths))]
    return _build(f"star{len(lengths)}", ["c"] + leaves, [("c", u) for u in leaves], lengths)


def mandarin(lengths: Sequence[float]) -> MetricGraph:
    """Two vertices joined by every edge, all oriented v0 -> v1."""
    return _build(f"mandarin{len(lengths)}", ["v0", "v1"],
                  [("v0", "v1")] * len(lengths), lengths)


def flower(lengths: Sequence[float]) -> MetricGraph:
    """One vertex with every edge a loop."""
    return _build(f"flower{len(lengths)}", ["v"], [("v", "v")] * len(lengths), lengths)


def lasso(loop_length: float, tail_length: float) -> MetricGraph:
    """Loop (edge 0) at v with a pendant tail (edge 1) v -> u."""
    return _build("lasso", ["v", "u"], [("v", "v"), ("v", "u")], [loop_length, tail_length])


def lasso_split_tail(lengths: Sequence[float]) -> MetricGraph:
    """Lasso whose tail splits at u into two pendant edges (4 edges, loop is edge 0)."""
    return _build("lasso_split_tail", ["v", "u", "w1", "w2"],
                  [("v", "v"), ("v", "u"), ("u", "w1"), ("u", "w2")], lengths)


def lasso_fan(lengths: Sequence[float]) -> MetricGraph:
    """Loop (edge 0) at v with len(lengths)-1 pendant edges from v."""
    pendants = [f"u{j}" for j in range(1, len(lengths))]
    return _build(f"lasso_fan{len(lengths)}", ["v"] + pendants,
                  [("v", "v")] + [("v", u) for u in pendants], lengths)


def dumbbell(lengths: Sequence[float]) -> MetricGraph:
    """Loops at v (edge 0) and u (edge 1) joined by the bar v -> u (edge 2)."""
    return _build("dumbbell", ["v", "u"], [("v", "v"), ("u", "u"), ("v", "u")], lengths)


def cycle(lengths: Sequence[float]) -> MetricGraph:
    """A ring of len(lengths) vertices; always violates the standing assumption."""
    n = len(lengths)
    vertices = [f"v{j}" for j in range(n)]
    return _build(f"cycle{n}", vertices,
                  [(vertices[j], vertices[(j + 1) % n]) for j in range(n)], lengths)
