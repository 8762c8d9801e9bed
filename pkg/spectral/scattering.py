"""
Bond scattering matrix S, bond reversal J and the trace-lift matrix M.
S is built from the standard vertex-scattering rule and pinned to the
amplitude convention by self-checks before it is handed out.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from graph.graph_model import interval
from graph.models import MetricGraph
from spectral.errors import ConventionError
from spectral.models import BondSystem

logger = logging.getLogger(__name__)

CHECK_TOL = 1e-12


def bond_ends(g: MetricGraph) -> Tuple[List[str], List[str]]:
    """Origin and terminus vertex of every bond (forward bond j, reverse bond N+j)."""
    origin = [e.tail for e in g.edges] + [e.head for e in g.edges]
    terminus = [e.head for e in g.edges] + [e.tail for e in g.edges]
    return origin, terminus


def reversal_matrix(n_edges: int) -> np.ndarray:
    """J: swaps the forward and reverse blocks."""
    eye = np.eye(n_edges)
    zero = np.zeros((n_edges, n_edges))
    return np.block([[zero, eye], [eye, zero]])


def trace_layout(n_edges: int) -> np.ndarray:
    """Row permutation from M's order (A.., C.., B.., D..) to per-edge (A_j, B_j, C_j, D_j)."""
    n = n_edges
    return np.array([row for j in range(n) for row in (j, 2 * n + j, n + j, 3 * n + j)])


def vertex_scattering(g: MetricGraph) -> np.ndarray:
    """S[beta, alpha] = 2/deg(v) - [beta reverses alpha] when alpha ends and beta starts at v."""
    n = g.n_edges
    degrees = g.degrees()
    origin, terminus = bond_ends(g)
    s = np.zeros((2 * n, 2 * n))
    for alpha in range(2 * n):
        v = terminus[alpha]
        reverse = (alpha + n) % (2 * n)
        for beta in range(2 * n):
            if origin[beta] == v:
                s[beta, alpha] = 2.0 / degrees[v] - (1.0 if beta == reverse else 0.0)
    return s


def vertex_projector(g: MetricGraph) -> np.ndarray:
    """P_std (2N x 4N, per-edge layout): continuity and balanced derivatives at every vertex."""
    n = g.n_edges
    incidences: Dict[str, List[Tuple[int, str]]] = {v: [] for v in g.vertices}
    for edge in g.edges:
        incidences[edge.tail].append((edge.id, "tail"))
        incidences[edge.head].append((edge.id, "head"))

    rows = []
    for v in g.vertices:
        ends = incidences[v]
        dirichlet = [4 * j + (0 if end == "tail" else 2) for j, end in ends]
        neumann = [4 * j + (1 if end == "tail" else 3) for j, end in ends]
        for first, second in zip(dirichlet, dirichlet[1:]):
            row = np.zeros(4 * n)
            row[first], row[second] = 1.0, -1.0
            rows.append(row)
        row = np.zeros(4 * n)
        for col in neumann:
            row[col] += 1.0
        rows.append(row)
    return np.array(rows)


def evaluate_U(bs: BondSystem, z) -> np.ndarray:
    """U(z) = diag(z, z) S. Unitary when z lies on the torus."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.concatenate([z, z])[:, None] * bs.S


def loop_vector(bs: BondSystem, j: int) -> np.ndarray:
    """Forward amplitude +1 and reverse amplitude -1 on loop j."""
    forward, reverse = bs.bond_index[j]
    a = np.zeros(2 * bs.n_edges, dtype=complex)
    a[forward], a[reverse] = 1.0, -1.0
    return a


def _check_convention(bs: BondSystem) -> Tuple[bool, str]:
    """Orthogonality, loop eigenvectors and the Neumann interval spectrum."""
    n = bs.n_edges
    if np.abs(bs.S @ bs.S.T - np.eye(2 * n)).max() > CHECK_TOL:
        return False, "S is not orthogonal"

    rng = np.random.default_rng(0)
    z = np.exp(2j * np.pi * rng.random(n))
    u = evaluate_U(bs, z)
    for e in bs.graph.edges:
        if e.is_loop:
            a = loop_vector(bs, e.id)
            if np.abs(u @ a - z[e.id] * a).max() > CHECK_TOL:
                return False, f"loop vector of edge {e.id} is not an eigenvector"

    line = vertex_scattering(interval(np.pi))
    if np.abs(line - np.array([[0.0, 1.0], [1.0, 0.0]])).max() > CHECK_TOL:
        return False, "interval scattering differs from the Neumann reflection"
    for k, expect_zero in ((1.0, True), (2.0, True), (0.5, False)):
        zk = np.exp(1j * k * np.pi)
        p = np.linalg.det(np.eye(2) - zk * line)
        if (abs(p) < 1e-12) != expect_zero:
            return False, f"interval secular value {p:.3g} at k={k} breaks k*l = n*pi"
    return True, "ok"


def _assemble(g: MetricGraph, s: np.ndarray, reversed_convention: bool) -> BondSystem:
    n = g.n_edges
    j_mat = reversal_matrix(n)
    return BondSystem(
        graph=g,
        S=s,
        J=j_mat,
        M=np.vstack([s + j_mat, 1j * (s - j_mat)]),
        trace_order=trace_layout(n),
        vertex_projector=vertex_projector(g),
        reversed_convention=reversed_convention,
    )


def build_bond_scattering(g: MetricGraph) -> BondSystem:
    """Build S, J, M for a graph and verify the amplitude convention."""
    bs = _assemble(g, vertex_scattering(g), False)
    ok, reason = _check_convention(bs)
    if not ok:
        logger.warning(f"Scattering self-check failed ({reason}); trying reversed convention")
        bs = _assemble(g, bs.J @ bs.S @ bs.J, True)
        ok, reason = _check_convention(bs)
        if not ok:
            raise ConventionError(f"scattering convention error: {reason}")
    logger.debug(f"Scattering self-checks passed for {g.name}")
    return bs
