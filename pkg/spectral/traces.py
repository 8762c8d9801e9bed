"""
Scale-invariant traces of eigenfunctions.
A kernel vector a of I - U(z) lifts to the trace x = M a with per-edge entries
(A_j, B_j, C_j, D_j): Dirichlet value and k-normalized outgoing derivative at
the start and at the end of edge j.
"""

import logging
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from graph.graph_model import classify, leaf_endpoints
from graph.models import GraphClass, MetricGraph
from spectral.errors import (EmptyFiberError, SupportInconsistencyError,
                             UnclassifiedTraceError)
from spectral.linalg import kernel
from spectral.models import (BondSystem, EigenvalueRecord, SymmetryClass,
                             SymmetryKind, TraceResiduals, TraceVector)
from spectral.scattering import evaluate_U
from spectral.secular import on_manifold_tol, secular_gradient

logger = logging.getLogger(__name__)

CLASSIFY_TOL = 1e-7
NONVANISHING_TOL = 1e-6
SUPPORT_TOL = 1e-6
SIGNIFICANT = 1e-8


def normalize(x: np.ndarray) -> np.ndarray:
    """Unit norm with the first significant entry rotated to the positive real axis."""
    x = np.asarray(x, dtype=complex)
    x = x / np.linalg.norm(x)
    first = np.flatnonzero(np.abs(x) > SIGNIFICANT * np.abs(x).max())[0]
    return x * (abs(x[first]) / x[first])


def realify(vectors: np.ndarray) -> np.ndarray:
    """Rotate a fiber basis (columns) to real vectors when the fiber admits one."""
    d = vectors.shape[1]
    if d == 1:
        x = vectors[:, 0]
        phase = np.exp(-0.5j * np.angle(np.sum(x * x)))
        return (x * phase)[:, None]

    stacked = np.hstack([vectors.real, vectors.imag])
    u, s, _ = linalg.svd(stacked, full_matrices=False)
    real_basis = u[:, :d].astype(complex)
    # the real span must reproduce the complex span
    leak = np.linalg.norm(vectors - real_basis @ (real_basis.conj().T @ vectors))
    if leak > 1e-8:
        logger.debug(f"Fiber of dimension {d} has no real basis to precision {leak:.3g}")
        return vectors
    return real_basis


def traces_from_kernel(bs: BondSystem, z, basis: np.ndarray,
                       k: Optional[float] = None) -> List[TraceVector]:
    """Trace basis {M a} for an orthonormal kernel basis of I - U(z)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if basis.shape[1] == 0:
        raise EmptyFiberError(f"empty fiber at z={z}")
    lifted = linalg.orth(bs.M_edge @ basis)
    lifted = realify(lifted)
    return [TraceVector(z=z, x=normalize(lifted[:, i]), k=k) for i in range(lifted.shape[1])]


def kernel_traces(bs: BondSystem, z, tol_onmanifold: Optional[float] = None,
                  k: Optional[float] = None) -> List[TraceVector]:
    """A basis of the trace fiber over z; its size is the eigenvalue multiplicity."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    tol = on_manifold_tol(bs.n_edges) if tol_onmanifold is None else tol_onmanifold
    basis = kernel(np.eye(2 * bs.n_edges) - evaluate_U(bs, z), tol)
    if basis.shape[1] == 0:
        raise EmptyFiberError(f"empty fiber: z={z} is off the secular manifold")
    return traces_from_kernel(bs, z, basis, k)


def record_traces(bs: BondSystem, lengths: Sequence[float], record: EigenvalueRecord) -> List[TraceVector]:
    """Traces of a solved eigenvalue, reusing the solver's kernel basis."""
    z = np.exp(1j * record.k * np.asarray(lengths, dtype=float))
    return traces_from_kernel(bs, z, record.kernel_basis, record.k)


def trace_residuals(bs: BondSystem, z, x) -> TraceResiduals:
    """Vertex condition, both edge equations and per-edge norm balance of a candidate trace."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x = np.asarray(x, dtype=complex)
    a, b, c, d = x.reshape(-1, 4).T
    return TraceResiduals(
        vertex=float(np.linalg.norm(bs.vertex_projector @ x)),
        edge_equation_1=np.abs(a + 1j * b - z * (c - 1j * d)),
        edge_equation_2=np.abs(c + 1j * d - z * (a - 1j * b)),
        norm_mismatch=np.abs(np.hypot(np.abs(a), np.abs(b)) - np.hypot(np.abs(c), np.abs(d))),
    )


def _check_position(g: MetricGraph, j: int, s: float):
    if not 0 <= j < g.n_edges:
        raise ValueError(f"unknown edge {j}")
    if s < 0 or s > g.lengths[j] * (1 + 1e-12):
        raise ValueError(f"position {s} out of range [0, {g.lengths[j]}] on edge {j}")


def eigenfunction_eval(g: MetricGraph, t: TraceVector, k: float, j: int, s: float,
                       from_end: bool = False) -> complex:
    """f on edge j at arc length s.

    The start form is A cos(ks) + B sin(ks); the end form is
    C cos(k(l - s)) + D sin(k(l - s)).
    """
    _check_position(g, j, s)
    a, b, c, d = t.edge(j)
    if from_end:
        r = k * (g.lengths[j] - s)
        return c * np.cos(r) + d * np.sin(r)
    return a * np.cos(k * s) + b * np.sin(k * s)


def eigenfunction_derivative(g: MetricGraph, t: TraceVector, k: float, j: int, s: float,
                             from_end: bool = False) -> complex:
    """f'(s)/k on edge j, in the direction of increasing arc length."""
    _check_position(g, j, s)
    a, b, c, d = t.edge(j)
    if from_end:
        r = k * (g.lengths[j] - s)
        return c * np.sin(r) - d * np.cos(r)
    return -a * np.sin(k * s) + b * np.cos(k * s)


def vertex_mismatch(g: MetricGraph, t: TraceVector, k: float) -> Tuple[float, float]:
    """Largest continuity gap and largest outgoing-derivative sum over all vertices."""
    values = {v: [] for v in g.vertices}
    outgoing = {v: 0j for v in g.vertices}
    for edge, length in zip(g.edges, g.lengths):
        values[edge.tail].append(eigenfunction_eval(g, t, k, edge.id, 0.0))
        values[edge.head].append(eigenfunction_eval(g, t, k, edge.id, length))
        outgoing[edge.tail] += eigenfunction_derivative(g, t, k, edge.id, 0.0)
        outgoing[edge.head] -= eigenfunction_derivative(g, t, k, edge.id, length)
    gap = max(float(np.ptp(np.real(vs)) + np.ptp(np.imag(vs))) for vs in values.values())
    flux = max(abs(o) for o in outgoing.values())
    return gap, float(flux)


def _excluded_entries(g: MetricGraph) -> List[int]:
    # Neumann entries at degree-one vertices vanish for every eigenfunction
    return sorted(4 * j + (1 if end == "tail" else 3) for j, end in leaf_endpoints(g))


def nonvanishing_test(g: MetricGraph, t: TraceVector,
                      threshold: float = NONVANISHING_TOL) -> Tuple[bool, float]:
    """True iff every entry outside the leaf Neumann entries exceeds threshold.

    Also returns the smallest magnitude among the entries considered.
    """
    mask = np.ones(len(t.x), dtype=bool)
    mask[_excluded_entries(g)] = False
    smallest = float(np.abs(t.x[mask]).min())
    return smallest > threshold, smallest


def classify_symmetry(g: MetricGraph, t: TraceVector, tol: float = CLASSIFY_TOL,
                      simple: bool = True, graph_class: Optional[GraphClass] = None) -> SymmetryClass:
    """Symmetry type of a trace under the reflection symmetries of its graph."""
    graph_class = graph_class or classify(g)
    rows = t.per_edge()
    start, end = rows[:, :2], rows[:, 2:]

    if graph_class.is_mandarin:
        # read every edge in the orientation of edge 0
        flipped = [e.id for e in g.edges if e.tail != g.edges[0].tail]
        start, end = start.copy(), end.copy()
        start[flipped], end[flipped] = rows[flipped, 2:], rows[flipped, :2]
        if np.abs(start - end).max() <= tol:
            return SymmetryClass(SymmetryKind.MANDARIN_SYMMETRIC, tolerance=tol)
        if np.abs(start + end).max() <= tol:
            return SymmetryClass(SymmetryKind.MANDARIN_ANTISYMMETRIC, tolerance=tol)
        if simple:
            raise UnclassifiedTraceError(
                f"unclassified mandarin trace at k={t.k}: neither symmetric nor antisymmetric "
                f"(gaps {np.abs(start - end).max():.3g}, {np.abs(start + end).max():.3g})")
        return SymmetryClass(SymmetryKind.GENERIC, tolerance=tol)

    if graph_class.loop_edges:
        for j in sorted(graph_class.loop_edges):
            off = np.delete(rows, j, axis=0)
            a, b, c, d = rows[j]
            if (np.abs(off).max(initial=0.0) <= tol and abs(a) <= tol and abs(c) <= tol
                    and abs(b + d) <= tol):
                return SymmetryClass(SymmetryKind.LOOP_SUPPORTED, edge=j, tolerance=tol)
        loops = sorted(graph_class.loop_edges)
        if np.abs(start[loops] - end[loops]).max() <= tol:
            return SymmetryClass(SymmetryKind.LOOP_SYMMETRIC, tolerance=tol)

    return SymmetryClass(SymmetryKind.GENERIC, tolerance=tol)


def _support_fractions(bs: BondSystem, z, t: TraceVector,
                       gradient: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    rows = t.per_edge()
    weight = np.abs(rows[:, 0]) ** 2 + np.abs(rows[:, 1]) ** 2
    amplitude = weight / weight.sum()
    if gradient is None:
        gradient = secular_gradient(bs, z)
    magnitude = np.abs(gradient)
    total = magnitude.sum()
    grad = magnitude / total if total > 0 else np.zeros_like(magnitude)
    return amplitude, grad


def edge_support(bs: BondSystem, z, t: TraceVector, tol: float = SUPPORT_TOL,
                 gradient: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-edge flags, True where the eigenfunction vanishes identically on the edge.

    The amplitude share (|A_j|^2 + |B_j|^2) / sum and the gradient share
    |dP/dz_j| / sum |dP/dz_i| coincide at regular points; both are compared
    against tol**2 and must agree.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    amplitude, grad = _support_fractions(bs, z, t, gradient)
    by_amplitude = amplitude <= tol ** 2
    if not grad.any():
        logger.debug(f"Gradient vanishes at z={z}; support from amplitudes only")
        return by_amplitude
    by_gradient = grad <= tol ** 2
    disagree = np.flatnonzero(by_amplitude != by_gradient)
    if disagree.size:
        raise SupportInconsistencyError(
            f"support tests inconsistent on edges {disagree.tolist()}: amplitude shares "
            f"{amplitude[disagree]}, gradient shares {grad[disagree]}", disagree.tolist())
    return by_amplitude


def is_full_support(bs: BondSystem, z, tol: float = SUPPORT_TOL,
                    gradient: Optional[np.ndarray] = None) -> bool:
    """Every partial derivative of P at z is nonzero."""
    if gradient is None:
        gradient = secular_gradient(bs, z)
    magnitude = np.abs(gradient)
    total = magnitude.sum()
    return bool(total > 0 and (magnitude / total > tol ** 2).all())


def mandarin_symmetric_trace(z, k: Optional[float] = None) -> TraceVector:
    """Closed-form symmetric mandarin trace: A_j = C_j = 1, B_j = D_j = -i(z_j - 1)/(z_j + 1).

    Lies in the fiber exactly when the symmetric mandarin factor vanishes at z.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.abs(z + 1).min() < 1e-12:
        raise ValueError("symmetric mandarin trace needs every z_j != -1")
    b = -1j * (z - 1) / (z + 1)
    x = np.column_stack([np.ones_like(z), b, np.ones_like(z), b]).ravel()
    return TraceVector(z=z, x=normalize(x), k=k)


def support_torus(bs: BondSystem, t: TraceVector, tol: float = SUPPORT_TOL, samples: int = 8,
                  seed: int = 0) -> Tuple[FrozenSet[int], float]:
    """Supported edges of a trace and the worst residual over the torus it spans.

    Unsupported coordinates of z are replaced by random torus values; the
    trace must stay in the fiber.
    """
    rows = t.per_edge()
    weight = np.abs(rows).max(axis=1)
    supported = frozenset(int(j) for j in np.flatnonzero(weight > tol))
    free = [j for j in range(t.n_edges) if j not in supported]
    rng = np.random.default_rng(seed)
    worst = trace_residuals(bs, t.z, t.x).max_residual
    for _ in range(samples if free else 0):
        z = t.z.copy()
        z[free] = np.exp(2j * np.pi * rng.random(len(free)))
        worst = max(worst, trace_residuals(bs, z, t.x).max_residual)
    return supported, worst
