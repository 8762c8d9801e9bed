"""
Spectrum solver for standard-condition quantum graphs.
Eigenvalues are the k > 0 at which an eigenphase of the unitary U(exp(ikl))
crosses 0 mod 2pi. Crossings are counted exactly through the determinant
phase identity and isolated by bisection.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from spectral.errors import GuardExceededError
from spectral.linalg import kernel, smallest_right_vectors
from spectral.models import BondSystem, EigenvalueRecord, SpectrumWindow, WeylReport
from spectral.scattering import evaluate_U
from spectral.secular import on_manifold_tol

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
K_TOL = 1e-11
MERGE_TOL = 1e-9
MAX_EXPECTED = 1_000_000
PHASE_GUARD = 1e-9
ENDPOINT_PAD = 1e-6


def _u_at(bs: BondSystem, lengths: np.ndarray, k: float) -> np.ndarray:
    return evaluate_U(bs, np.exp(1j * k * lengths))


def eigenphases(bs: BondSystem, lengths: Sequence[float], k: float) -> np.ndarray:
    """Sorted phases in [0, 2pi) of the 2N eigenvalues of U(exp(ikl))."""
    lengths = np.asarray(lengths, dtype=float)
    values = np.linalg.eigvals(_u_at(bs, lengths, k))
    return np.sort(np.mod(np.angle(values), TWO_PI))


def phase_speeds(bs: BondSystem, lengths: Sequence[float], k: float) -> np.ndarray:
    """dθ/dk of every eigenphase of U(exp(ikl)), as <v, diag(l, l) v> per unit eigenvector.

    Each speed lies in [min l, max l] and they sum to 2L.
    """
    lengths = np.asarray(lengths, dtype=float)
    _, vectors = np.linalg.eig(_u_at(bs, lengths, k))
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    weights = np.concatenate([lengths, lengths])
    return np.real(np.einsum("ij,i,ij->j", vectors.conj(), weights, vectors))


def _phases_batch(bs: BondSystem, lengths: np.ndarray, ks: np.ndarray) -> np.ndarray:
    z = np.exp(1j * np.outer(ks, lengths))
    diag = np.concatenate([z, z], axis=1)
    values = np.linalg.eigvals(diag[:, :, None] * bs.S[None])
    return np.mod(np.angle(values), TWO_PI)


def _phase_sum(bs: BondSystem, lengths: np.ndarray, k: float) -> float:
    values = np.linalg.eigvals(_u_at(bs, lengths, k))
    return float(np.mod(np.angle(values), TWO_PI).sum())


def _count(total_length: float, ka: float, kb: float, sum_a: float, sum_b: float) -> int:
    # sum of wrapped phases moves by 2L(kb-ka) minus 2pi per crossing of 0
    return int(round((2.0 * total_length * (kb - ka) - (sum_b - sum_a)) / TWO_PI))


def crossing_count(bs: BondSystem, lengths: Sequence[float], k_a: float, k_b: float) -> int:
    """Number of eigenphase crossings of 0 in (k_a, k_b] (no phase may turn fully)."""
    lengths = np.asarray(lengths, dtype=float)
    if (k_b - k_a) * lengths.max() >= TWO_PI:
        raise ValueError("interval too long for a crossing count")
    return _count(lengths.sum(), k_a, k_b, _phase_sum(bs, lengths, k_a), _phase_sum(bs, lengths, k_b))


def determinant_phase_error(bs: BondSystem, lengths: Sequence[float], k: float) -> float:
    """|det U(exp(ikl)) - exp(2ikL) det S|."""
    lengths = np.asarray(lengths, dtype=float)
    lhs = np.linalg.det(_u_at(bs, lengths, k))
    rhs = np.exp(2j * k * lengths.sum()) * np.linalg.det(bs.S)
    return float(abs(lhs - rhs))


def _grid(bs: BondSystem, lengths: np.ndarray, k_lo: float, k_hi: float,
          step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Grid points with their phase sums, nudging points that sit on a crossing.

    The first point moves down and every other point moves up, so the grid
    never shrinks.
    """
    n_steps = max(1, int(math.ceil((k_hi - k_lo) / step)))
    ks = np.linspace(k_lo, k_hi, n_steps + 1)
    phases = _phases_batch(bs, lengths, ks)
    distance = np.minimum(phases, TWO_PI - phases).min(axis=1)
    spacing = (k_hi - k_lo) / n_steps
    for i in np.flatnonzero(distance < PHASE_GUARD):
        nudge = -min(spacing * 1e-3, 0.1 * ks[0]) if i == 0 else spacing * 1e-3
        for attempt in range(1, 6):
            candidate = ks[i] + nudge * attempt * 0.618
            p = np.mod(np.angle(np.linalg.eigvals(_u_at(bs, lengths, candidate))), TWO_PI)
            if np.minimum(p, TWO_PI - p).min() >= PHASE_GUARD:
                logger.debug(f"Nudged grid point {ks[i]:.15g} -> {candidate:.15g}")
                ks[i], phases[i] = candidate, p
                break
    return ks, phases.sum(axis=1)


def _isolate(bs: BondSystem, lengths: np.ndarray, ka: float, kb: float, sum_a: float,
             sum_b: float, count: int, k_tol: float, out: List[Tuple[float, int]]):
    """Bisect (ka, kb] until every crossing sits in an interval narrower than k_tol."""
    total_length = float(lengths.sum())
    stack = [(ka, kb, sum_a, sum_b, count)]
    while stack:
        a, b, sa, sb, c = stack.pop()
        if c <= 0:
            continue
        if b - a <= k_tol:
            out.append((0.5 * (a + b), c))
            continue
        mid = 0.5 * (a + b)
        sm = _phase_sum(bs, lengths, mid)
        left = _count(total_length, a, mid, sa, sm)
        # right half first on the stack so roots come out in ascending order
        stack.append((mid, b, sm, sb, c - left))
        stack.append((a, mid, sa, sm, left))


def _solve_chunk(bs: BondSystem, lengths: np.ndarray, ks: np.ndarray, sums: np.ndarray,
                 k_tol: float) -> List[Tuple[float, int]]:
    total_length = float(lengths.sum())
    roots: List[Tuple[float, int]] = []
    for i in range(len(ks) - 1):
        c = _count(total_length, ks[i], ks[i + 1], sums[i], sums[i + 1])
        if c > 0:
            _isolate(bs, lengths, ks[i], ks[i + 1], sums[i], sums[i + 1], c, k_tol, roots)
    return roots


def _merge(roots: List[Tuple[float, int]], merge_tol: float) -> List[Tuple[float, int]]:
    merged: List[Tuple[float, int]] = []
    for k, c in sorted(roots):
        if merged and k - merged[-1][0] <= merge_tol:
            k0, c0 = merged[-1]
            merged[-1] = ((k0 * c0 + k * c) / (c0 + c), c0 + c)
        else:
            merged.append((k, c))
    return merged


def _record(bs: BondSystem, lengths: np.ndarray, k: float, count: int,
            tol_onmanifold: float) -> EigenvalueRecord:
    a = np.eye(2 * bs.n_edges) - _u_at(bs, lengths, k)
    s, basis = smallest_right_vectors(a, min(count + 1, 2 * bs.n_edges))
    if s[count - 1] > tol_onmanifold or (len(s) > count and s[count] <= tol_onmanifold):
        logger.warning(f"Kernel dimension at k={k:.15g} disagrees with {count} crossings "
                       f"(singular values {s})")
    return EigenvalueRecord(k=float(k), multiplicity=count, kernel_basis=basis[:, :count],
                            residual=float(s[0]))


def solve_spectrum(bs: BondSystem, lengths: Sequence[float], k_min: float, k_max: float,
                   k_tol: float = K_TOL, merge_tol: float = MERGE_TOL,
                   max_expected: int = MAX_EXPECTED, tol_onmanifold: Optional[float] = None,
                   step: Optional[float] = None, workers: int = 1) -> SpectrumWindow:
    """All eigenvalues k in (k_min, k_max] with multiplicities and kernel bases.

    The grid step (pi/2)/max(l) keeps every eigenphase motion per step below
    pi/2, so no crossing can be missed.
    """
    lengths = np.asarray(lengths, dtype=float)
    if len(lengths) != bs.n_edges:
        raise ValueError(f"expected {bs.n_edges} lengths, got {len(lengths)}")
    if not 0 < k_min < k_max:
        raise ValueError(f"window must satisfy 0 < k_min < k_max, got ({k_min}, {k_max}]")

    expected = lengths.sum() / math.pi * (k_max - k_min)
    if expected > max_expected:
        raise GuardExceededError(
            f"window (k_min={k_min}, k_max={k_max}] expects {expected:.0f} eigenvalues "
            f"> guard {max_expected}")

    tol = on_manifold_tol(bs.n_edges) if tol_onmanifold is None else tol_onmanifold
    max_step = 0.5 * math.pi / lengths.max()
    step = max_step if step is None else min(step, max_step)
    # pad both ends so roots sitting exactly on k_min or k_max are bracketed
    pad = min(ENDPOINT_PAD, 0.5 * k_min, 0.25 * step)
    ks, sums = _grid(bs, lengths, k_min - pad, k_max + pad, step)

    n_chunks = max(1, min(workers, len(ks) - 1))
    bounds = np.linspace(0, len(ks) - 1, n_chunks + 1).astype(int)
    chunks = [(bounds[i], bounds[i + 1] + 1) for i in range(n_chunks)]
    if n_chunks == 1:
        parts = [_solve_chunk(bs, lengths, ks, sums, k_tol)]
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            futures = [pool.submit(_solve_chunk, bs, lengths, ks[lo:hi], sums[lo:hi], k_tol)
                       for lo, hi in chunks]
            parts = [f.result() for f in futures]
        logger.debug(f"Solved {n_chunks} subwindows in parallel")

    roots = [(k, c) for k, c in _merge([r for part in parts for r in part], merge_tol)
             if k_min + k_tol < k <= k_max + k_tol]
    records = [_record(bs, lengths, min(k, k_max), c, tol) for k, c in roots]
    window = SpectrumWindow(lengths=tuple(float(x) for x in lengths), k_min=k_min, k_max=k_max,
                            records=records)
    logger.info(f"Solved {bs.graph.name} on ({k_min:g}, {k_max:g}]: "
                f"{len(records)} eigenvalues, {window.total_count} with multiplicity")
    return window


def multiplicity(bs: BondSystem, z, tol_onmanifold: Optional[float] = None) -> Tuple[int, np.ndarray]:
    """Dimension of ker(I - U(z)) and an orthonormal basis of it."""
    tol = on_manifold_tol(bs.n_edges) if tol_onmanifold is None else tol_onmanifold
    basis = kernel(np.eye(2 * bs.n_edges) - evaluate_U(bs, z), tol)
    return basis.shape[1], basis


def weyl_check(window: SpectrumWindow) -> WeylReport:
    """Compare the count in the window with (L/pi) k_max; flag deviations above 2N."""
    count = window.total_count
    predicted = window.total_length / math.pi * window.k_max
    deviation = count - predicted
    bound = 2.0 * len(window.lengths)
    return WeylReport(count=count, predicted=predicted, deviation=deviation, bound=bound,
                      flagged=abs(deviation) > bound)


def scale_spectrum(window: SpectrumWindow, r: float) -> SpectrumWindow:
    """The window of the graph with lengths r*l: every k becomes k/r, kernels unchanged."""
    records = [EigenvalueRecord(k=rec.k / r, multiplicity=rec.multiplicity,
                                kernel_basis=rec.kernel_basis, residual=rec.residual)
               for rec in window.records]
    return SpectrumWindow(lengths=tuple(r * x for x in window.lengths), k_min=window.k_min / r,
                          k_max=window.k_max / r, records=records)
