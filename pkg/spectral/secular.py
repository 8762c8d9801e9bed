"""
Secular polynomial P_Γ(z) = det(I - U(z)), its gradient and adjugate-derived
matrices, the explicit mandarin factors and numerical checks of the
factorizations of P_Γ for graphs with reflection symmetries.
"""

import itertools
import logging
from typing import Optional, Tuple

import numpy as np

from graph.graph_model import classify
from graph.models import MetricGraph
from spectral.errors import (AssumptionViolation, GuardExceededError,
                             MandarinSizeError)
from spectral.linalg import det_adjugate, singular_values
from spectral.models import (BondSystem, FactorizationReport, PolyTable,
                             Regularity, SecularValue)
from spectral.scattering import build_bond_scattering, evaluate_U

logger = logging.getLogger(__name__)

MAX_EXPANSION_EDGES = 10
SINGULAR_TOL = 1e-8


def on_manifold_tol(n_edges: int) -> float:
    """Default threshold on the smallest singular value of I - U(z)."""
    return 1e-10 * 2 * n_edges


def _i_minus_u(bs: BondSystem, z) -> np.ndarray:
    return np.eye(2 * bs.n_edges) - evaluate_U(bs, z)


def secular_value(bs: BondSystem, z) -> complex:
    """P_Γ(z) = det(I - U(z)); defined on all of C^N."""
    return complex(np.linalg.det(_i_minus_u(bs, z)))


def secular_values(bs: BondSystem, zs: np.ndarray) -> np.ndarray:
    """P_Γ at every row of zs (shape (m, N))."""
    zs = np.asarray(zs, dtype=complex)
    diag = np.concatenate([zs, zs], axis=1)
    u = diag[:, :, None] * bs.S[None, :, :]
    return np.linalg.det(np.eye(2 * bs.n_edges)[None] - u)


def _gradient_from_adjugate(bs: BondSystem, adj: np.ndarray) -> np.ndarray:
    # dP/dz_j = Tr[adj(I-U) d(I-U)/dz_j] = -((S adj)_{jj} + (S adj)_{N+j,N+j})
    n = bs.n_edges
    d = np.diag(bs.S @ adj)
    return -(d[:n] + d[n:])


def secular_gradient(bs: BondSystem, z) -> np.ndarray:
    """Gradient of P_Γ by the Jacobi formula."""
    _, adj = det_adjugate(_i_minus_u(bs, z))
    return _gradient_from_adjugate(bs, adj)


def adjugate(bs: BondSystem, z) -> Tuple[complex, np.ndarray]:
    """det(I - U(z)) and adj(I - U(z))."""
    return det_adjugate(_i_minus_u(bs, z))


def rank_one_A(bs: BondSystem, z) -> np.ndarray:
    """A(z) = M adj(I - U(z)) M^*, rows and columns in the per-edge trace layout.

    Zero on the singular part of the manifold, rank one on the regular part.
    """
    _, adj = adjugate(bs, z)
    m = bs.M_edge
    return m @ adj @ m.conj().T


def classify_point(bs: BondSystem, z, tol_onmanifold: Optional[float] = None,
                   tol_singular: float = SINGULAR_TOL) -> SecularValue:
    """Evaluate P_Γ and its gradient and place z off, on (regular) or on (singular) Σ."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    tol = on_manifold_tol(bs.n_edges) if tol_onmanifold is None else tol_onmanifold
    a = _i_minus_u(bs, z)
    det, adj = det_adjugate(a)
    gradient = _gradient_from_adjugate(bs, adj)
    s = singular_values(a)

    if s[0] > tol:
        regularity = Regularity.OFF_MANIFOLD
    elif len(s) > 1 and s[1] <= tol_singular:
        regularity = Regularity.SINGULAR
    else:
        regularity = Regularity.REGULAR

    grad_small = np.linalg.norm(gradient) <= tol_singular * max(1.0, float(np.prod(s[1:])))
    if (regularity == Regularity.SINGULAR) != grad_small and regularity != Regularity.OFF_MANIFOLD:
        logger.debug(f"Rank test ({regularity.value}) and gradient norm "
                     f"{np.linalg.norm(gradient):.3g} disagree at z={z}")

    return SecularValue(z=z, value=complex(det), gradient=gradient,
                        regularity=regularity, singular_values=s)


def mandarin_factors(z, n_edges: int) -> Tuple[complex, complex]:
    """(P_M,s(z), P_M,as(z)) from the explicit sum-product formulas."""
    if n_edges < 3:
        raise MandarinSizeError(n_edges)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    symmetric = 0j
    antisymmetric = 0j
    for j in range(n_edges):
        others = np.delete(z, j)
        symmetric += (z[j] - 1) * np.prod(others + 1)
        antisymmetric += (z[j] + 1) * np.prod(others - 1)
    return complex(symmetric), complex(antisymmetric)


def expand_polynomial(bs: BondSystem, max_edges: int = MAX_EXPANSION_EDGES) -> PolyTable:
    """Monomial coefficients of P_Γ by interpolation on the cube roots of unity.

    P_Γ has degree at most 2 in every variable, so sampling on {1, w, w^2}^N
    and a multidimensional DFT recover it exactly.
    """
    n = bs.n_edges
    if n > max_edges:
        raise GuardExceededError(f"expansion guard exceeded: N={n} > {max_edges}")

    roots = np.exp(2j * np.pi * np.arange(3) / 3)
    grid = np.array([roots[list(m)] for m in itertools.product(range(3), repeat=n)])
    values = secular_values(bs, grid).reshape((3,) * n)
    table = PolyTable(n_edges=n, coefficients=np.fft.fftn(values) / 3 ** n)

    rng = np.random.default_rng(1)
    samples = rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))
    worst = max(abs(table.evaluate(p) - secular_value(bs, p)) / max(1.0, abs(secular_value(bs, p)))
                for p in samples)
    if worst > 1e-9:
        logger.warning(f"Expanded table of {bs.graph.name} misses P at sample points by {worst:.3g}")
    logger.info(f"Expanded secular polynomial of {bs.graph.name}: {len(table.to_dict())} monomials")
    return table


def divide_by_loop(table: PolyTable, j: int) -> Tuple[PolyTable, float]:
    """Divide by (1 - z_j): returns the quotient and the max remainder coefficient."""
    c = np.moveaxis(table.coefficients, j, 0)
    # (1 - z)(q0 + q1 z) = q0 + (q1 - q0) z - q1 z^2
    q0, q1 = c[0], -c[2]
    remainder = c[0] + c[1] + c[2]
    quotient = np.zeros_like(c)
    quotient[0], quotient[1] = q0, q1
    quotient = np.moveaxis(quotient, 0, j)
    return PolyTable(n_edges=table.n_edges, coefficients=quotient), float(np.abs(remainder).max())


def symmetric_part(bs: BondSystem, z, loop_edges=None) -> complex:
    """P_Γ,sym(z) = P_Γ(z) / prod over loops of (1 - z_j)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if loop_edges is None:
        loop_edges = classify(bs.graph).loop_edges
    factor = np.prod([1 - z[j] for j in sorted(loop_edges)]) if loop_edges else 1.0
    return secular_value(bs, z) / factor


def _relative_deviation(p: np.ndarray, q: np.ndarray, floor: float = 1e-12) -> float:
    scale = np.maximum(np.abs(p), np.abs(q))
    keep = scale > floor
    if not keep.any():
        return 0.0
    return float((np.abs(p - q)[keep] / scale[keep]).max())


def random_torus(count: int, n_edges: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random((count, n_edges)))


def verify_factorization(g: MetricGraph, samples: int = 10_000, seed: int = 0) -> FactorizationReport:
    """Check the loop, mandarin and flower-vs-mandarin factorizations of P_Γ numerically."""
    graph_class = classify(g)
    if not graph_class.satisfies_assumption:
        raise AssumptionViolation(
            f"assumption violated: {', '.join(graph_class.violation_reasons)}",
            list(graph_class.violation_reasons))

    bs = build_bond_scattering(g)
    n = g.n_edges
    report = FactorizationReport(graph_name=g.name, n_edges=n, samples=samples, seed=seed)
    zs = random_torus(samples, n, seed)

    if graph_class.loop_edges:
        table = expand_polynomial(bs)
        for j in sorted(graph_class.loop_edges):
            _, remainder = divide_by_loop(table, j)
            report.loop_remainders[j] = remainder

    if graph_class.is_mandarin:
        if n < 3:
            report.notes.append("mandarin with fewer than 3 edges: factors undefined")
        else:
            p = secular_values(bs, zs)
            factors = np.array([np.prod(mandarin_factors(z, n)) for z in zs])
            s0, as0 = mandarin_factors(np.zeros(n), n)
            c = secular_value(bs, np.zeros(n)) / (s0 * as0)
            report.mandarin_constant = complex(c)
            report.mandarin_deviation = _relative_deviation(p, c * factors)

    if graph_class.is_flower:
        if n < 3:
            report.notes.append("flower with fewer than 3 edges: no mandarin counterpart")
        else:
            p = secular_values(bs, zs)
            loops = np.prod(1 - zs, axis=1)
            sym = p / loops
            ms = np.array([mandarin_factors(z, n)[0] for z in zs])
            origin = np.zeros(n)
            c = symmetric_part(bs, origin, graph_class.loop_edges) / mandarin_factors(origin, n)[0]
            report.flower_constant = complex(c)
            report.flower_deviation = _relative_deviation(sym, c * ms)

    if not (graph_class.loop_edges or graph_class.is_mandarin):
        report.notes.append("no reflection symmetry: P is expected to be irreducible")

    logger.info(f"Verified factorization of {g.name} on {samples} points")
    return report
