"""
Genericity and common-spectrum experiments.
Spectra are solved on a window, a property is evaluated per eigenvalue and
the resulting densities are reported with a Wilson interval.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from experiments.models import DensityReport, Property
from graph.graph_model import classify, with_lengths
from graph.models import GraphClass, MetricGraph
from spectral.errors import AssumptionViolation, GraphValidationError
from spectral.models import BondSystem, EigenvalueRecord, SymmetryKind
from spectral.scattering import build_bond_scattering, loop_vector
from spectral.secular import secular_gradient
from spectral.solver import solve_spectrum
from spectral.traces import (CLASSIFY_TOL, NONVANISHING_TOL, SUPPORT_TOL,
                             classify_symmetry, is_full_support,
                             nonvanishing_test, record_traces)

logger = logging.getLogger(__name__)

MATCH_TOL = 1e-8
MAX_DENOMINATOR = 50
RATIO_TOL = 1e-9
MAX_RESAMPLES = 1000


def _has_small_ratio(lengths: np.ndarray) -> bool:
    for i in range(len(lengths)):
        for j in range(i + 1, len(lengths)):
            ratio = lengths[i] / lengths[j]
            best = Fraction(ratio).limit_denominator(MAX_DENOMINATOR)
            if best.numerator <= MAX_DENOMINATOR and abs(ratio - float(best)) <= RATIO_TOL:
                return True
    return False


def random_lengths(n: int, seed: int, low: float = 1.0, high: float = 2.0) -> Tuple[float, ...]:
    """n uniform lengths in [low, high], deterministic per seed.

    Draws whose pairwise ratios sit within 1e-9 of a small fraction p/q
    (p, q <= 50) are resampled.
    """
    if n < 1:
        raise ValueError(f"need at least one length, got {n}")
    if not 0 < low < high:
        raise ValueError(f"invalid length range [{low}, {high}]")

    rng = np.random.default_rng(seed)
    for _ in range(MAX_RESAMPLES):
        lengths = rng.uniform(low, high, size=n)
        if not _has_small_ratio(lengths):
            return tuple(float(x) for x in lengths)
        logger.debug(f"Resampling lengths for seed {seed}: rational ratio found")
    raise ValueError(f"could not draw rationally independent lengths in [{low}, {high}]")


def wilson_interval(count: int, total: int) -> Optional[Tuple[float, float]]:
    """95% Wilson score interval of count/total."""
    if total <= 0:
        return None
    ci = stats.binomtest(count, total).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _require_assumption(g: MetricGraph) -> GraphClass:
    graph_class = classify(g)
    if not graph_class.satisfies_assumption:
        raise AssumptionViolation(
            f"assumption violated for {g.name}: {', '.join(graph_class.violation_reasons)}",
            list(graph_class.violation_reasons))
    return graph_class


def _loop_share(g: MetricGraph, loops) -> float:
    return sum(g.lengths[j] for j in loops) / (2.0 * g.total_length)


def _expected(prop: Property, g: MetricGraph, graph_class: GraphClass) -> Optional[float]:
    if prop == Property.LOOP_SUPPORTED:
        return _loop_share(g, graph_class.loop_edges)
    if prop == Property.FULL_SUPPORT:
        return _loop_share(g, graph_class.loop_edges)
    if not graph_class.loop_edges and not graph_class.is_mandarin:
        return 0.0
    if prop == Property.SIMPLE:
        return 0.0
    return None


def _loop_supported(bs: BondSystem, g: MetricGraph, lengths: Sequence[float],
                    record: EigenvalueRecord, graph_class: GraphClass, tol: float) -> bool:
    if record.is_simple:
        trace = record_traces(bs, lengths, record)[0]
        kind = classify_symmetry(g, trace, tol=tol, graph_class=graph_class).kind
        return kind == SymmetryKind.LOOP_SUPPORTED
    basis = record.kernel_basis
    for j in graph_class.loop_edges:
        a = loop_vector(bs, j) / np.sqrt(2.0)
        if np.linalg.norm(a - basis @ (basis.conj().T @ a)) <= tol:
            return True
    return False


def _fails(prop: Property, bs: BondSystem, g: MetricGraph, lengths: Sequence[float],
           record: EigenvalueRecord, graph_class: GraphClass, tols: Dict[str, float]) -> bool:
    """Whether a record counts towards the reported fraction."""
    if prop == Property.SIMPLE:
        return not record.is_simple
    if prop == Property.NONVANISHING:
        if not record.is_simple:
            return True
        trace = record_traces(bs, lengths, record)[0]
        ok, _ = nonvanishing_test(g, trace, tols["nonvanishing"])
        return not ok
    if prop == Property.LOOP_SUPPORTED:
        return _loop_supported(bs, g, lengths, record, graph_class, tols["classify"])
    if prop == Property.FULL_SUPPORT:
        z = np.exp(1j * record.k * np.asarray(lengths))
        return not is_full_support(bs, z, tols["support"], gradient=secular_gradient(bs, z))
    raise ValueError(f"unknown property {prop}")


def genericity_density(g: MetricGraph, prop, k_max: float, lengths: Optional[Sequence[float]] = None,
                       k_min: float = 1e-6, seed: Optional[int] = None,
                       tol_classify: float = CLASSIFY_TOL, tol_nonvanishing: float = NONVANISHING_TOL,
                       tol_support: float = SUPPORT_TOL, tol_onmanifold: Optional[float] = None,
                       workers: int = 1) -> DensityReport:
    """Fraction of eigenvalues in (k_min, k_max] that fail (or show) a property.

    Records are weighted by multiplicity so the total matches the Weyl count.
    """
    prop = Property(prop)
    if lengths is not None:
        g = with_lengths(g, lengths)
    graph_class = _require_assumption(g)
    bs = build_bond_scattering(g)
    window = solve_spectrum(bs, g.lengths, k_min, k_max, tol_onmanifold=tol_onmanifold,
                            workers=workers)

    tols = {"classify": tol_classify, "nonvanishing": tol_nonvanishing, "support": tol_support}
    count = 0
    offenders: List[float] = []
    for record in window.records:
        if _fails(prop, bs, g, g.lengths, record, graph_class, tols):
            count += 1 if prop == Property.LOOP_SUPPORTED else record.multiplicity
            if len(offenders) < DensityReport.MAX_OFFENDERS:
                offenders.append(record.k)

    total = window.total_count
    report = DensityReport(
        property_name=prop.value,
        graphs=(g.name,),
        lengths=g.lengths,
        seed=seed,
        k_min=k_min,
        k_max=k_max,
        total=total,
        count=count,
        offenders=offenders,
        wilson=wilson_interval(count, total),
        expected=_expected(prop, g, graph_class),
        tolerances=dict(tols, onmanifold=tol_onmanifold),
    )
    logger.info(f"{prop.value} on {g.name}: {count}/{total} = {report.fraction:.4g}")
    return report


def match_spectra(ks1: np.ndarray, ks2: np.ndarray,
                  match_tol: float = MATCH_TOL) -> List[Tuple[float, float]]:
    """Greedy two-pointer matching of sorted eigenvalue lists within match_tol*(1+k)."""
    pairs: List[Tuple[float, float]] = []
    i = j = 0
    while i < len(ks1) and j < len(ks2):
        a, b = ks1[i], ks2[j]
        if abs(a - b) <= match_tol * (1.0 + max(a, b)):
            pairs.append((float(a), float(b)))
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return pairs


def _expected_common(g1: MetricGraph, c1: GraphClass, g2: MetricGraph, c2: GraphClass) -> float:
    if (c1.is_mandarin and c2.is_flower) or (c1.is_flower and c2.is_mandarin):
        return 0.5
    shared = c1.loop_edges & c2.loop_edges
    return _loop_share(g1, shared)


def common_spectrum(g1: MetricGraph, g2: MetricGraph, k_max: float,
                    lengths: Optional[Sequence[float]] = None, k_min: float = 1e-6,
                    match_tol: float = MATCH_TOL, seed: Optional[int] = None,
                    tol_onmanifold: Optional[float] = None, workers: int = 1) -> DensityReport:
    """Eigenvalues shared by two graphs carrying the same edge lengths.

    The fraction is relative to the count of g1 in the window.
    """
    if g1.n_edges != g2.n_edges:
        raise GraphValidationError(f"edge-count mismatch: {g1.n_edges} vs {g2.n_edges}")
    lengths = g1.lengths if lengths is None else tuple(lengths)
    g1, g2 = with_lengths(g1, lengths), with_lengths(g2, lengths)
    c1, c2 = _require_assumption(g1), _require_assumption(g2)

    windows = [solve_spectrum(build_bond_scattering(g), lengths, k_min, k_max,
                              tol_onmanifold=tol_onmanifold, workers=workers) for g in (g1, g2)]
    ks1, ks2 = (w.ks(with_multiplicity=True) for w in windows)
    pairs = match_spectra(ks1, ks2, match_tol)

    report = DensityReport(
        property_name=Property.COMMON_SPECTRUM.value,
        graphs=(g1.name, g2.name),
        lengths=tuple(lengths),
        seed=seed,
        k_min=k_min,
        k_max=k_max,
        total=len(ks1),
        count=len(pairs),
        offenders=[a for a, _ in pairs[:DensityReport.MAX_OFFENDERS]],
        wilson=wilson_interval(len(pairs), len(ks1)),
        expected=_expected_common(g1, c1, g2, c2),
        matched_pairs=pairs,
        tolerances={"match": match_tol, "onmanifold": tol_onmanifold},
    )
    logger.info(f"Common spectrum {g1.name} / {g2.name}: {len(pairs)}/{len(ks1)} "
                f"= {report.fraction:.4g}")
    return report


def multi_seed(g: MetricGraph, prop, seeds: Sequence[int], k_max: float,
               length_range: Tuple[float, float] = (1.0, 2.0), workers: int = 1,
               **kwargs) -> List[DensityReport]:
    """genericity_density for random lengths drawn from each seed, ordered by seed."""
    def run(seed: int) -> DensityReport:
        lengths = random_lengths(g.n_edges, seed, *length_range)
        return genericity_density(g, prop, k_max, lengths=lengths, seed=seed, **kwargs)

    ordered = sorted(seeds)
    if workers <= 1:
        return [run(seed) for seed in ordered]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, ordered))
