"""
Subcommand handlers for the command line.
run() maps validation problems to exit status 1 and numerical failures to
exit status 2.
"""

import logging
import sys

import numpy as np

from cli.config import RunConfig
from cli.exporters import (companion_path, export_report, export_spectrum,
                           export_table, export_traces, write_output)
from experiments.density import common_spectrum, genericity_density, random_lengths
from graph.graph_model import classify, load_graph_file, with_lengths
from graph.models import MetricGraph
from spectral.errors import (AssumptionViolation, NumericalError,
                             QuantumGraphError)
from spectral.models import BondSystem
from spectral.scattering import build_bond_scattering
from spectral.secular import classify_point, expand_polynomial, verify_factorization
from spectral.solver import solve_spectrum, weyl_check
from spectral.traces import (classify_symmetry, kernel_traces,
                             nonvanishing_test, record_traces, trace_residuals)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _graph(config: RunConfig, i: int = 0) -> MetricGraph:
    if len(config.graphs) <= i:
        raise ValueError(f"'{config.command}' needs {i + 1} graph file(s)")
    g = load_graph_file(config.graphs[i])
    if config.lengths is not None:
        g = with_lengths(g, config.lengths)
    return g


def _checked(g: MetricGraph) -> BondSystem:
    graph_class = classify(g)
    if not graph_class.satisfies_assumption:
        raise AssumptionViolation(
            f"Assumption violated for {g.name}: {', '.join(graph_class.violation_reasons)}",
            list(graph_class.violation_reasons))
    return build_bond_scattering(g)


def _solve(config: RunConfig):
    g = _graph(config)
    bs = _checked(g)
    tol = config.tolerances
    window = solve_spectrum(bs, g.lengths, config.k_min, config.k_max, k_tol=tol.k_accuracy,
                            merge_tol=tol.merge, max_expected=tol.max_expected,
                            tol_onmanifold=tol.onmanifold, workers=config.workers)
    weyl = weyl_check(window)
    if weyl.flagged:
        logger.warning(f"Weyl deviation {weyl.deviation:.3f} exceeds {weyl.bound:g}")
    logger.info(f"Weyl check: count {weyl.count}, predicted {weyl.predicted:.3f}")

    report = {"graph": g.name, "weyl": weyl.to_dict()}
    if config.format == "csv":
        return export_spectrum(window), export_report(report, config.as_dict())
    report["eigenvalues"] = [[r.k, r.multiplicity, r.residual] for r in window.records]
    return export_report(report, config.as_dict()), None


def _trace(config: RunConfig):
    g = _graph(config)
    bs = _checked(g)
    if config.index is not None:
        window = solve_spectrum(bs, g.lengths, config.k_min, config.k_max,
                                tol_onmanifold=config.tolerances.onmanifold,
                                workers=config.workers)
        if not 0 <= config.index < len(window):
            raise ValueError(f"index {config.index} outside the {len(window)} eigenvalues "
                             f"in ({config.k_min}, {config.k_max}]")
        record = window.records[config.index]
        k = record.k
        traces = record_traces(bs, g.lengths, record)
    elif config.k is not None:
        k = config.k
        traces = kernel_traces(bs, np.exp(1j * k * g.length_array),
                               tol_onmanifold=config.tolerances.onmanifold, k=k)
    else:
        raise ValueError("'trace' needs --k or --index")

    z = traces[0].z
    report = {
        "graph": g.name,
        "k": k,
        "multiplicity": len(traces),
        "regularity": classify_point(bs, z, config.tolerances.onmanifold,
                                     config.tolerances.singular).regularity.value,
    }
    if config.format == "csv":
        return export_traces(k, z, traces), export_report(report, config.as_dict())
    simple = len(traces) == 1
    report["traces"] = [
        {
            "x": [[c.real, c.imag] for c in t.x],
            "residual": trace_residuals(bs, z, t.x).max_residual,
            "nonvanishing": nonvanishing_test(g, t, config.tolerances.nonvanishing)[0],
            "symmetry": str(classify_symmetry(g, t, config.tolerances.classify, simple=simple)),
        }
        for t in traces
    ]
    return export_report(report, config.as_dict()), None


def _verify_factor(config: RunConfig):
    g = _graph(config)
    report = verify_factorization(g, samples=config.samples, seed=config.seed)
    return export_report(report.to_dict(), config.as_dict()), None


def _expand(config: RunConfig):
    g = _graph(config)
    return export_table(expand_polynomial(build_bond_scattering(g))), None


def _lengths(config: RunConfig, g: MetricGraph):
    if config.lengths is not None:
        return config.lengths
    return random_lengths(g.n_edges, config.seed, *config.length_range)


def _density(config: RunConfig):
    g = _graph(config)
    tol = config.tolerances
    report = genericity_density(g, config.property, config.k_max, lengths=_lengths(config, g),
                                k_min=config.k_min, seed=config.seed,
                                tol_classify=tol.classify, tol_nonvanishing=tol.nonvanishing,
                                tol_support=tol.support, tol_onmanifold=tol.onmanifold,
                                workers=config.workers)
    return export_report(report.to_dict(), config.as_dict()), None


def _compare(config: RunConfig):
    if len(config.graphs) != 2:
        raise ValueError("'compare' needs exactly two graph files")
    g1, g2 = (load_graph_file(path) for path in config.graphs)
    report = common_spectrum(g1, g2, config.k_max, lengths=_lengths(config, g1),
                             k_min=config.k_min, match_tol=config.tolerances.match,
                             seed=config.seed, tol_onmanifold=config.tolerances.onmanifold,
                             workers=config.workers)
    return export_report(report.to_dict(), config.as_dict()), None


def _info(config: RunConfig):
    g = _graph(config)
    report = {
        "graph": g.name,
        "vertices": len(g.vertices),
        "n_edges": g.n_edges,
        "total_length": g.total_length,
        "degrees": g.degrees(),
        "class": classify(g).to_dict(),
    }
    return export_report(report), None


HANDLERS = {
    "solve": _solve,
    "trace": _trace,
    "verify-factor": _verify_factor,
    "expand": _expand,
    "density": _density,
    "compare": _compare,
    "info": _info,
}


def run(config: RunConfig, stream=None) -> int:
    """Run one subcommand and return its exit status.

    CSV outputs get a companion report (configuration echo, Weyl check) at
    <out>.report.json, or on the error stream when writing to stdout.
    """
    stream = stream or sys.stderr
    try:
        text, companion = HANDLERS[config.command](config)
    except NumericalError as e:
        logger.error(f"Numerical failure in '{config.command}': {e}")
        print(f"error: {e}", file=stream)
        return EXIT_NUMERICAL
    except (QuantumGraphError, FileNotFoundError, ValueError) as e:
        logger.error(f"Invalid input for '{config.command}': {e}")
        print(f"error: {e}", file=stream)
        return EXIT_VALIDATION

    write_output(text, config.out)
    if companion is not None:
        if config.out is None:
            print(companion, end="", file=stream)
        else:
            write_output(companion, companion_path(config.out))
    return EXIT_OK
