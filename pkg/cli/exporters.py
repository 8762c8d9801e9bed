"""
Text writers for spectra, traces, polynomial tables and reports.
Outputs carry no timestamps so identical runs give identical files.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from spectral.models import PolyTable, SpectrumWindow, TraceVector

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
TRACE_HEADER = ["edge_id", "A_re", "A_im", "B_re", "B_im", "C_re", "C_im", "D_re", "D_im"]


def _g15(x: float) -> str:
    return f"{x:.15g}"


def export_spectrum(window: SpectrumWindow) -> str:
    """CSV with one row per distinct eigenvalue: k, multiplicity, residual."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "multiplicity", "residual"])
    for record in window.records:
        writer.writerow([_g15(record.k), record.multiplicity, f"{record.residual:.2e}"])
    return buffer.getvalue()


def export_traces(k: Optional[float], z: np.ndarray, traces: Sequence[TraceVector]) -> str:
    """One block of per-edge rows per trace, after a header row holding k and z."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["k", "" if k is None else _g15(k), "z"]
    for zj in np.atleast_1d(z):
        header += [_g15(zj.real), _g15(zj.imag)]
    writer.writerow(header)
    for i, trace in enumerate(traces):
        writer.writerow([f"trace {i}"])
        writer.writerow(TRACE_HEADER)
        for j, row in enumerate(trace.per_edge()):
            cells = [j]
            for entry in row:
                cells += [_g15(entry.real), _g15(entry.imag)]
            writer.writerow(cells)
    return buffer.getvalue()


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def export_table(table: PolyTable, cutoff: float = 1e-12) -> str:
    """Sparse monomial list (JSON) with coefficients as 17-significant-digit decimals."""
    rows = [f"  [{json.dumps(list(degrees))}, {_g17(c.real)}, {_g17(c.imag)}]"
            for degrees, c in sorted(table.to_dict(cutoff).items())]
    body = ",\n".join(rows)
    return f'{{\n "n_edges": {table.n_edges},\n "terms": [\n{body}\n ]\n}}\n'


def load_table(text: str) -> PolyTable:
    data = json.loads(text)
    n = int(data["n_edges"])
    coefficients = np.zeros((3,) * n, dtype=complex)
    for degrees, re, im in data["terms"]:
        coefficients[tuple(degrees)] = complex(re, im)
    return PolyTable(n_edges=n, coefficients=coefficients)


def export_report(report: dict, config: Optional[dict] = None) -> str:
    """Structured report: JSON with sorted keys, tool version and configuration echo."""
    document = {"version": VERSION, "report": report}
    if config is not None:
        document["config"] = config
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def companion_path(path: str) -> str:
    """Where the report that accompanies a CSV output goes."""
    return f"{path}.report.json"


def write_output(text: str, path: Optional[str]):
    """Write to a file, or to stdout when no path is given."""
    if path is None:
        print(text, end="")
        return
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def parse_lengths(text: str) -> List[float]:
    """Parse a lengths argument: a JSON list, a comma list or a path to either."""
    candidate = Path(text)
    if candidate.suffix in (".json", ".txt", ".csv") and candidate.exists():
        text = candidate.read_text()
    text = text.strip()
    if text.startswith("["):
        return [float(x) for x in json.loads(text)]
    return [float(x) for x in text.split(",") if x.strip()]
