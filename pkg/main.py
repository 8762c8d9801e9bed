import argparse
import logging
import sys

from cli.commands import run
from cli.config import COMMANDS, FORMATS, RunConfig, Tolerances, default_workers
from cli.exporters import parse_lengths


def _pair(text: str):
    low, high = (float(x) for x in text.split(","))
    return low, high


def build_parser() -> argparse.ArgumentParser:
    defaults = Tolerances()
    parser = argparse.ArgumentParser(
        description="Secular graphs - spectra, traces and genericity experiments for quantum graphs",
        epilog=f"Default tolerances: {Tolerances.describe()}")
    parser.add_argument("command", choices=COMMANDS, help="Subcommand to run")
    parser.add_argument("graphs", nargs="*", help="Graph document(s) (JSON)")
    parser.add_argument("--lengths", type=parse_lengths,
                        help="Edge lengths: JSON list, comma list or a file holding either")
    parser.add_argument("--length-range", type=_pair, default=(1.0, 2.0),
                        help="Range a,b for random lengths (default: 1,2)")
    parser.add_argument("--kmin", type=float, default=1e-6, help="Window start, exclusive (default: 1e-6)")
    parser.add_argument("--kmax", type=float, default=10.0, help="Window end, inclusive (default: 10)")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument("--k", type=float, help="Eigenvalue for 'trace'")
    parser.add_argument("--index", type=int, help="0-based eigenvalue index in the window for 'trace'")
    parser.add_argument("--property", default="simple",
                        choices=["simple", "nonvanishing", "loop_supported", "full_support"],
                        help="Property for 'density' (default: simple)")
    parser.add_argument("--samples", type=int, default=10_000,
                        help="Torus samples for 'verify-factor' (default: 10000)")
    parser.add_argument("--tol-onmanifold", type=float, default=defaults.onmanifold,
                        help="Smallest singular value threshold (default: 1e-10*2N)")
    parser.add_argument("--tol-singular", type=float, default=defaults.singular,
                        help=f"Second singular value threshold (default: {defaults.singular})")
    parser.add_argument("--tol-classify", type=float, default=defaults.classify,
                        help=f"Symmetry classification tolerance (default: {defaults.classify})")
    parser.add_argument("--tol-support", type=float, default=defaults.support,
                        help=f"Edge support tolerance (default: {defaults.support})")
    parser.add_argument("--tol-match", type=float, default=defaults.match,
                        help=f"Relative match tolerance, scaled by 1+k (default: {defaults.match})")
    parser.add_argument("--workers", type=int, default=default_workers(),
                        help="Worker threads (default: $QGRAPH_WORKERS or 1)")
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=FORMATS, default="csv",
                        help="Output format for 'solve' and 'trace' (default: csv)")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    tolerances = Tolerances(onmanifold=args.tol_onmanifold, singular=args.tol_singular,
                            classify=args.tol_classify, support=args.tol_support,
                            match=args.tol_match)
    return RunConfig(
        command=args.command,
        graphs=list(args.graphs),
        lengths=None if args.lengths is None else tuple(args.lengths),
        length_range=args.length_range,
        k_min=args.kmin,
        k_max=args.kmax,
        seed=args.seed,
        tolerances=tolerances,
        out=args.out,
        format=args.format,
        workers=args.workers,
        k=args.k,
        index=args.index,
        property=args.property,
        samples=args.samples,
    )


if __name__ == "__main__":
    args = build_parser().parse_args()
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(config_from_args(args)))
