from cli.commands import run
from cli.config import RunConfig, Tolerances

__all__ = [
    "RunConfig",
    "Tolerances",
    "run",
]
