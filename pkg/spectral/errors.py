"""
Exception hierarchy shared by every package.
Validation problems and numerical failures are kept apart so the command
line can map them to different exit statuses.
"""

from typing import List, Optional, Sequence


class QuantumGraphError(Exception):
    """Base class for all errors raised by this project."""


class GraphValidationError(QuantumGraphError, ValueError):
    """A graph document or graph object breaks the model's invariants."""

    def __init__(self, message: str, reasons: Optional[List[str]] = None):
        super().__init__(message)
        self.reasons = reasons or []


class AssumptionViolation(GraphValidationError):
    """The graph violates the standing assumption (no degree-two vertex, not a cycle)."""


class GuardExceededError(QuantumGraphError):
    """A request would exceed a configured resource guard."""


class MandarinSizeError(QuantumGraphError, ValueError):
    """Mandarin factors are only defined for three or more edges."""

    def __init__(self, n_edges: int):
        super().__init__(f"mandarin requires at least 3 edges (got {n_edges})")
        self.n_edges = n_edges


class EmptyFiberError(QuantumGraphError):
    """The torus point is not on the secular manifold."""


class NumericalError(QuantumGraphError):
    """A numerical decision could not be made reliably."""


class ConventionError(NumericalError):
    """The bond scattering matrix failed its self-checks."""


class RankAmbiguityError(NumericalError):
    """Singular values straddle the rank threshold band."""

    def __init__(self, message: str, singular_values: Sequence[float] = ()):
        super().__init__(message)
        self.singular_values = list(singular_values)


class SupportInconsistencyError(NumericalError):
    """Amplitude-based and gradient-based support tests disagree."""

    def __init__(self, message: str, edges: Sequence[int] = ()):
        super().__init__(message)
        self.edges = list(edges)


class UnclassifiedTraceError(NumericalError):
    """A mandarin trace at a simple eigenvalue matches neither symmetry class."""
