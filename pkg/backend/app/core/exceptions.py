"""
Exception hierarchy shared by the simulation services.

Every error raised on purpose by the library derives from PercolationError so the
CLI and the HTTP layer can tell user-facing failures apart from bugs.
"""

from typing import Optional


class PercolationError(Exception):
    """Base class for all library errors"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParameterError(PercolationError):
    """A model parameter lies outside its admissible range"""


class DegenerateInputError(PercolationError):
    """Input carries no information, e.g. an all-zero degree sequence"""


class SupercriticalRangeError(PercolationError):
    """lambda / nu_n exceeds one, so no percolation probability realizes it"""


class ParityError(PercolationError):
    """Total half-edge count is odd"""


class CouplingRegimeError(PercolationError):
    """Sandwich coupling width epsilon_n is not below one"""


class TruncationError(PercolationError):
    """Hub-weight truncation leaves too much l2 mass in the tail"""

    def __init__(self, message: str, suggested_k: Optional[int] = None):
        super().__init__(message)
        self.suggested_k = suggested_k


class IncompleteTraceError(PercolationError):
    """Exploration trace stopped before every half-edge was paired"""


class NumericalError(PercolationError):
    """Quadrature or root finding failed to reach the requested accuracy"""


class EmptySampleError(PercolationError):
    """A statistic was requested on an empty sample"""
