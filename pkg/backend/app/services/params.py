"""
Scaling exponents and criticality quantities shared by every other service.
"""

from typing import Union, Sequence
import logging

import numpy as np

from app.core.exceptions import DegenerateInputError, ParameterError, SupercriticalRangeError
from app.models.degree_sequence import DegreeSequence
from app.schemas.params import Exponents

logger = logging.getLogger(__name__)


def exponents(tau: float) -> Exponents:
    """alpha = 1/(tau-1), rho = (tau-2)/(tau-1), eta = (3-tau)/(tau-1)"""
    if not 2.0 < tau < 3.0:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")
    return Exponents(
        alpha=1.0 / (tau - 1.0),
        rho=(tau - 2.0) / (tau - 1.0),
        eta=(3.0 - tau) / (tau - 1.0),
    )


def _as_array(degrees: Union[DegreeSequence, Sequence[int], np.ndarray]) -> np.ndarray:
    if isinstance(degrees, DegreeSequence):
        return degrees.d
    return np.asarray(degrees, dtype=np.int64)


def criticality_parameter(degrees: Union[DegreeSequence, Sequence[int], np.ndarray]) -> float:
    """
    nu_n = sum d_i (d_i - 1) / sum d_i.

    Both sums are accumulated as Python integers over the distinct degree values,
    so the only rounding happens in the final division.
    """
    d = _as_array(degrees)
    values, counts = np.unique(d, return_counts=True)
    total = 0
    second = 0
    for value, count in zip(values.tolist(), counts.tolist()):
        total += value * count
        second += value * (value - 1) * count
    if total == 0:
        raise DegenerateInputError("criticality parameter undefined for an all-zero degree sequence")
    return second / total


def critical_p(lam: float, nu_n: float) -> float:
    """Representative critical-window probability p_c(lambda) = lambda / nu_n"""
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if nu_n <= 0:
        raise ParameterError(f"nu_n must be positive, got {nu_n}")
    p = lam / nu_n
    if p > 1.0:
        raise SupercriticalRangeError(
            f"lambda / nu_n = {p:.4g} > 1: supercritical beyond percolation range"
        )
    return p


def power_p(n: int, exponent: float) -> float:
    """Percolation probability parameterized as n**(-exponent)"""
    if exponent <= 0:
        raise ParameterError(f"p exponent must be positive, got {exponent}")
    return float(n) ** (-exponent)
