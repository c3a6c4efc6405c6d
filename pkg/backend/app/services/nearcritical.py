"""
Predictions away from the critical window: hub-dominated components for
p_n << p_c, a unique giant for p_n >> p_c, and hub-to-hub edge statistics.
"""

from typing import Iterable, Optional, Union
import logging
import math

import numpy as np
from scipy import integrate, special

from app.core.exceptions import NumericalError, ParameterError
from app.models.degree_sequence import DegreeSequence
from app.models.multigraph import MultiGraph, PercolationOutcome
from app.schemas.degrees import ThetaSequence
from app.schemas.nearcritical import HubStatistics, PredictedValue, Regime, RegimePrediction
from app.services.degrees import theta_values

logger = logging.getLogger(__name__)


def _check_tau(tau: float) -> None:
    if not 2.0 < tau < 3.0:
        raise ParameterError(f"tau must lie in (2, 3), got {tau}")


def _near_origin(u: float) -> float:
    return 1.0 if u == 0.0 else -math.expm1(-u) / u


def kappa(c_f: float, tau: float, tolerance: float = 1e-8) -> float:
    """
    kappa = int_0^inf c_F z^-alpha (1 - exp(-c_F z^-alpha)) dz.

    With u = c_F z^-alpha this is (tau-1) c_F^(tau-1) int_0^inf u^(1-tau) (1 - e^-u) du.
    The [0, 1] piece uses an algebraic weight u^(2-tau); on [1, inf) the
    power part is integrated in closed form.
    """
    _check_tau(tau)
    if c_f <= 0:
        raise ParameterError(f"c_F must be positive, got {c_f}")
    low, low_err = integrate.quad(_near_origin, 0.0, 1.0, weight="alg", wvar=(2.0 - tau, 0.0))
    high, high_err = integrate.quad(lambda u: u ** (1.0 - tau) * math.exp(-u), 1.0, np.inf)
    value = low + 1.0 / (tau - 2.0) - high
    error = low_err + high_err
    if not math.isfinite(value) or error > tolerance * abs(value):
        raise NumericalError(f"kappa quadrature error {error:.3g} exceeds tolerance for value {value:.6g}")
    return (tau - 1.0) * c_f ** (tau - 1.0) * value


def kappa_closed_form(c_f: float, tau: float) -> float:
    _check_tau(tau)
    return -(tau - 1.0) * c_f ** (tau - 1.0) * float(special.gamma(2.0 - tau))


def laplace_constant(c_f: float, tau: float, mu: float) -> float:
    """
    Constant of the size-biased Laplace deficit, 1 - E[exp(-s D*)] ~ constant * s^(tau-2).

    Degrees d_i ~ (c_F n / i)^alpha give c_F * kappa(1, tau) / mu.
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    return c_f * kappa(1.0, tau) / mu


def laplace_check(degrees: DegreeSequence, p_n: float, t: float) -> float:
    """Size-biased Laplace deficit at t p_n^(1/(3-tau)), rescaled by p_n^((tau-2)/(3-tau))"""
    if not 0.0 < p_n < 1.0:
        raise ParameterError(f"p_n must lie in (0, 1), got {p_n}")
    if degrees.tau is None:
        raise ParameterError("laplace check needs the degree exponent")
    tau = degrees.tau
    t_n = t * p_n ** (1.0 / (3.0 - tau))
    d = degrees.d.astype(float)
    deficit = float(np.sum(d * -np.expm1(-t_n * d))) / degrees.total
    return deficit / p_n ** ((tau - 2.0) / (3.0 - tau))


def subcritical_prediction(
    theta: ThetaSequence,
    n: int,
    p_n: float,
    alpha: float,
    p_c: Optional[float] = None,
    count: int = 10,
) -> RegimePrediction:
    """|C_(i)| ~ theta_i n^alpha p_n, no surplus"""
    warnings = []
    if p_n <= n ** (-alpha):
        warnings.append(f"p_n={p_n:.4g} is not above n^-alpha={n ** (-alpha):.4g}")
    if p_c is not None and p_n >= p_c:
        warnings.append(f"p_n={p_n:.4g} is not below p_c={p_c:.4g}")
    for message in warnings:
        logger.warning(message)
    count = min(count, theta.K)
    sizes = theta_values(theta, np.arange(1, count + 1)) * n ** alpha * p_n
    predicted = [PredictedValue(label=f"C{i}", value=float(v)) for i, v in enumerate(sizes, start=1)]
    predicted.append(PredictedValue(label="surplus", value=0.0))
    return RegimePrediction(regime=Regime.SUBCRITICAL, p_n=p_n, predicted=predicted, warnings=warnings)


def supercritical_prediction(
    mu: float,
    kappa_value: float,
    tau: float,
    n: int,
    p_n: float,
    p_c: Optional[float] = None,
) -> RegimePrediction:
    """
    |C_(1)| and its edge count both ~ mu k^(1/(3-tau)) n p_n^(1/(3-tau)), where k is
    the size-biased Laplace constant (see laplace_constant).
    """
    _check_tau(tau)
    warnings = []
    if p_c is not None and p_n <= p_c:
        warnings.append(f"p_n={p_n:.4g} is not above p_c={p_c:.4g}")
    if p_n >= 1.0:
        warnings.append(f"p_n={p_n:.4g} is not below 1")
    for message in warnings:
        logger.warning(message)
    power = 1.0 / (3.0 - tau)
    ratio = mu * kappa_value ** power
    size = ratio * n * p_n ** power
    predicted = [
        PredictedValue(label="C1_ratio", value=ratio),
        PredictedValue(label="C1", value=size),
        PredictedValue(label="edges_C1", value=size),
    ]
    return RegimePrediction(regime=Regime.SUPERCRITICAL, p_n=p_n, predicted=predicted, warnings=warnings)


def poisson_hub_prediction(theta: ThetaSequence, lam: float, mu: float, i: int, j: int) -> float:
    """Limiting mean lam theta_i theta_j / mu of the edges between hubs i and j"""
    values = theta_values(theta, [i, j])
    return lam * float(values[0] * values[1]) / mu


def hub_edge_statistics(
    outcomes: Iterable[Union[PercolationOutcome, MultiGraph]],
    i: int,
    j: int,
    predicted: Optional[float] = None,
) -> HubStatistics:
    """Mean parallel-edge count and co-membership frequency of 1-based vertices i and j"""
    if i == j:
        raise ParameterError("hub indices must differ")
    counts = []
    together = 0
    for item in outcomes:
        graph = item.graph if isinstance(item, PercolationOutcome) else item
        counts.append(graph.edges_between(i - 1, j - 1))
        labels = graph.component_labels()
        together += int(labels[i - 1] == labels[j - 1])
    if not counts:
        raise ParameterError("no replicates given")
    return HubStatistics(
        i=i,
        j=j,
        replicates=len(counts),
        mean_edges=float(np.mean(counts)),
        same_component_frequency=together / len(counts),
        predicted_edges=predicted,
    )


def pool_hub_statistics(parts: Iterable[HubStatistics], predicted: Optional[float] = None) -> HubStatistics:
    """Replicate-weighted merge of statistics gathered for the same hub pair"""
    parts = list(parts)
    if not parts:
        raise ParameterError("no replicates given")
    if len({(s.i, s.j) for s in parts}) != 1:
        raise ParameterError("statistics cover different hub pairs")
    weights = np.array([s.replicates for s in parts], dtype=float)
    total = int(weights.sum())
    return HubStatistics(
        i=parts[0].i,
        j=parts[0].j,
        replicates=total,
        mean_edges=float(np.dot(weights, [s.mean_edges for s in parts]) / total),
        same_component_frequency=float(np.dot(weights, [s.same_component_frequency for s in parts]) / total),
        predicted_edges=predicted,
    )
