"""
Configuration-model construction and half-edge percolation.
"""

from typing import Optional, Union
import logging
import math

import numpy as np

from app.core.exceptions import CouplingRegimeError, ParameterError, ParityError
from app.models.degree_sequence import DegreeSequence
from app.models.multigraph import MultiGraph, PercolationMethod, PercolationOutcome
from app.schemas.graph import DiagnosticsReport, SandwichCounts
from app.services.params import criticality_parameter

logger = logging.getLogger(__name__)

DegreesLike = Union[DegreeSequence, np.ndarray]


def _degree_array(degrees: DegreesLike) -> np.ndarray:
    if isinstance(degrees, DegreeSequence):
        return degrees.d
    return np.asarray(degrees, dtype=np.int64)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"percolation probability must lie in [0, 1], got {p}")


def uniform_matching(total: int, rng) -> np.ndarray:
    """Uniform perfect matching of `total` half-edges: shuffle, then pair neighbours"""
    if total % 2:
        raise ParityError(f"cannot match an odd number ({total}) of half-edges")
    perm = rng.permutation(total)
    pairing = np.empty(total, dtype=np.int64)
    pairing[perm[0::2]] = perm[1::2]
    pairing[perm[1::2]] = perm[0::2]
    return pairing


def configuration_model(degrees: DegreesLike, rng) -> MultiGraph:
    d = _degree_array(degrees)
    return MultiGraph(d, uniform_matching(int(d.sum()), rng))


def percolate_retain(degrees: DegreesLike, p: float, rng) -> PercolationOutcome:
    """Keep each half-edge independently, then match the survivors uniformly"""
    _check_p(p)
    d = _degree_array(degrees)
    retained = rng.binomial(d, p).astype(np.int64)
    dummy = bool(int(retained.sum()) % 2)
    if dummy:
        retained[0] += 1
    graph = MultiGraph(retained, uniform_matching(int(retained.sum()), rng))
    return PercolationOutcome(
        graph=graph, retained_degrees=retained, method=PercolationMethod.RETAIN, p=p, dummy_added=dummy
    )


def percolate_fountoulakis(degrees: DegreesLike, p: float, rng) -> PercolationOutcome:
    """Draw X ~ Bin(l_n/2, p), keep a uniform 2X-subset of half-edges, match them"""
    _check_p(p)
    d = _degree_array(degrees)
    total = int(d.sum())
    if total % 2:
        raise ParityError(f"total degree {total} is odd")
    pairs = int(rng.binomial(total // 2, p))
    chosen = rng.choice(total, size=2 * pairs, replace=False)
    owner = np.repeat(np.arange(d.size, dtype=np.int64), d)
    retained = np.bincount(owner[chosen], minlength=d.size).astype(np.int64)
    graph = MultiGraph(retained, uniform_matching(2 * pairs, rng))
    return PercolationOutcome(
        graph=graph,
        retained_degrees=retained,
        method=PercolationMethod.FOUNTOULAKIS,
        p=p,
        pair_draw=pairs,
    )


def sandwich_epsilon(n: int, ell_n: int, p: float) -> float:
    """Width of the half-edge sandwich, log(n) / sqrt(l_n p)"""
    mass = ell_n * p
    if mass <= 0:
        raise CouplingRegimeError("no half-edges survive in expectation")
    log_n = math.log(n) if n > 1 else 0.0
    if mass < 10.0 * max(log_n, 1.0):
        logger.warning(f"l_n p = {mass:.3g} is not large compared with log n = {log_n:.3g}")
    eps = log_n / math.sqrt(mass)
    if eps >= 1.0:
        raise CouplingRegimeError(f"sandwich width {eps:.4g} is not below one")
    return eps


def sandwich_counts(degrees: DegreesLike, p: float, eps: float, rng) -> SandwichCounts:
    """Half-edge counts of Bin(l_n, p(1-eps)), 2 Bin(l_n/2, p) and Bin(l_n, p(1+eps))"""
    _check_p(p)
    total = int(_degree_array(degrees).sum())
    lower = int(rng.binomial(total, max(p * (1.0 - eps), 0.0)))
    middle = 2 * int(rng.binomial(total // 2, p))
    upper = int(rng.binomial(total, min(p * (1.0 + eps), 1.0)))
    return SandwichCounts(epsilon=eps, lower=lower, middle=middle, upper=upper)


def percolated_degree_diagnostics(
    outcome: PercolationOutcome,
    degrees: DegreesLike,
    p: float,
    hubs: int = 10,
    tail_k: Optional[int] = None,
) -> DiagnosticsReport:
    d = _degree_array(degrees)
    dt = outcome.retained_degrees
    retained = int(dt.sum())
    if retained == 0:
        return DiagnosticsReport(p=p, degenerate=True, retained_total=0)

    nu_tilde = criticality_parameter(dt)
    nu_n = criticality_parameter(d)
    nu_ratio = nu_tilde / (p * nu_n) if p > 0 and nu_n > 0 else None

    hub_ratios = {}
    for i in range(min(hubs, d.size)):
        hub_ratios[i + 1] = float(dt[i]) / (p * d[i]) if p > 0 and d[i] > 0 else None

    k = hubs if tail_k is None else tail_k
    dtf = dt.astype(float)
    tail = float(np.sum(dtf[k:] * (dtf[k:] - 1.0))) / retained
    total = int(d.sum())
    return DiagnosticsReport(
        p=p,
        degenerate=False,
        retained_total=retained,
        nu_tilde=nu_tilde,
        nu_ratio=nu_ratio,
        hub_ratios=hub_ratios,
        total_ratio=retained / (p * total) if p > 0 else None,
        tail_statistic=tail,
        square_sum_ratio=float(np.sum(dtf ** 2)) / retained,
    )


def expected_hub_edges(degrees: DegreesLike, p: float, i: int, j: int) -> float:
    """Finite-n mean number of edges between 1-based vertices i != j, p d_i d_j / (l_n - 1)"""
    d = _degree_array(degrees)
    if i == j:
        raise ParameterError("hub indices must differ")
    total = int(d.sum())
    return p * float(d[i - 1]) * float(d[j - 1]) / (total - 1)


def hub_separation_bound(degrees: DegreesLike, p: float, i: int, j: int) -> float:
    """Bound exp(-p d_i d_j / 2 l_n) on hubs i and j sharing no edge"""
    d = _degree_array(degrees)
    return math.exp(-p * float(d[i - 1]) * float(d[j - 1]) / (2.0 * int(d.sum())))
