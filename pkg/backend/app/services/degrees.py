"""
Power-law degree sequences (deterministic quantiles and Gamma-coupled order
statistics) and their limiting hub weights theta.
"""

from typing import List, Optional, Sequence
import logging

import numpy as np
from scipy.special import zeta

from app.core.exceptions import ParameterError
from app.models.degree_sequence import CaseTag, DegreeSequence
from app.schemas.degrees import (
    AssumptionTolerances,
    TailStatistic,
    ThetaSequence,
    ValidationReport,
)
from app.schemas.params import ModelParams
from app.services.params import exponents

logger = logging.getLogger(__name__)

HEAD_LIMIT = 1024
ZETA_TERMS = 100000
RECORDED_GAMMAS = 1024
TAIL_LADDER = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)


def generalized_inverse(u, c_f: float, tau: float) -> np.ndarray:
    """min{k >= 1 : c_f * k**-(tau-1) <= u}, elementwise"""
    u = np.asarray(u, dtype=float)
    power = tau - 1.0
    k = np.maximum(np.ceil((c_f / u) ** (1.0 / power)), 1.0)
    # the closed form can be off by one at equality boundaries
    lower = np.maximum(k - 1.0, 1.0)
    step_down = (k > 1.0) & (c_f * lower ** (-power) <= u)
    k = np.where(step_down, k - 1.0, k)
    step_up = c_f * k ** (-power) > u
    k = np.where(step_up, k + 1.0, k)
    return k.astype(np.int64)


def _fix_parity(d: np.ndarray) -> np.ndarray:
    if int(d.sum()) % 2 == 1:
        d[0] += 1  # dummy half-edge on vertex 1
    return d


def quantile_degrees(params: ModelParams) -> DegreeSequence:
    """Case I: d_i = (1-F)^{-1}(i/n)"""
    i = np.arange(1, params.n + 1, dtype=float)
    d = _fix_parity(generalized_inverse(i / params.n, params.c_f, params.tau))
    return DegreeSequence(d, case_tag=CaseTag.QUANTILE_I, tau=params.tau, c_f=params.c_f)


def iid_degrees(params: ModelParams, rng, stream: Optional[int] = None) -> DegreeSequence:
    """
    Case II: order statistics via d_i = (1-F)^{-1}(Gamma_i / Gamma_{n+1}).

    `stream` is the fingerprint of the generator's key path (see
    `app.core.rng.stream_seed`); it goes into the sequence header.
    """
    clocks = np.asarray(rng.exponential(1.0, size=params.n + 1), dtype=float)
    gammas = np.cumsum(clocks)
    d = _fix_parity(generalized_inverse(gammas[:-1] / gammas[-1], params.c_f, params.tau))
    return DegreeSequence(
        d,
        case_tag=CaseTag.IID_II,
        tau=params.tau,
        c_f=params.c_f,
        seed=stream,
        gammas=gammas[: min(params.n, RECORDED_GAMMAS)].copy(),
    )


def zeta_by_summation(s: float, terms: int = ZETA_TERMS) -> float:
    """Riemann zeta(s), s > 1, by direct summation plus an Euler-Maclaurin tail"""
    if s <= 1.0:
        raise ParameterError(f"zeta diverges for s={s}")
    i = np.arange(terms, 0, -1, dtype=float)
    partial = float(np.sum(i ** (-s)))
    N = float(terms)
    tail = N ** (1.0 - s) / (s - 1.0) - 0.5 * N ** (-s) + s * N ** (-s - 1.0) / 12.0
    return partial + tail


def theta_limits(params: ModelParams, K: int) -> ThetaSequence:
    """theta_i = c_F**alpha * i**-alpha, truncated at K"""
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    alpha = exponents(params.tau).alpha
    scale = params.c_f ** alpha
    head = scale * np.arange(1, min(K, HEAD_LIMIT) + 1, dtype=float) ** (-alpha)
    l2 = scale ** 2 * zeta_by_summation(2.0 * alpha)
    tail = scale ** 2 * float(zeta(2.0 * alpha, K + 1))
    return ThetaSequence(
        theta=head.tolist(), K=K, c_f=params.c_f, alpha=alpha, l2_norm_sq=l2, tail_sq=tail
    )


def theta_from_gamma(gammas: Sequence[float], c_f: float, alpha: float, K: int) -> ThetaSequence:
    """Case II hub weights theta_i = (c_F / Gamma_i)**alpha from the recorded clocks"""
    gammas = np.asarray(gammas, dtype=float)
    head = (c_f / gammas) ** alpha
    H = head.size
    # past the recorded clocks Gamma_i ~ i
    far = c_f ** (2.0 * alpha) * float(zeta(2.0 * alpha, H + 1))
    l2 = float(np.sum(head ** 2)) + far
    if K >= H:
        tail = c_f ** (2.0 * alpha) * float(zeta(2.0 * alpha, K + 1))
    else:
        tail = float(np.sum(head[K:] ** 2)) + far
    return ThetaSequence(
        theta=head[: min(K, H)].tolist(), K=K, c_f=c_f, alpha=alpha, l2_norm_sq=l2, tail_sq=tail
    )


def finite_theta(values: Sequence[float], mu: Optional[float] = None) -> ThetaSequence:
    """Finite hub-weight sequence with no tail"""
    arr = np.asarray(values, dtype=float)
    return ThetaSequence(
        theta=arr.tolist(), K=arr.size, l2_norm_sq=float(np.sum(arr ** 2)), tail_sq=0.0, mu=mu
    )


def theta_values(theta: ThetaSequence, idx) -> np.ndarray:
    """theta at 1-based indices"""
    idx = np.asarray(idx, dtype=np.int64)
    head = np.asarray(theta.theta, dtype=float)
    out = np.empty(idx.shape, dtype=float)
    in_head = idx <= head.size
    out[in_head] = head[idx[in_head] - 1]
    if np.any(~in_head):
        if not theta.is_power_law:
            raise ParameterError("index beyond a finite theta sequence")
        out[~in_head] = theta.c_f ** theta.alpha * idx[~in_head].astype(float) ** (-theta.alpha)
    return out


def theta_power_sum(theta: ThetaSequence, s: float, start: int = 1) -> float:
    """sum_{start <= i <= K} theta_i**s"""
    start = max(int(start), 1)
    if start > theta.K:
        return 0.0
    head = np.asarray(theta.theta, dtype=float)
    total = float(np.sum(head[start - 1 :] ** s)) if start <= head.size else 0.0
    if theta.is_power_law and theta.K > head.size:
        q = max(start, head.size + 1)
        exponent = s * theta.alpha
        if exponent <= 1.0:
            raise ParameterError(f"power sum of order {exponent:.3g} diverges")
        total += theta.c_f ** exponent * float(zeta(exponent, q) - zeta(exponent, theta.K + 1))
    return total


def suggest_truncation(theta: ThetaSequence, threshold: float) -> int:
    """Smallest K whose tail l2 mass is below `threshold` times the full norm"""
    if not theta.is_power_law:
        return len(theta.theta)
    s = 2.0 * theta.alpha
    scale = theta.c_f ** s
    target = threshold * theta.l2_norm_sq
    lo, hi = 1, 1
    while scale * float(zeta(s, hi + 1)) >= target:
        hi *= 2
        if hi > 10 ** 18:
            raise ParameterError("no feasible truncation below 1e18")
    while lo < hi:
        mid = (lo + hi) // 2
        if scale * float(zeta(s, mid + 1)) < target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def mean_degree_oracle(tau: float, c_f: float) -> float:
    """E[D] = sum_{k>=0} P(D > k) with P(D > k) = min(1, c_F k**-(tau-1))"""
    saturated = int(np.floor(c_f ** (1.0 / (tau - 1.0))))
    return 1.0 + saturated + c_f * float(zeta(tau - 1.0, saturated + 1))


def validate_assumption1(
    degrees: DegreeSequence,
    theta: ThetaSequence,
    tolerances: Optional[AssumptionTolerances] = None,
) -> ValidationReport:
    """Numerical shadow of the hub-degree and moment assumptions; never raises"""
    tolerances = tolerances or AssumptionTolerances()
    n = degrees.n
    alpha = degrees.alpha if degrees.alpha is not None else theta.alpha
    if alpha is None:
        alpha = 1.0
        logger.warning("No exponent known for the degree sequence; using alpha=1")
    d = degrees.d.astype(float)

    hubs = min(tolerances.hub_count, n, theta.K)
    target = theta_values(theta, np.arange(1, hubs + 1))
    deviation = float(np.max(np.abs(n ** (-alpha) * d[:hubs] - target) / target))

    mu_empirical = degrees.mu
    mu_oracle = None
    mu_error = None
    if degrees.tau is not None and degrees.c_f is not None:
        mu_oracle = mean_degree_oracle(degrees.tau, degrees.c_f)
        mu_error = abs(mu_empirical - mu_oracle) / mu_oracle

    squares = d ** 2
    suffix = np.concatenate([np.cumsum(squares[::-1])[::-1], [0.0]])
    scale = float(n) ** (-2.0 * alpha)
    ladder: List[TailStatistic] = [
        TailStatistic(K=K, value=scale * float(suffix[K])) for K in TAIL_LADDER if K < n
    ]
    tail_values = [item.value for item in ladder]
    tail_pass = all(b <= a for a, b in zip(tail_values, tail_values[1:])) and (
        not tail_values or tail_values[-1] <= tolerances.tail
    )

    return ValidationReport(
        n=n,
        alpha=alpha,
        hub_relative_deviation=deviation,
        mu_empirical=mu_empirical,
        mu_oracle=mu_oracle,
        mu_relative_error=mu_error,
        tail_statistics=ladder,
        hub_pass=deviation <= tolerances.hub_relative,
        mu_pass=mu_error is None or mu_error <= tolerances.mu_relative,
        tail_pass=tail_pass,
    )


def build_degrees(params: ModelParams, case: str, rng=None, stream: Optional[int] = None) -> DegreeSequence:
    """Dispatch on the degree construction case ('quantile' or 'iid')"""
    if case == "quantile":
        return quantile_degrees(params)
    if case == "iid":
        if rng is None:
            raise ParameterError("iid degrees need a random generator")
        return iid_degrees(params, rng, stream)
    raise ParameterError(f"unknown degree case '{case}'")
