"""
The limiting process of the rescaled exploration walk.

S(t) = (lam mu / ||theta||^2) sum_i theta_i 1{xi_i <= t} - t with
xi_i ~ Exp(rate theta_i / mu). Paths are kept in closed form (jump times plus
a constant slope), so excursion endpoints and areas are exact.
"""

from typing import Optional, Tuple
import logging
import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import zeta

from app.core.exceptions import ParameterError, TruncationError
from app.models.limit_path import ExcursionTable, LimitPath, ReflectedPath
from app.schemas.degrees import ThetaSequence
from app.schemas.explore import ZVector
from app.schemas.limit import DensityDiagnostic, Excursion
from app.schemas.params import ModelParams
from app.services.degrees import suggest_truncation, theta_limits, theta_power_sum, theta_values

logger = logging.getLogger(__name__)

TAIL_THRESHOLD = 1e-3
EXPLICIT_CLOCKS = 4096
EXPECTATION_HEAD = 100000


def truncated_theta(params: ModelParams, threshold: float = TAIL_THRESHOLD) -> ThetaSequence:
    """Power-law theta truncated at the smallest K meeting the tail threshold"""
    K = suggest_truncation(theta_limits(params, 1), threshold)
    return theta_limits(params, K)


def _resolve_mu(theta: ThetaSequence, mu: Optional[float]) -> float:
    value = mu if mu is not None else theta.mu
    if value is None or value <= 0:
        raise ParameterError("mu must be given either directly or on the theta sequence")
    return float(value)


def _fire_block(theta: ThetaSequence, a: int, b: int, T: float, mu: float, rng) -> Tuple[np.ndarray, np.ndarray]:
    """Clocks a..b-1 (1-based) that fire before T, by thinning a binomial proposal"""
    q_max = -math.expm1(-T * float(theta_values(theta, [a])[0]) / mu)
    proposals = int(rng.binomial(b - a, q_max))
    if proposals == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    idx = a + rng.choice(b - a, size=proposals, replace=False).astype(np.int64)
    q = -np.expm1(-T * theta_values(theta, idx) / mu)
    keep = rng.random(proposals) * q_max < q
    idx, q = idx[keep], q[keep]
    # xi conditioned on xi <= T, by inversion
    times = -(mu / theta_values(theta, idx)) * np.log1p(-rng.random(idx.size) * q)
    return idx, times


def simulate_limit_path(
    theta: ThetaSequence,
    lam: float,
    mu: Optional[float],
    T: float,
    rng,
    tail_threshold: float = TAIL_THRESHOLD,
    compensate: bool = False,
) -> LimitPath:
    """Jumps of the first K clocks that fire on [0, T]"""
    if lam <= 0 or T <= 0:
        raise ParameterError("lambda and the horizon must be positive")
    mu = _resolve_mu(theta, mu)
    tail_ratio = theta.tail_sq / theta.l2_norm_sq
    if tail_ratio >= tail_threshold:
        suggested = suggest_truncation(theta, tail_threshold)
        raise TruncationError(
            f"tail l2 mass {tail_ratio:.3g} exceeds {tail_threshold:g}; use K >= {suggested}",
            suggested_k=suggested,
        )

    head = theta.K if not theta.is_power_law else min(theta.K, EXPLICIT_CLOCKS)
    head_idx = np.arange(1, head + 1, dtype=np.int64)
    head_times = rng.exponential(mu / theta_values(theta, head_idx))
    fired = head_times <= T
    indices = [head_idx[fired]]
    times = [head_times[fired]]
    a = head + 1
    while a <= theta.K:
        b = min(2 * a, theta.K + 1)
        idx, xi = _fire_block(theta, a, b, T, mu, rng)
        indices.append(idx)
        times.append(xi)
        a = b

    idx = np.concatenate(indices)
    xi = np.concatenate(times)
    order = np.argsort(xi, kind="stable")
    idx, xi = idx[order], xi[order]
    scale = lam * mu / theta.l2_norm_sq
    slope = -1.0
    if compensate:
        slope += lam * theta.tail_sq / theta.l2_norm_sq
        logger.info(f"Truncation drift compensation on, slope {slope:.6g}")
    return LimitPath(
        jump_times=xi,
        jump_sizes=scale * theta_values(theta, idx),
        clock_index=idx,
        horizon=float(T),
        K=theta.K,
        tail_sq=theta.tail_sq,
        slope=slope,
        compensated=compensate,
    )


def reflect(path: LimitPath) -> ReflectedPath:
    return ReflectedPath(path)


def excursions(path: LimitPath) -> ExcursionTable:
    """
    Excursions above the past minimum.

    An excursion opens at every jump taken from the running minimum and runs
    until the path falls back to that level, which happens on the affine
    segment following the last jump before the next opener.
    """
    if path.slope >= 0:
        raise ParameterError("excursions need a strictly negative slope")
    N = path.num_jumps
    if N == 0:
        empty = np.zeros(0)
        return ExcursionTable(
            empty, empty, empty, np.zeros(0, dtype=bool),
            empty, empty, empty, empty, np.zeros(0, dtype=np.int64),
        )
    drop = -path.slope
    pre = path.pre_jump_values
    post = path.post_jump_values
    cum = path.cumulative
    before = np.minimum.accumulate(np.concatenate([[0.0], pre]))[:-1]
    openers = np.flatnonzero(pre <= before)
    nxt = np.append(openers[1:], N)

    base = pre[openers]
    l = path.jump_times[openers]
    r = (cum[nxt] - base) / drop
    open_flag = r > path.horizon
    r = np.where(open_flag, path.horizon, r)

    owner = np.repeat(np.arange(openers.size), nxt - openers)
    t0 = path.jump_times
    t1 = np.append(path.jump_times[1:], path.horizon)
    last = nxt - 1
    t1[last] = r
    h0 = post - base[owner]
    h1 = h0 - drop * (t1 - t0)
    h1[last[~open_flag]] = 0.0
    area = np.add.reduceat(0.5 * (h0 + h1) * (t1 - t0), openers)

    length = r - l
    order = np.lexsort((l, -length))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return ExcursionTable(
        l=l[order],
        r=r[order],
        area=area[order],
        open_flag=open_flag[order],
        seg_t0=t0,
        seg_t1=t1,
        seg_h0=h0,
        seg_h1=h1,
        seg_owner=rank[owner],
    )


def excursion_area(excursion: Excursion, path: LimitPath) -> Tuple[float, bool]:
    """
    Integral of the reflected path over the excursion, recomputed from the path.

    Returns the area and whether it is partial (the excursion is cut by the horizon).
    """
    reflected = ReflectedPath(path)
    level = float(reflected.running_min(excursion.l))
    inside = (path.jump_times > excursion.l) & (path.jump_times < excursion.r)
    knots = np.concatenate([[excursion.l], path.jump_times[inside], [excursion.r]])
    start = path.value(knots[:-1]) - level
    width = np.diff(knots)
    end = start + path.slope * width
    return float(np.sum(0.5 * (start + end) * width)), excursion.open_flag


def surplus_rate(theta: ThetaSequence, lam: float, mu: Optional[float]) -> float:
    """Intensity of surplus marks per unit area, ||theta||^2 / (lam mu^2)"""
    mu = _resolve_mu(theta, mu)
    return theta.l2_norm_sq / (lam * mu * mu)


def mark_surplus(table: ExcursionTable, theta: ThetaSequence, lam: float, mu: Optional[float], rng) -> ExcursionTable:
    marks = rng.poisson(surplus_rate(theta, lam, mu) * table.area)
    return table.with_marks(marks)


def mark_positions(table: ExcursionTable, row: int, rng) -> np.ndarray:
    """Times of the marks of one excursion, placed by inverting the integrated reflected path"""
    if table.marks is None:
        raise ParameterError("excursions carry no marks yet")
    count = int(table.marks[row])
    if count == 0:
        return np.zeros(0)
    segs = np.flatnonzero(table.seg_owner == row)
    t0, t1 = table.seg_t0[segs], table.seg_t1[segs]
    h0, h1 = table.seg_h0[segs], table.seg_h1[segs]
    width = t1 - t0
    seg_area = 0.5 * (h0 + h1) * width
    cum = np.concatenate([[0.0], np.cumsum(seg_area)])
    targets = rng.random(count) * cum[-1]
    k = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, segs.size - 1)
    rest = targets - cum[k]
    drop = np.where(width[k] > 0, (h0[k] - h1[k]) / np.where(width[k] > 0, width[k], 1.0), 0.0)
    disc = np.maximum(h0[k] ** 2 - 2.0 * drop * rest, 0.0)
    # root of h0 x - drop x^2 / 2 = rest, written without cancellation
    x = 2.0 * rest / (h0[k] + np.sqrt(disc))
    return np.sort(np.minimum(t0[k] + x, t1[k]))


def z_limit(table: ExcursionTable, m: int) -> ZVector:
    """Top-m closed (length, marks) pairs, length descending with marks-descending ties"""
    if table.marks is None:
        raise ParameterError("excursions carry no marks yet")
    closed = table.closed
    entries = list(zip(table.length[closed].tolist(), table.marks[closed].tolist()))
    entries.sort(key=lambda e: (-e[0], -e[1]))
    complete = len(entries) >= m
    if not complete:
        logger.warning(f"Only {len(entries)} closed excursions, {m} requested")
    return ZVector(entries=entries[:m], complete=complete)


def _first_index_below(theta: ThetaSequence, level: float) -> int:
    """Smallest 1-based j with theta_j <= level"""
    if theta.is_power_law:
        scale = theta.c_f ** theta.alpha
        if level >= scale:
            return 1
        j = max(1, int(math.ceil((scale / level) ** (1.0 / theta.alpha))))
        while j > 1 and scale * (j - 1) ** (-theta.alpha) <= level:
            j -= 1
        while scale * j ** (-theta.alpha) > level:
            j += 1
        return j
    values = np.asarray(theta.theta)
    return int(np.searchsorted(-values, -level, side="left")) + 1


def moment_m(theta: ThetaSequence, t: float, v: float) -> float:
    """M_t(v) = sum of theta_j^3 over j with v theta_j <= 1 and t theta_j <= 1"""
    start = _first_index_below(theta, 1.0 / max(v, t))
    if theta.is_power_law:
        # untruncated sequence
        head = np.asarray(theta.theta)
        s = 3.0 * theta.alpha
        total = float(np.sum(head[start - 1 :] ** 3)) if start <= head.size else 0.0
        q = max(start, head.size + 1)
        return total + theta.c_f ** s * float(zeta(s, q))
    return theta_power_sum(theta, 3.0, start)


def density_condition_diagnostic(
    theta: ThetaSequence,
    t: float,
    v_max: float,
    v_min: float = 1e-3,
    points: int = 2000,
    tolerance: float = 1e-6,
) -> DensityDiagnostic:
    """Quadrature of exp(-t v^2 M_t(v)) on a log grid and its value at v_max"""
    if t <= 0:
        raise ParameterError(f"t must be positive, got {t}")
    grid = np.geomspace(v_min, v_max, points)
    integrand = np.array([math.exp(-t * v * v * moment_m(theta, t, v)) for v in grid])
    integral = v_min + float(trapezoid(integrand, grid))
    at_max = float(integrand[-1])
    converged = at_max < tolerance
    if not converged:
        logger.warning(f"Density condition integrand is {at_max:.3g} at v={v_max:g}")
    return DensityDiagnostic(t=t, v_max=v_max, integral=integral, integrand_at_vmax=at_max, converged=converged)


def expected_value(theta: ThetaSequence, lam: float, mu: Optional[float], t: float) -> float:
    """E[S(t)] for the uncompensated truncated process"""
    mu = _resolve_mu(theta, mu)
    head = min(theta.K, EXPECTATION_HEAD)
    values = theta_values(theta, np.arange(1, head + 1))
    total = float(np.sum(values * -np.expm1(-values * t / mu)))
    if theta.K > head:
        x = t / mu
        total += (
            x * theta_power_sum(theta, 2.0, head + 1)
            - x ** 2 / 2.0 * theta_power_sum(theta, 3.0, head + 1)
            + x ** 3 / 6.0 * theta_power_sum(theta, 4.0, head + 1)
        )
    return lam * mu / theta.l2_norm_sq * total - t
