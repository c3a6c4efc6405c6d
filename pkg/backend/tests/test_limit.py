import math

import numpy as np
import pytest

from app.core.exceptions import ParameterError, TruncationError
from app.models.limit_path import ExcursionTable, LimitPath
from app.schemas.degrees import ThetaSequence
from app.schemas.params import ModelParams
from app.services.degrees import finite_theta, mean_degree_oracle, theta_limits
from app.services.limit import (
    density_condition_diagnostic,
    excursion_area,
    excursions,
    expected_value,
    mark_positions,
    mark_surplus,
    moment_m,
    reflect,
    simulate_limit_path,
    surplus_rate,
    truncated_theta,
    z_limit,
)


def make_path(times, sizes, horizon=10.0):
    times = np.asarray(times, dtype=float)
    return LimitPath(
        jump_times=times,
        jump_sizes=np.asarray(sizes, dtype=float),
        clock_index=np.arange(1, times.size + 1),
        horizon=horizon,
        K=max(times.size, 1),
        tail_sq=0.0,
    )


def area_table(areas):
    areas = np.asarray(areas, dtype=float)
    zeros = np.zeros(areas.size)
    return ExcursionTable(
        l=zeros, r=zeros + 1.0, area=areas, open_flag=np.zeros(areas.size, dtype=bool),
        seg_t0=zeros, seg_t1=zeros + 1.0, seg_h0=zeros, seg_h1=zeros,
        seg_owner=np.arange(areas.size),
    )


def test_no_clock_fires(rng):
    theta = finite_theta([1e-12], mu=1.0)
    path = simulate_limit_path(theta, 1.0, None, 5.0, rng)
    assert path.num_jumps == 0
    assert path.value(np.array([0.0, 2.5, 5.0])).tolist() == [0.0, -2.5, -5.0]


def test_pure_drift_has_no_excursions():
    path = make_path([], [])
    assert len(excursions(path)) == 0
    assert np.all(reflect(path)(np.linspace(0, 10, 11)) == 0.0)


def test_truncation_error_suggests_k(rng):
    theta = theta_limits(ModelParams(tau=2.5, n=1), 10)
    with pytest.raises(TruncationError) as info:
        simulate_limit_path(theta, 1.0, 3.6, 5.0, rng)
    K = info.value.suggested_k
    assert K > 10
    assert theta_limits(ModelParams(tau=2.5, n=1), K).tail_sq < 1e-3 * theta.l2_norm_sq


def test_single_jump_excursion():
    path = make_path([1.0], [2.0])
    table = excursions(path)
    assert len(table) == 1
    exc = table[0]
    assert (exc.l, exc.r, exc.length) == (pytest.approx(1.0), pytest.approx(3.0), pytest.approx(2.0))
    assert exc.area == pytest.approx(2.0)
    assert not exc.open_flag


def test_stacked_jumps_form_one_excursion():
    path = make_path([1.0, 1.5], [1.0, 1.0])
    table = excursions(path)
    assert len(table) == 1
    exc = table[0]
    assert exc.l == pytest.approx(1.0)
    assert exc.r == pytest.approx(3.0)
    assert exc.area == pytest.approx(0.375 + 1.125)
    area, partial = excursion_area(exc, path)
    assert area == pytest.approx(exc.area)
    assert not partial


def test_excursion_cut_by_horizon():
    path = make_path([1.0], [2.0], horizon=2.0)
    exc = excursions(path)[0]
    assert exc.open_flag
    assert exc.r == pytest.approx(2.0)
    assert exc.area == pytest.approx(1.5)
    assert excursion_area(exc, path) == (pytest.approx(1.5), True)


def test_excursions_sorted_and_disjoint():
    path = make_path([0.5, 2.0, 2.2, 6.0], [0.5, 1.0, 2.0, 0.2], horizon=20.0)
    table = excursions(path)
    assert len(table) == 3
    assert list(table.length) == sorted(table.length, reverse=True)
    spans = sorted(zip(table.l, table.r))
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
    reflected = reflect(path)
    assert np.allclose(reflected(table.r), 0.0, atol=1e-12)
    for exc in table:
        assert excursion_area(exc, path)[0] == pytest.approx(exc.area)


def test_excursions_need_negative_slope():
    path = LimitPath(np.array([1.0]), np.array([1.0]), np.array([1]), 5.0, 1, 0.0, slope=0.0)
    with pytest.raises(ParameterError):
        excursions(path)


def test_surplus_rate():
    theta = finite_theta([2.0, 1.0], mu=2.0)
    assert surplus_rate(theta, 0.5, None) == pytest.approx(5.0 / (0.5 * 4.0))
    with pytest.raises(ParameterError):
        surplus_rate(finite_theta([1.0]), 1.0, None)


def test_zero_area_gets_no_marks(rng):
    table = mark_surplus(area_table([0.0] * 100), finite_theta([1.0], mu=1.0), 1.0, None, rng)
    assert table.marks.sum() == 0


def test_mark_mean_matches_rate(rng):
    theta = finite_theta([1.0], mu=1.0)
    table = mark_surplus(area_table([2.0] * 10 ** 5), theta, 1.0, None, rng)
    assert abs(table.marks.mean() - 2.0) < 0.015


def test_z_limit_single_excursion(rng):
    path = make_path([1.0], [2.0])
    table = excursions(path).with_marks(np.array([1]))
    assert z_limit(table, 1).entries == [(pytest.approx(2.0), 1)]
    short = z_limit(table, 3)
    assert not short.complete


def test_z_limit_needs_marks():
    with pytest.raises(ParameterError):
        z_limit(excursions(make_path([1.0], [2.0])), 1)


def test_mark_positions_inside_excursion(rng):
    path = make_path([1.0, 1.5], [1.0, 1.0])
    table = excursions(path).with_marks(np.array([500]))
    positions = mark_positions(table, 0, rng)
    assert positions.size == 500
    assert np.all(np.diff(positions) >= 0)
    assert positions.min() >= 1.0 and positions.max() <= 3.0
    # the reflected path is tallest just after 1.5, so marks concentrate there
    assert np.mean(positions < 1.5) < np.mean(positions > 1.5)


def test_density_condition_converges():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 10)
    report = density_condition_diagnostic(theta, 1.0, 1e3)
    assert report.converged
    assert report.integrand_at_vmax < 1e-6
    assert report.integral > 0


def test_expected_value_finite():
    theta = finite_theta([1.0], mu=1.0)
    assert expected_value(theta, 1.0, None, 1.0) == pytest.approx(-math.exp(-1.0))


def test_expected_value_tail_expansion():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 200000)
    values = np.arange(1, 200001, dtype=float) ** (-2.0 / 3.0)
    mu = 3.6
    direct = float(np.sum(values * -np.expm1(-values / mu))) / theta.l2_norm_sq * mu - 1.0
    assert expected_value(theta, 1.0, mu, 1.0) == pytest.approx(direct, rel=1e-9)


def test_simulated_power_law_path(rng):
    params = ModelParams(tau=2.5, n=1)
    theta = truncated_theta(params)
    mu = mean_degree_oracle(2.5, 1.0)
    path = simulate_limit_path(theta, 1.0, mu, 5.0, rng)
    assert theta.tail_sq < 1e-3 * theta.l2_norm_sq
    assert np.all(np.diff(path.jump_times) >= 0)
    assert np.all((path.jump_times >= 0) & (path.jump_times <= 5.0))
    assert np.all((path.clock_index >= 1) & (path.clock_index <= theta.K))
    scale = mu / theta.l2_norm_sq
    assert np.allclose(path.jump_sizes, scale * path.clock_index.astype(float) ** (-2.0 / 3.0))
    assert path.total_variation() == pytest.approx(path.jump_sizes.sum() + 5.0)
    reflected = reflect(path)
    assert np.all(reflected(np.linspace(0, 5, 200)) >= -1e-12)


def test_compensated_slope(rng):
    theta = theta_limits(ModelParams(tau=2.5, n=1), 10 ** 9)
    path = simulate_limit_path(theta, 2.0, 3.6, 1.0, rng, compensate=True)
    assert path.compensated
    assert path.slope == pytest.approx(-1.0 + 2.0 * theta.tail_sq / theta.l2_norm_sq)


def test_moment_m_small_sequence():
    theta = finite_theta([1.0, 0.5, 0.25])
    assert moment_m(theta, 0.5, 0.1) == pytest.approx(1.0 + 0.125 + 0.015625)
    assert moment_m(theta, 1.5, 0.1) == pytest.approx(0.125 + 0.015625)
    assert moment_m(theta, 3.0, 0.1) == pytest.approx(0.015625)
    assert moment_m(theta, 5.0, 0.1) == 0.0
    # the larger of t and v sets the cut
    assert moment_m(theta, 0.5, 3.0) == pytest.approx(0.015625)


def test_moment_m_non_increasing_in_t():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 10)
    values = [moment_m(theta, t, 0.5) for t in np.geomspace(0.1, 100.0, 12)]
    assert all(v > 0 for v in values)
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_density_condition_fails_for_harmonic_weights():
    # theta_i = 1/i: v^2 M_t(v) tends to 1/2, so the integrand levels off at exp(-t/2)
    theta = ThetaSequence(
        theta=[1.0, 0.5, 1.0 / 3.0], K=10 ** 6, c_f=1.0, alpha=1.0, l2_norm_sq=math.pi ** 2 / 6.0
    )
    report = density_condition_diagnostic(theta, 1.0, 1e3)
    assert not report.converged
    assert report.integrand_at_vmax == pytest.approx(math.exp(-0.5), rel=1e-2)
    assert report.integral > 500.0


def test_simulated_excursions_ordered_and_closed(rng_factory):
    theta = truncated_theta(ModelParams(tau=2.5, n=1))
    mu = mean_degree_oracle(2.5, 1.0)
    for r in range(50):
        path = simulate_limit_path(theta, 1.0, mu, 5.0, rng_factory(3, r))
        table = excursions(path)
        length = np.asarray(table.length)
        assert np.all(np.diff(length) <= 0)
        ties = np.flatnonzero(np.diff(length) == 0)
        assert np.all(table.l[ties] < table.l[ties + 1])
        spans = sorted(zip(table.l, table.r))
        assert all(a[1] <= b[0] + 1e-12 for a, b in zip(spans, spans[1:]))
        closed = ~np.asarray(table.open_flag)
        assert np.allclose(reflect(path)(table.r[closed]), 0.0, atol=1e-9)
