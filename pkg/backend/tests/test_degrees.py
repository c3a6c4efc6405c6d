import numpy as np
import pytest
from scipy import stats
from scipy.special import zeta

from app.core.exceptions import ParameterError, ParityError
from app.core.rng import PHASE_DEGREES, make_rng, stream_seed
from app.models.degree_sequence import CaseTag, DegreeSequence
from app.schemas.degrees import ThetaSequence
from app.schemas.params import ModelParams
from app.services import degrees as degree_service
from app.services.degrees import (
    build_degrees,
    generalized_inverse,
    iid_degrees,
    mean_degree_oracle,
    quantile_degrees,
    suggest_truncation,
    theta_from_gamma,
    theta_limits,
    theta_power_sum,
    validate_assumption1,
    zeta_by_summation,
)


class UnitClocks:
    """Generator stand-in whose exponential clocks are all exactly one"""

    def exponential(self, scale, size):
        return np.ones(size)


def test_quantile_small_example():
    d = quantile_degrees(ModelParams(tau=2.5, c_f=1.0, n=4))
    assert d.d.tolist() == [3, 2, 2, 1]
    assert d.total == 8
    assert d.case_tag == CaseTag.QUANTILE_I


def test_quantile_single_vertex_gets_parity_dummy():
    d = quantile_degrees(ModelParams(tau=2.5, c_f=1.0, n=1))
    assert d.d.tolist() == [2]


def test_generalized_inverse_is_minimal():
    u = np.linspace(0.001, 1.0, 500)
    k = generalized_inverse(u, 1.3, 2.4)
    assert np.all(1.3 * k.astype(float) ** (-1.4) <= u + 1e-15)
    smaller = np.maximum(k - 1, 1).astype(float)
    assert np.all((k == 1) | (1.3 * smaller ** (-1.4) > u))


def test_generalized_inverse_monotone_in_cf():
    u = np.arange(1, 1001) / 1000.0
    assert np.all(generalized_inverse(u, 2.0, 2.5) >= generalized_inverse(u, 1.0, 2.5))


@pytest.mark.parametrize("tau", [2.1, 2.5, 2.9])
def test_quantile_even_and_non_increasing(tau):
    d = quantile_degrees(ModelParams(tau=tau, n=999))
    assert d.total % 2 == 0
    assert np.all(np.diff(d.d) <= 0)


def test_quantile_hubs_follow_power_law():
    n = 10 ** 6
    d = quantile_degrees(ModelParams(tau=2.5, n=n)).d.astype(float)
    i = np.arange(1, 1001)
    deviation = np.abs(d[i - 1] * (i / n) ** (2.0 / 3.0) - 1.0)
    # d_1 may carry the parity dummy
    assert deviation[1:].max() < 0.05
    assert deviation[0] < 0.05


def test_iid_with_unit_clocks_matches_shifted_quantiles():
    params = ModelParams(tau=2.5, n=50)
    d = iid_degrees(params, UnitClocks())
    expected = generalized_inverse(np.arange(1, 51) / 51.0, 1.0, 2.5)
    if expected.sum() % 2:
        expected[0] += 1
    assert d.d.tolist() == expected.tolist()
    assert d.case_tag == CaseTag.IID_II


def test_iid_is_reproducible(rng_factory):
    params = ModelParams(tau=2.5, n=10, seed=3)
    a = iid_degrees(params, rng_factory(1, 0))
    b = iid_degrees(params, rng_factory(1, 0))
    assert a.d.tolist() == b.d.tolist()
    assert a.total % 2 == 0
    assert np.all(np.diff(a.d) <= 0)
    assert a.gammas.size == 10
    assert np.all(np.diff(a.gammas) > 0)


class FixedClocks:
    """Generator stand-in replaying a fixed list of exponential clocks"""

    def __init__(self, clocks):
        self.clocks = np.asarray(clocks, dtype=float)

    def exponential(self, scale, size):
        assert size == self.clocks.size
        return self.clocks.copy()


def test_quantile_golden_sequence():
    d = quantile_degrees(ModelParams(tau=2.5, c_f=1.0, n=10))
    assert d.d.tolist() == [5, 3, 3, 2, 2, 2, 2, 2, 2, 1]
    assert d.seed is None


def test_iid_golden_sequence_from_fixed_clocks():
    clocks = [0.5, 1.0, 0.25, 2.0, 0.75, 1.5, 0.5, 1.0, 0.25, 1.25, 1.0]
    d = iid_degrees(ModelParams(tau=2.5, c_f=1.0, n=10), FixedClocks(clocks), stream=99)
    # Gamma_11 = 10, so u_i = Gamma_i / 10 = 0.05, 0.15, 0.175, ..., 0.9
    assert d.d.tolist() == [8, 4, 4, 2, 2, 2, 2, 2, 2, 2]
    assert d.gammas.tolist() == pytest.approx([0.5, 1.5, 1.75, 3.75, 4.5, 6.0, 6.5, 7.5, 7.75, 9.0])
    assert d.seed == 99
    assert d.to_text().splitlines()[0].endswith("case=IidII seed=99")


def test_iid_header_records_stream_fingerprint():
    params = ModelParams(tau=2.5, n=10, seed=3)
    d = build_degrees(params, "iid", make_rng(3, PHASE_DEGREES), stream_seed(3, (PHASE_DEGREES,)))
    assert d.seed == stream_seed(3, (PHASE_DEGREES,))
    assert d.seed != params.seed
    assert DegreeSequence.from_text(d.to_text()).seed == d.seed


def test_iid_largest_degree_follows_gamma_law(rng_factory):
    n, alpha = 20000, 2.0 / 3.0
    params = ModelParams(tau=2.5, c_f=1.0, n=n)
    scaled = np.array([iid_degrees(params, rng_factory(7, r)).d[0] / n ** alpha for r in range(2000)])
    # (c_F / Gamma_1)^alpha with Gamma_1 ~ Exp(1): P(X <= x) = exp(-x^(-1/alpha))
    result = stats.kstest(scaled, lambda x: np.exp(-np.power(x, -1.0 / alpha)))
    assert result.pvalue > 1e-3, result


def test_theta_limits_formula():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 5)
    expected = np.arange(1, 6, dtype=float) ** (-2.0 / 3.0)
    assert np.allclose(theta.theta, expected)
    assert theta.l2_norm_sq == pytest.approx(float(zeta(4.0 / 3.0)), rel=1e-8)
    assert np.all(np.diff(theta.theta) < 0)


def test_theta_limits_scale_with_cf():
    theta = theta_limits(ModelParams(tau=2.2, c_f=3.0, n=1), 3)
    alpha = 1.0 / 1.2
    assert theta.theta[0] == pytest.approx(3.0 ** alpha)
    assert theta.l2_norm_sq == pytest.approx(3.0 ** (2 * alpha) * float(zeta(2 * alpha)), rel=1e-8)


def test_theta_limits_rejects_empty():
    with pytest.raises(ParameterError):
        theta_limits(ModelParams(tau=2.5, n=1), 0)


@pytest.mark.parametrize("s", [1.2, 4.0 / 3.0, 1.8, 3.0])
def test_zeta_by_summation(s):
    assert zeta_by_summation(s) == pytest.approx(float(zeta(s)), rel=1e-8)


def test_zeta_by_summation_diverges():
    with pytest.raises(ParameterError):
        zeta_by_summation(1.0)


def test_theta_power_sum_past_the_head():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 5000)
    direct = float(np.sum(np.arange(1, 5001, dtype=float) ** (-4.0 / 3.0)))
    assert theta_power_sum(theta, 2.0) == pytest.approx(direct, rel=1e-10)
    direct_tail = float(np.sum(np.arange(2000, 5001, dtype=float) ** (-2.0)))
    assert theta_power_sum(theta, 3.0, start=2000) == pytest.approx(direct_tail, rel=1e-10)


def test_theta_power_sum_divergent_order():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 5000)
    with pytest.raises(ParameterError):
        theta_power_sum(theta, 1.0)


def test_suggest_truncation_is_smallest():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 1)
    K = suggest_truncation(theta, 0.01)
    tail = lambda k: float(zeta(4.0 / 3.0, k + 1))
    assert tail(K) < 0.01 * theta.l2_norm_sq
    assert tail(K - 1) >= 0.01 * theta.l2_norm_sq


def test_theta_from_gamma_uses_clocks():
    gammas = np.array([0.5, 1.7, 2.2, 4.0])
    theta = theta_from_gamma(gammas, 1.0, 2.0 / 3.0, 3)
    assert np.allclose(theta.theta, gammas[:3] ** (-2.0 / 3.0))
    assert theta.K == 3
    assert theta.tail_sq == pytest.approx(4.0 ** (-4.0 / 3.0) + float(zeta(4.0 / 3.0, 5)))


def test_mean_degree_oracle():
    assert mean_degree_oracle(2.5, 1.0) == pytest.approx(2.0 + float(zeta(1.5, 2)))
    tail = np.arange(1, 10 ** 6, dtype=float) ** (-1.5)
    assert mean_degree_oracle(2.5, 1.0) == pytest.approx(1.0 + tail.sum(), rel=1e-3)


def test_validation_tail_example():
    degrees = DegreeSequence([2, 2], tau=2.5, c_f=1.0)
    theta = theta_limits(ModelParams(tau=2.5, n=2), 10)
    report = validate_assumption1(degrees, theta)
    assert report.tail_statistics[0].K == 1
    assert report.tail_statistics[0].value == pytest.approx(4.0 * 2.0 ** (-4.0 / 3.0))


def test_validation_case_one_at_a_million():
    params = ModelParams(tau=2.5, n=10 ** 6)
    degrees = quantile_degrees(params)
    report = validate_assumption1(degrees, theta_limits(params, 10))
    assert report.hub_relative_deviation < 0.05
    assert report.mu_relative_error < 0.02
    assert report.hub_pass and report.mu_pass
    values = [t.value for t in report.tail_statistics]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_validation_never_raises_on_poor_fit():
    degrees = DegreeSequence([8, 1, 1], tau=2.5, c_f=1.0)
    report = validate_assumption1(degrees, theta_limits(ModelParams(tau=2.5, n=3), 10))
    assert not report.hub_pass
    assert not report.passed


def test_build_degrees_dispatch(rng):
    params = ModelParams(tau=2.5, n=100)
    assert build_degrees(params, "quantile").case_tag == CaseTag.QUANTILE_I
    assert build_degrees(params, "iid", rng).case_tag == CaseTag.IID_II
    with pytest.raises(ParameterError):
        build_degrees(params, "iid")
    with pytest.raises(ParameterError):
        build_degrees(params, "pareto")


def test_degree_sequence_rejects_bad_input():
    with pytest.raises(ParityError):
        DegreeSequence([2, 1])
    with pytest.raises(ParameterError):
        DegreeSequence([1, 2, 1])
    with pytest.raises(ParameterError):
        DegreeSequence([2, -1, -1])


def test_degree_sequence_text_format(tmp_path):
    degrees = quantile_degrees(ModelParams(tau=2.5, c_f=1.0, n=4))
    path = tmp_path / "degrees.txt"
    degrees.save(str(path))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# n=4 tau=2.5")
    loaded = DegreeSequence.load(str(path))
    assert loaded.d.tolist() == [3, 2, 2, 1]
    assert loaded.tau == 2.5
    assert loaded.case_tag == CaseTag.QUANTILE_I
