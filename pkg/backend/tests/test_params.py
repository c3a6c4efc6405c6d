import pytest

from app.core.exceptions import DegenerateInputError, ParameterError, SupercriticalRangeError
from app.services.params import critical_p, criticality_parameter, exponents, power_p


def test_exponents_at_two_and_a_half():
    e = exponents(2.5)
    assert e.alpha == pytest.approx(2.0 / 3.0)
    assert e.rho == pytest.approx(1.0 / 3.0)
    assert e.eta == pytest.approx(1.0 / 3.0)


def test_exponents_near_two():
    e = exponents(2.1)
    assert e.alpha == pytest.approx(10.0 / 11.0)
    assert e.rho == pytest.approx(1.0 / 11.0)
    assert e.eta == pytest.approx(9.0 / 11.0)


@pytest.mark.parametrize("tau", [2.05, 2.3, 2.5, 2.77, 2.95])
def test_exponent_identities(tau):
    e = exponents(tau)
    assert 0.5 < e.alpha < 1.0
    assert e.rho == pytest.approx(e.alpha * (tau - 2.0))
    assert e.eta == pytest.approx(e.alpha * (3.0 - tau))
    assert 2.0 * e.alpha - 1.0 == pytest.approx(e.eta)
    assert 1.0 - e.alpha == pytest.approx(e.rho)


def test_window_shrinks_as_tau_approaches_three():
    assert exponents(2.999).eta < 1e-3


@pytest.mark.parametrize("tau", [2.0, 3.0, 1.5, 3.5])
def test_exponents_reject_out_of_range(tau):
    with pytest.raises(ParameterError):
        exponents(tau)


@pytest.mark.parametrize(
    "degrees, expected",
    [((3, 2, 2, 1), 1.25), ((1, 1), 0.0), ((2, 2, 2), 1.0)],
)
def test_criticality_parameter(degrees, expected):
    assert criticality_parameter(degrees) == pytest.approx(expected)


def test_criticality_parameter_all_zero():
    with pytest.raises(DegenerateInputError):
        criticality_parameter([0, 0, 0])


def test_critical_p_examples():
    assert critical_p(1.0, 1.25) == pytest.approx(0.8)
    assert critical_p(0.5, 100.0) == pytest.approx(0.005)


def test_critical_p_above_one():
    with pytest.raises(SupercriticalRangeError):
        critical_p(2.0, 1.0)


def test_power_p():
    assert power_p(1000, 1.0 / 3.0) == pytest.approx(0.1)
    with pytest.raises(ParameterError):
        power_p(1000, 0.0)


@pytest.mark.parametrize("degrees", [[2, 1, 1], [5, 3, 3, 2, 2, 2, 2, 2, 2, 1], [7, 4, 1, 1, 1]])
def test_criticality_parameter_unchanged_by_duplication(degrees):
    assert criticality_parameter(degrees + degrees) == criticality_parameter(degrees)
    assert criticality_parameter(degrees * 5) == criticality_parameter(degrees)
