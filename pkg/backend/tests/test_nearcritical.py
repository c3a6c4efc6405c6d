import math

import numpy as np
import pytest

from app.core.exceptions import ParameterError
from app.models.multigraph import MultiGraph
from app.schemas.nearcritical import HubStatistics, Regime
from app.schemas.params import ModelParams
from app.services.degrees import quantile_degrees, theta_limits
from app.services.graph import percolate_retain
from app.services.nearcritical import (
    hub_edge_statistics,
    kappa,
    pool_hub_statistics,
    kappa_closed_form,
    laplace_check,
    laplace_constant,
    poisson_hub_prediction,
    subcritical_prediction,
    supercritical_prediction,
)
from app.services.params import critical_p, criticality_parameter


@pytest.fixture(scope="module")
def million():
    return quantile_degrees(ModelParams(tau=2.5, n=10 ** 6))


def test_kappa_at_two_and_a_half():
    assert kappa(1.0, 2.5) == pytest.approx(3.0 * math.sqrt(math.pi), rel=1e-8)
    assert kappa(1.0, 2.5) == pytest.approx(5.3174, abs=1e-4)


@pytest.mark.parametrize("tau", [2.2, 2.5, 2.8])
@pytest.mark.parametrize("c_f", [0.5, 1.0, 2.0])
def test_kappa_quadrature_matches_gamma(tau, c_f):
    assert kappa(c_f, tau) == pytest.approx(kappa_closed_form(c_f, tau), rel=1e-6)


@pytest.mark.parametrize("tau", [2.1, 2.5, 2.9])
def test_kappa_scaling_in_cf(tau):
    assert kappa(2.0, tau) / kappa(1.0, tau) == pytest.approx(2.0 ** (tau - 1.0), rel=1e-10)
    assert kappa(0.3, tau) > 0


def test_kappa_rejects_bad_input():
    with pytest.raises(ParameterError):
        kappa(1.0, 3.0)
    with pytest.raises(ParameterError):
        kappa(0.0, 2.5)


def test_laplace_check_at_zero(million):
    assert laplace_check(million, 0.1, 0.0) == 0.0


def test_laplace_check_monotone_in_t(million):
    values = [laplace_check(million, 0.1, t) for t in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_laplace_check_matches_constant(million):
    p = million.n ** (-1.0 / 6.0)
    constant = laplace_constant(1.0, 2.5, million.mu)
    assert 0.85 <= laplace_check(million, p, 1.0) / constant <= 1.15


def test_laplace_check_tauberian_shape(million):
    p = million.n ** (-1.0 / 6.0)
    shape = [laplace_check(million, p, t) / t ** 0.5 for t in (0.5, 0.75, 1.0, 1.5, 2.0)]
    assert max(shape) / min(shape) < 1.2


def test_laplace_check_rejects_bad_probability(million):
    with pytest.raises(ParameterError):
        laplace_check(million, 1.0, 1.0)


def test_subcritical_prediction():
    theta = theta_limits(ModelParams(tau=2.5, n=10 ** 6), 10)
    prediction = subcritical_prediction(theta, 10 ** 6, 1e-3, 2.0 / 3.0)
    assert prediction.regime == Regime.SUBCRITICAL
    assert prediction.value("C1") == pytest.approx(10.0)
    assert prediction.value("C1") / prediction.value("C2") == pytest.approx(2.0 ** (2.0 / 3.0))
    assert prediction.value("surplus") == 0.0
    assert len([v for v in prediction.predicted if v.label.startswith("C")]) == 10
    assert prediction.warnings == []


def test_subcritical_prediction_warns_out_of_regime():
    theta = theta_limits(ModelParams(tau=2.5, n=10 ** 6), 10)
    assert subcritical_prediction(theta, 10 ** 6, 5e-5, 2.0 / 3.0).warnings
    assert subcritical_prediction(theta, 10 ** 6, 0.2, 2.0 / 3.0, p_c=0.1).warnings


def test_supercritical_prediction():
    mu, k, n = 3.6, 1.5, 10 ** 6
    prediction = supercritical_prediction(mu, k, 2.5, n, 0.1)
    assert prediction.regime == Regime.SUPERCRITICAL
    assert prediction.value("C1") == pytest.approx(mu * k ** 2 * n * 0.01)
    assert prediction.value("edges_C1") == prediction.value("C1")
    assert prediction.value("C1_ratio") == pytest.approx(mu * k ** 2)
    larger = supercritical_prediction(mu, k, 2.5, n, 0.2)
    assert larger.value("C1") > prediction.value("C1")
    assert supercritical_prediction(mu, k, 2.5, n, 0.01, p_c=0.05).warnings


def test_predicted_giant_fits_in_the_graph(million):
    p = million.n ** (-1.0 / 6.0)
    constant = laplace_constant(1.0, 2.5, million.mu)
    prediction = supercritical_prediction(million.mu, constant, 2.5, million.n, p)
    assert prediction.value("C1") < million.n


def test_missing_label():
    prediction = supercritical_prediction(3.6, 1.5, 2.5, 100, 0.1)
    with pytest.raises(KeyError):
        prediction.value("C7")


def test_poisson_hub_prediction():
    theta = theta_limits(ModelParams(tau=2.5, n=1), 2)
    assert poisson_hub_prediction(theta, 2.0, 3.6, 1, 2) == pytest.approx(2.0 * 2.0 ** (-2.0 / 3.0) / 3.6)


def test_hub_edge_statistics_on_fixed_graphs():
    joined = MultiGraph.from_edges(4, np.array([[0, 1], [0, 1], [2, 3]]))
    apart = MultiGraph.from_edges(4, np.array([[0, 2], [1, 3]]))
    stats = hub_edge_statistics([joined, apart, apart, apart], 1, 2, predicted=0.5)
    assert stats.replicates == 4
    assert stats.mean_edges == pytest.approx(0.5)
    assert stats.same_component_frequency == pytest.approx(0.25)
    assert stats.predicted_edges == 0.5
    with pytest.raises(ParameterError):
        hub_edge_statistics([joined], 1, 1)
    with pytest.raises(ParameterError):
        hub_edge_statistics([], 1, 2)


def test_hub_connection_regimes(rng):
    degrees = quantile_degrees(ModelParams(tau=2.5, n=10 ** 4))
    p_c = critical_p(1.0, criticality_parameter(degrees))
    low = hub_edge_statistics((percolate_retain(degrees, p_c / 50.0, rng) for _ in range(20)), 1, 2)
    high = hub_edge_statistics((percolate_retain(degrees, min(0.5, 10 * p_c), rng) for _ in range(20)), 1, 2)
    assert low.same_component_frequency <= 0.2
    assert high.same_component_frequency >= 0.9


def test_pool_hub_statistics_weights_by_replicates():
    a = HubStatistics(i=1, j=2, replicates=1, mean_edges=2.0, same_component_frequency=1.0)
    b = HubStatistics(i=1, j=2, replicates=3, mean_edges=0.0, same_component_frequency=0.0)
    pooled = pool_hub_statistics([a, b], predicted=0.4)
    assert pooled.replicates == 4
    assert pooled.mean_edges == pytest.approx(0.5)
    assert pooled.same_component_frequency == pytest.approx(0.25)
    assert pooled.predicted_edges == 0.4
    with pytest.raises(ParameterError):
        pool_hub_statistics([])
    with pytest.raises(ParameterError):
        pool_hub_statistics([a, b.model_copy(update={"j": 3})])
