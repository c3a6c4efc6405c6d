import numpy as np
import pytest

from app.core.rng import make_rng
from app.models.degree_sequence import DegreeSequence
from app.schemas.params import ModelParams
from app.services.degrees import quantile_degrees


@pytest.fixture
def rng():
    return make_rng(12345, 0)


@pytest.fixture
def rng_factory():
    def factory(*keys):
        return make_rng(12345, *keys)
    return factory


@pytest.fixture
def model_params():
    return ModelParams(tau=2.5, lam=1.0, c_f=1.0, n=2000, seed=7)


@pytest.fixture
def quantile_2000(model_params):
    return quantile_degrees(model_params)


@pytest.fixture
def small_degrees():
    return DegreeSequence([2, 1, 1])
