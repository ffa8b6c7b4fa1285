import numpy as np
import pytest

from osgoodlab.carleman import build_weight_table
from osgoodlab.modulus import make_builtin, normalize_sqrt_cap
from osgoodlab.pliss import build_construction, make_cutoffs


@pytest.fixture(scope="session")
def cuts():
    return make_cutoffs()


@pytest.fixture(scope="session")
def mu_sqrt_capped():
    return normalize_sqrt_cap(make_builtin("sqrt"))


@pytest.fixture(scope="session")
def pc200(mu_sqrt_capped):
    return build_construction(mu_sqrt_capped, n_segments=200)


@pytest.fixture(scope="session")
def wt_linear():
    return build_weight_table(make_builtin("linear"), 1000.0)


@pytest.fixture(scope="session")
def wt_loglinear():
    return build_weight_table(make_builtin("loglinear"), 1000.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _isolate_output_env(monkeypatch):
    monkeypatch.delenv("OSGOODLAB_OUT", raising=False)
