import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osgoodlab.modulus import (ClassificationError, Modulus, ModulusError,
                               OsgoodClass, check_remark1, make_builtin,
                               modulus_from_name, normalize_sqrt_cap,
                               osgood_integral)

ALL_BUILTINS = ["linear", "loglinear", "sqrt", "power:0.8"]


def test_builtin_values():
    assert make_builtin("linear")(0.25) == 0.25
    assert make_builtin("sqrt")(0.25) == 0.5
    # closed form s(1 - ln s) at s = 1/e
    assert make_builtin("loglinear")(math.exp(-1)) == pytest.approx(
        2.0 * math.exp(-1), rel=1e-14)
    assert make_builtin("power", alpha=0.8)(0.01) == pytest.approx(
        0.01**0.8, rel=1e-14)


def test_power_rejects_bad_alpha():
    with pytest.raises(ModulusError):
        make_builtin("power", alpha=1.2)
    with pytest.raises(ModulusError):
        make_builtin("power", alpha=0.0)
    with pytest.raises(ModulusError):
        make_builtin("power")


def test_osgood_values_against_antiderivatives():
    # oracles: -ln(eps), ln(1 - ln s) evaluated at the floor, 2 - 2 sqrt(eps)
    res = osgood_integral(make_builtin("linear"))
    assert res.value == pytest.approx(math.log(1e12), rel=1e-10)
    assert res.classification is OsgoodClass.DIVERGENT

    res = osgood_integral(make_builtin("loglinear"))
    assert res.value == pytest.approx(math.log(1.0 - math.log(1e-12)), rel=1e-10)
    assert res.classification is OsgoodClass.DIVERGENT

    res = osgood_integral(make_builtin("sqrt"))
    assert res.value == pytest.approx(2.0 - 2e-6, abs=1e-8)
    assert res.classification is OsgoodClass.CONVERGENT

    res = osgood_integral(make_builtin("power", alpha=0.8))
    assert res.value == pytest.approx((1.0 - 1e-12**0.2) / 0.2, rel=1e-10)
    assert res.classification is OsgoodClass.CONVERGENT


def test_osgood_rejects_contradictory_claim():
    fake = Modulus("fake", np.sqrt, OsgoodClass.DIVERGENT,
                   lower_linear_constant=1.0)
    with pytest.raises(ClassificationError):
        osgood_integral(fake)


def test_osgood_floor_validation():
    with pytest.raises(ModulusError):
        osgood_integral(make_builtin("sqrt"), eps_floor=1.5)


@pytest.mark.parametrize("name", ALL_BUILTINS)
def test_remark1_passes_for_builtins(name):
    rep = check_remark1(modulus_from_name(name), sample_count=64)
    assert rep.passed, rep.to_json()


def test_remark1_flags_convex_power():
    fake = Modulus("square", lambda s: np.asarray(s) ** 2,
                   OsgoodClass.UNKNOWN, lower_linear_constant=0.0)
    rep = check_remark1(fake, sample_count=64)
    failed = {r.check_id for r in rep.failures()}
    assert "concavity" in failed or "lower-linear" in failed


def test_remark1_sample_floor():
    with pytest.raises(ModulusError):
        check_remark1(make_builtin("linear"), sample_count=8)


def test_normalize_cap_examples():
    capped = normalize_sqrt_cap(make_builtin("power", alpha=0.8))
    assert capped(0.01) == pytest.approx(min(0.01**0.8, 0.1), rel=1e-14)
    assert capped.normalized
    lin = normalize_sqrt_cap(make_builtin("linear"))
    assert lin(0.25) == 0.25
    sq = normalize_sqrt_cap(make_builtin("sqrt"))
    assert sq(0.25) == 0.5
    assert sq.lower_linear_constant == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("name", ALL_BUILTINS)
def test_normalize_idempotent(name):
    once = normalize_sqrt_cap(modulus_from_name(name))
    twice = normalize_sqrt_cap(once)
    s = np.logspace(-10, 0, 101)
    np.testing.assert_array_equal(np.asarray(once(s)), np.asarray(twice(s)))
    assert once.osgood_class is modulus_from_name(name).osgood_class


@given(st.floats(min_value=1e-10, max_value=1.0),
       st.floats(min_value=1e-10, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=60, deadline=None)
def test_builtin_concavity_property(s1, s2, lam):
    for name in ALL_BUILTINS:
        mu = modulus_from_name(name)
        mid = lam * s1 + (1 - lam) * s2
        lhs = float(mu(mid))
        rhs = lam * float(mu(s1)) + (1 - lam) * float(mu(s2))
        assert lhs >= rhs - 1e-12


def test_dyadic_chain_monotone():
    # mu(s)/s is non-increasing in s, so at s = 2^-k the chain
    # mu(2^-k) * 2^k is non-decreasing in k
    for name in ALL_BUILTINS:
        mu = modulus_from_name(name)
        k = np.arange(1, 40)
        chain = np.asarray(mu(2.0**-k)) * 2.0**k
        assert np.all(np.diff(chain) >= -1e-12 * chain[:-1])
