import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osgoodlab.bump import smoothstep, smoothstep_d1, smoothstep_d2


def test_exact_plateaus():
    assert smoothstep(0.0) == 0.0
    assert smoothstep(-3.0) == 0.0
    assert smoothstep(1.0) == 1.0
    assert smoothstep(7.5) == 1.0
    assert smoothstep_d1(0.0) == 0.0
    assert smoothstep_d1(1.0) == 0.0
    assert smoothstep_d2(-1.0) == 0.0


def test_midpoint_symmetry():
    assert smoothstep(0.5) == pytest.approx(0.5, abs=1e-15)
    assert smoothstep_d1(0.5) == pytest.approx(2.0, abs=1e-12)
    x = np.linspace(0.01, 0.99, 199)
    np.testing.assert_allclose(smoothstep(x) + smoothstep(1.0 - x), 1.0,
                               atol=1e-14)


@given(st.floats(min_value=0.02, max_value=0.98))
@settings(max_examples=50, deadline=None)
def test_derivatives_match_finite_differences(x):
    h = 1e-6
    fd1 = (smoothstep(x + h) - smoothstep(x - h)) / (2 * h)
    assert fd1 == pytest.approx(smoothstep_d1(x), rel=1e-6, abs=1e-8)
    fd2 = (smoothstep_d1(x + h) - smoothstep_d1(x - h)) / (2 * h)
    assert fd2 == pytest.approx(smoothstep_d2(x), rel=1e-5, abs=1e-6)


@given(st.floats(min_value=-1.0, max_value=2.0),
       st.floats(min_value=-1.0, max_value=2.0))
@settings(max_examples=100, deadline=None)
def test_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    assert smoothstep(lo) <= smoothstep(hi) + 1e-15
