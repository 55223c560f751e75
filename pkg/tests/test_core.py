import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from euler_blowup.core import (
    Background,
    GasParameters,
    WeightFunction,
    derived_constants,
    entropy_inf,
    phi_eval,
    sound_speed,
)


def test_reference_weight_constants(weight):
    assert weight.B == 2.0
    assert weight.C == 2.0
    assert weight.inner_radius == 0.5


def test_weight_shape_at_landmarks(weight):
    assert weight.value(0.0) == 1.0
    assert float(weight.value(weight.inner_radius)) == pytest.approx(1.0 / weight.k)
    assert float(weight.value(1.0)) == 0.0
    assert float(weight.value(5.0)) == 0.0
    assert phi_eval(0.0, weight) == (1.0, 0.0)


def _phi_mp(r, R, k):
    B = mpmath.mpf(k) / (R * R * (k - 1))
    C = B * (k - 1)
    return 1 - B * r * r if r < R - R / k else C * (r - R) ** 2


def test_integrals_against_mpmath(weight):
    R, k = 1, 2
    K = 2 * mpmath.quad(lambda r: _phi_mp(r, R, k), [0, 0.5, 1])
    P = 2 * mpmath.quad(lambda r: _phi_mp(r, R, k) ** 1.5, [0, 0.5, 1])
    assert weight.integral(1) == pytest.approx(float(K), rel=1e-11)
    assert weight.power_integral(1, 1.5) == pytest.approx(float(P), rel=1e-10)
    assert float(P) == pytest.approx(0.858462013693939, rel=1e-13)


def test_reference_constants(gas, weight):
    cb = derived_constants(gas, weight, 0.0)
    assert cb.K == pytest.approx(1.0, rel=1e-12)
    assert cb.A1 == pytest.approx(1.356931219473378, rel=1e-10)
    assert cb.A2 == 4.0
    assert cb.delta == 2.0
    assert cb.omega_n == 2.0


def test_A1_scales_with_entropy(gas, weight):
    a = derived_constants(gas, weight, 0.0).A1
    b = derived_constants(gas, weight, 1.5).A1
    assert b / a == pytest.approx(math.exp(1.5), rel=1e-12)


def test_derived_constants_rejects_k_not_above_n():
    with pytest.raises(ValueError):
        derived_constants(GasParameters(2, 2.0), WeightFunction(1.0, 2.0), 0.0)
    with pytest.raises(ValueError):
        derived_constants(GasParameters(1, 2.0), WeightFunction(1.0, 2.0), math.inf)


@pytest.mark.parametrize("bad", [dict(n=0, gamma=2.0), dict(n=1, gamma=1.0), dict(n=1.5, gamma=2.0)])
def test_gas_validation(bad):
    with pytest.raises(ValueError):
        GasParameters(**bad)


def test_weight_validation():
    with pytest.raises(ValueError):
        WeightFunction(0.0, 2.0)
    with pytest.raises(ValueError):
        WeightFunction(1.0, 1.0)


def test_background_radius_and_speed():
    bg = Background(1.0, 1.0, 0.25, 3.0)
    assert bg.sigma == pytest.approx(math.sqrt(3.0))
    assert float(bg.radius(1.0)) == pytest.approx(0.25 + math.sqrt(3.0))
    with pytest.raises(ValueError):
        sound_speed(0.0, 1.0, 3.0)


def test_entropy_inf_ignores_vacuum():
    rho = np.array([1.0, 2.0, 0.0])
    p = np.array([1.0, 8.0, 0.0])
    assert entropy_inf(rho, p, 3.0) == pytest.approx(0.0)


@settings(max_examples=1000, deadline=None)
@given(R=st.floats(0.05, 50.0), k=st.floats(1.01, 20.0))
def test_join_is_c1(R, k):
    w = WeightFunction(R, k)
    r1 = w.inner_radius
    inner_val = 1.0 - w.B * r1 * r1
    outer_val = w.C * (r1 - R) ** 2
    assert inner_val == pytest.approx(1.0 / k, rel=1e-10, abs=1e-12)
    assert outer_val == pytest.approx(1.0 / k, rel=1e-10, abs=1e-12)
    assert -2.0 * w.B * r1 == pytest.approx(2.0 * w.C * (r1 - R), rel=1e-10)
    assert -2.0 * w.B * r1 == pytest.approx(-2.0 / R, rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(R=st.floats(0.1, 10.0), k=st.floats(1.05, 10.0))
def test_derivative_ratio_bound(R, k):
    w = WeightFunction(R, k)
    r = np.linspace(0.0, R * (1 - 1e-9), 2001)
    ratio = w.derivative(r) ** 2 / w.value(r)
    assert np.max(ratio) <= 4.0 * w.C * (1 + 1e-9)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(1, 4), gamma=st.floats(1.01, 5.0), extra=st.floats(0.01, 10.0))
def test_A2_bounds(n, gamma, extra):
    g = GasParameters(n, gamma)
    w = WeightFunction(1.0, n + extra)
    cb = derived_constants(g, w, 0.0)
    assert cb.A2 >= 2.0
    assert cb.A2 >= (gamma - 1.0) * w.k
    assert cb.A1 > 0
