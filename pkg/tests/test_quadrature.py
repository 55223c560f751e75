import math

import numpy as np
import pytest

from euler_blowup.quadrature import (
    QuadratureError,
    adaptive_simpson,
    integrate_to_infinity,
    radial_integral,
    unit_ball_volume,
)


def test_polynomial_exact():
    assert adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0) == pytest.approx(0.0, abs=1e-13)


def test_smooth_transcendental():
    val = adaptive_simpson(np.exp, 0.0, 1.0)
    assert val == pytest.approx(math.e - 1.0, rel=1e-11)


def test_kink_with_breakpoint():
    f = lambda x: np.abs(x - 0.3)
    val = adaptive_simpson(f, 0.0, 1.0, breakpoints=[0.3])
    assert val == pytest.approx(0.5 * (0.09 + 0.49), abs=1e-14)


def test_reversed_limits_flip_sign():
    a = adaptive_simpson(np.sin, 0.0, 2.0)
    assert adaptive_simpson(np.sin, 2.0, 0.0) == pytest.approx(-a, abs=1e-15)


def test_tail_lorentzian():
    val = integrate_to_infinity(lambda r: 1.0 / (1.0 + r * r), 0.0)
    assert val == pytest.approx(math.pi / 2, rel=1e-10)


def test_radial_integral_gaussian_3d():
    # int exp(-|x|^2) over R^3 = pi^{3/2}
    val = radial_integral(lambda r: np.exp(-r * r), 3, 0.0, math.inf)
    assert val == pytest.approx(math.pi**1.5, rel=1e-9)


@pytest.mark.parametrize("n", range(1, 8))
def test_unit_ball_volume(n):
    assert unit_ball_volume(n) == pytest.approx(math.pi ** (n / 2) / math.gamma(n / 2 + 1), rel=1e-15)


def test_unit_ball_volume_exact_low_dims():
    assert unit_ball_volume(1) == 2.0
    assert unit_ball_volume(2) == math.pi


def test_nonconvergent_integrand_raises():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, max_level=6)
