import math

import mpmath
import numpy as np
import pytest

from euler_blowup.core import GasParameters, WeightFunction, derived_constants
from euler_blowup.fields import FieldEvaluator, RadialField, RadialProfile
from euler_blowup.moments import (
    cho_functional,
    envelope,
    excess_energy,
    excess_mass,
    holder_check,
    moment_G,
    moment_G_prime,
    moment_Q,
    moment_sample,
    regional_energies,
    second_derivative_identity_check,
    second_derivative_rhs,
)
from euler_blowup.oracles import CaseIIGenerator, ExactSolution


def _phi(r):
    r = abs(r)
    return 1 - 2 * r * r if r < 0.5 else 2 * (r - 1) ** 2


def test_moments_against_mpmath(weight):
    ex = ExactSolution(-7.0)
    prof = ex.profile(0.0)
    rho = lambda x: 1 / (1 + x * x) ** 2
    G = mpmath.quad(lambda x: rho(x) * _phi(x), [-1, -0.5, 0, 0.5, 1])
    # phi'(x) * V * rho with V = -7 x and phi' = -4x inside, 4(x-1) outside (x > 0)
    dphi = lambda x: -4 * x if abs(x) < 0.5 else 4 * (abs(x) - 1) * mpmath.sign(x)
    Gp = mpmath.quad(lambda x: dphi(x) * (-7 * x) * rho(x), [-1, -0.5, 0, 0.5, 1])
    assert moment_G(prof, weight) == pytest.approx(float(G), rel=1e-11)
    assert moment_G_prime(prof, weight) == pytest.approx(float(Gp), rel=1e-10)
    assert float(G) == pytest.approx(0.823354608585763, rel=1e-13)
    assert float(Gp) == pytest.approx(3.97311752891659, rel=1e-12)


def test_converging_flow_has_positive_G_prime(weight, cii1_background):
    gen = CaseIIGenerator(cii1_background, a_rho=0.2, a_v=-8.0)
    assert moment_G_prime(gen.profile(), weight) > 0


def test_moment_requires_cover(weight):
    f = RadialField(np.linspace(0, 0.5, 11), np.ones(11), np.zeros(11), np.ones(11))
    with pytest.raises(ValueError):
        moment_G(f, weight)


def test_G_prime_is_time_derivative(weight):
    ex = ExactSolution(-1.0)
    ev = ex.evaluator()
    h = 1e-4
    fd = (moment_G(ev.at_time(0.3 + h), weight) - moment_G(ev.at_time(0.3 - h), weight)) / (2 * h)
    assert moment_G_prime(ev.at_time(0.3), weight) == pytest.approx(fd, rel=1e-7)


def test_regional_energies_partition(weight, gas):
    en = regional_energies(ExactSolution(-1.0).profile(0.2), weight, gas)
    assert en["E_omega1"] + en["E_omega2"] < en["E_total"]
    assert en["E_total"] == pytest.approx(en["E_k"] + en["E_p"])


def test_case2_unperturbed_state_excess(cii1_background, weight):
    prof = CaseIIGenerator(cii1_background).sample(3.0, 301)
    assert excess_energy(prof, cii1_background) == 0.0
    assert excess_mass(prof, 1.0) == 0.0
    assert moment_Q(prof, weight, 1.0) == 0.0


def test_moment_sample_collects(weight, gas):
    s = moment_sample(ExactSolution(0.0).profile(0.0), weight, gas, rho_bar=0.0)
    assert s.Q == pytest.approx(s.G)
    assert s.G_prime == pytest.approx(0.0, abs=1e-15)


def test_holder_exact_times(weight, gas):
    ex = ExactSolution(-7.0)
    for t in np.linspace(0.0, 2.0, 10):
        res = holder_check(ex.profile(float(t)), weight, gas, 0.0)
        assert res.satisfied
    assert holder_check(ex.profile(0.0), weight, gas, 0.0).ratio < 1


def test_holder_uniform_state_is_tight(weight, gas):
    r = np.linspace(0, 1, 101)
    f = RadialField(r, 2 * np.ones(101), np.zeros(101), 8 * np.ones(101))
    res = holder_check(f, weight, gas)
    assert res.satisfied
    # the pressure integral runs over the whole ball |B_R| = 2
    assert res.ratio == pytest.approx(weight.integral(1) ** 3 / (2.0 * weight.power_integral(1, 1.5) ** 2), rel=1e-6)


def test_holder_scaled_density(weight, gas):
    ex = ExactSolution(-1.0)
    prof = RadialProfile(lambda r: (10 * ex.fields(r, 0.0)[0], *ex.fields(r, 0.0)[1:]), 1)
    assert holder_check(prof, weight, gas).satisfied


def random_fields(rng, count, samples=801):
    r = np.linspace(0.0, 1.0, samples)
    for _ in range(count):
        A, L, P = rng.uniform(0.1, 10.0, 3)
        beta, mu = rng.uniform(1.0, 3.0), rng.uniform(0.0, 1.0)
        a, eps, om = rng.uniform(-10, 10), rng.uniform(0, 0.9), rng.uniform(0, 20)
        s = 1.0 + (r / L) ** 2
        rho = A * s**-2 * (1 + eps * np.sin(om * r))
        p = P * s**-beta * (1 + eps * np.cos(om * r))
        yield RadialField(r, rho, a * r * s**-mu, p)


def test_holder_random_fields(weight, gas):
    rng = np.random.default_rng(7)
    bad = [f for f in random_fields(rng, 1000) if not holder_check(f, weight, gas).satisfied]
    assert not bad


def test_second_derivative_identity_exact(weight):
    chk = second_derivative_identity_check(ExactSolution(-1.0).evaluator(), weight, 0.2)
    assert chk["residual"] < 1e-4 * max(1.0, abs(chk["rhs"]))


def test_second_derivative_pressureless_static(weight):
    ev = FieldEvaluator(lambda r, t: (1 + np.cos(r) ** 2, 0 * r, 0 * r), 1)
    chk = second_derivative_identity_check(ev, weight, 0.5)
    assert chk["rhs"] == 0.0
    assert chk["residual"] < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_constant_pressure_contributes_nothing(n):
    w = WeightFunction(1.0, n + 1.0)
    prof = RadialProfile(lambda r: (1 + 0 * r, 0 * r, 2.5 + 0 * r), n)
    assert second_derivative_rhs(prof, w) == pytest.approx(0.0, abs=1e-10)
    assert second_derivative_rhs(prof, w, p_bar=2.5) == 0.0


def test_background_subtracted_identity(weight):
    ev = FieldEvaluator(lambda r, t: (1 + 0 * r, 0 * r, 1 + 0 * r), 1)
    chk = second_derivative_identity_check(ev, weight, 0.3, p_bar=1.0)
    assert chk["residual"] < 1e-8


@pytest.mark.parametrize("a0", [0.0, -1.0, -7.0])
def test_envelope_contains_exact_trajectory(a0, weight, gas):
    ex = ExactSolution(a0)
    cb = derived_constants(gas, weight, 0.0)
    ev = ex.evaluator()
    for t in np.linspace(0.0, 2.0, 50):
        prof = ev.at_time(float(t))
        G, q = moment_G(prof, weight), moment_G_prime(prof, weight)
        assert q * q <= envelope(G, cb.C, ex.energy, cb.A1, 3.0, 2.0, 1) + 1e-9


def test_envelope_endpoints():
    cb_A1, E = 1.3, 2.0
    G_plus = (2.0 * 1.0 * E / cb_A1) ** (1 / 3)
    assert envelope(0.0, 2.0, E, cb_A1, 3.0, 2.0, 1) == 0.0
    assert float(envelope(G_plus, 2.0, E, cb_A1, 3.0, 2.0, 1)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.5, 3.0, 10.0])
def test_cho_matches_closed_form(t):
    ex = ExactSolution(-7.0)
    assert cho_functional(ex.evaluator(), t) == pytest.approx(float(ex.cho_supremum(t)), rel=1e-12)


def test_cho_overshoots_for_negative_slope():
    # t psi'/psi - 1 has the sign of -a0 t - 1
    ex = ExactSolution(-7.0)
    assert cho_functional(ex.evaluator(), 50.0) > 1.0
    assert cho_functional(ex.evaluator(), 7.0 / 51.0) == pytest.approx(0.0, abs=1e-12)
