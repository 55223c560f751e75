"""Closed-form reference solutions and Case II initial-data generators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Background, GasParameters
from .fields import FieldEvaluator, RadialField, RadialProfile
from .quadrature import radial_integral

EXACT_GAS = GasParameters(n=1, gamma=3.0)


@dataclass(frozen=True)
class ExactSolution:
    """Globally smooth 1-d solution for ``gamma = 3`` with linear velocity.

    ``psi(t) = sqrt((2 + a0^2) t^2 + 2 a0 t + 1)``, ``V = (psi'/psi) x``,
    ``rho = psi^3 / (psi^2 + x^2)^2``, ``p = 1 / (psi (psi^2 + x^2))``.
    """

    a0: float

    @property
    def growth(self) -> float:
        return 2.0 + self.a0**2

    def psi(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(self.growth * t * t + 2.0 * self.a0 * t + 1.0)

    def dpsi(self, t):
        t = np.asarray(t, dtype=float)
        return (self.growth * t + self.a0) / self.psi(t)

    def fields(self, x, t):
        """``(rho, V, p)`` at position ``x`` (any shape) and time ``t``."""
        x = np.asarray(x, dtype=float)
        psi = self.psi(t)
        s = psi * psi + x * x
        rho = psi**3 / (s * s)
        V = self.dpsi(t) / psi * x
        p = 1.0 / (psi * s)
        return rho, V, p

    def evaluator(self) -> FieldEvaluator:
        return FieldEvaluator(self.fields, n=1, radial=True)

    def profile(self, t: float) -> RadialProfile:
        return self.evaluator().at_time(t)

    @property
    def mass(self) -> float:
        return math.pi / 2.0

    @property
    def energy(self) -> float:
        return math.pi / 4.0 * self.growth

    def potential_energy(self, t):
        return math.pi / (2.0 * self.psi(t) ** 2)

    def kinetic_energy(self, t):
        # pi psi'^2 / 4; equals energy - potential_energy(t)
        return math.pi * self.dpsi(t) ** 2 / 4.0

    def classical_moment(self, t):
        return math.pi / 4.0 * self.psi(t) ** 2

    def density_sup(self, t):
        """Density maximum over any ball centred at 0 (attained at x = 0)."""
        return 1.0 / self.psi(t)

    def cho_supremum(self, t):
        """``sup_x |t (V x)/(1 + x^2)|`` = ``t |psi'/psi|``, approached as |x| grows."""
        return np.abs(np.asarray(t, float) * self.dpsi(t) / self.psi(t))

    def pde_residuals(self, x, t, h: float = 1e-3):
        """Residuals of mass, momentum and pressure equations at ``(x, t)``.

        Derivatives use central differences at steps ``h`` and ``h/2``
        combined by Richardson extrapolation (fourth order).  Steps are
        scaled by the local length ``psi(t)`` and time ``psi/sqrt(2+a0^2)``
        so that strongly compressed states are resolved.
        """
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        psi = self.psi(t)
        hx = h * psi
        ht = h * psi / math.sqrt(self.growth)

        def d(fn, var):
            def cd(scale):
                if var == "x":
                    step = hx * scale
                    return (fn(x + step, t) - fn(x - step, t)) / (2 * step)
                step = ht * scale
                return (fn(x, t + step) - fn(x, t - step)) / (2 * step)

            return (4.0 * cd(0.5) - cd(1.0)) / 3.0

        rho_f = lambda xx, tt: self.fields(xx, tt)[0]
        v_f = lambda xx, tt: self.fields(xx, tt)[1]
        p_f = lambda xx, tt: self.fields(xx, tt)[2]
        mom = lambda xx, tt: rho_f(xx, tt) * v_f(xx, tt)
        flux = lambda xx, tt: rho_f(xx, tt) * v_f(xx, tt) ** 2 + p_f(xx, tt)

        rho, V, p = self.fields(x, t)
        mass_res = d(rho_f, "t") + d(mom, "x")
        mom_res = d(mom, "t") + d(flux, "x")
        pres_res = d(p_f, "t") + V * d(p_f, "x") + EXACT_GAS.gamma * p * d(v_f, "x")
        return mass_res, mom_res, pres_res


def bump(s):
    """``(1 - s^2)^3`` on ``|s| < 1``, zero outside; C^2 at ``|s| = 1``."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 3, 0.0)


@dataclass(frozen=True)
class CaseIIGenerator:
    """Compact perturbation of a constant state.

    ``rho0 = rho_bar + a_rho b``, ``p0 = p_bar + a_p b``,
    ``V0 = a_v x b`` with ``b = bump(|x| / R0)``.  ``a_v < 0`` gives a
    converging flow.
    """

    background: Background
    n: int = 1
    a_rho: float = 0.0
    a_v: float = 0.0
    a_p: float = 0.0

    def __post_init__(self):
        # the bump peaks at 1, so the minimum of rho0 and p0 is at the origin
        if self.background.rho_bar + min(self.a_rho, 0.0) <= 0:
            raise ValueError("density amplitude makes the initial density nonpositive")
        if self.background.p_bar + min(self.a_p, 0.0) <= 0:
            raise ValueError("pressure amplitude makes the initial pressure nonpositive")

    @property
    def gas(self) -> GasParameters:
        return GasParameters(self.n, self.background.gamma)

    def profile_func(self, r):
        bg = self.background
        r = np.asarray(r, dtype=float)
        b = bump(r / bg.R0)
        return bg.rho_bar + self.a_rho * b, self.a_v * r * b, bg.p_bar + self.a_p * b

    def profile(self) -> RadialProfile:
        return RadialProfile(self.profile_func, self.n)

    def evaluator_at_zero(self) -> FieldEvaluator:
        return FieldEvaluator(lambda r, t: self.profile_func(r), self.n, radial=True)

    def initial_mass(self) -> float:
        """``m(0)``: excess mass over the background."""
        R0 = self.background.R0
        return radial_integral(lambda r: self.a_rho * bump(r / R0), self.n, 0.0, R0)

    def initial_energy(self) -> float:
        """``e(0)``: kinetic energy plus excess potential energy."""
        bg = self.background
        R0 = bg.R0

        def density(r):
            rho, v, p = self.profile_func(r)
            return 0.5 * rho * v * v + (p - bg.p_bar) / (bg.gamma - 1.0)

        return radial_integral(density, self.n, 0.0, R0)

    def sample(self, r_max: float, samples: int = 4001) -> RadialField:
        r = np.linspace(0.0, r_max, samples)
        rho, v, p = self.profile_func(r)
        return RadialField(r, rho, v, p, n=self.n)


def generate_case2(gen: CaseIIGenerator, r_max: float, samples: int = 4001):
    """Sampled Case II initial field with its excess mass and energy."""
    return gen.sample(r_max, samples), gen.initial_mass(), gen.initial_energy()


def converging_preset(background: Background, n: int = 1, a_v: float = -8.0,
                      a_rho: float = 0.2, a_p: float = 0.0) -> CaseIIGenerator:
    return CaseIIGenerator(background, n=n, a_rho=a_rho, a_v=-abs(a_v), a_p=a_p)
