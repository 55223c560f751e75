"""Gas, weight-function and background data with their derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import radial_integral, unit_ball_volume

VACUUM_FLOOR = 1e-12


@dataclass(frozen=True)
class GasParameters:
    """Spatial dimension and heat ratio of a polytropic gas."""

    n: int
    gamma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        if not self.gamma > 1.0:
            raise ValueError(f"heat ratio must exceed 1, got {self.gamma}")

    @property
    def delta(self) -> float:
        return min(2.0, self.n * (self.gamma - 1.0))

    @property
    def omega_n(self) -> float:
        return unit_ball_volume(self.n)


@dataclass(frozen=True)
class WeightFunction:
    """Compactly supported C^1 weight: ``1 - B r^2`` inside the join radius,
    ``C (r - R)^2`` between the join radius and ``R``, zero beyond ``R``."""

    R: float
    k: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"weight radius must be positive, got {self.R}")
        if not self.k > 1:
            raise ValueError(f"shape parameter k must exceed 1, got {self.k}")

    @property
    def B(self) -> float:
        return self.k / (self.R**2 * (self.k - 1.0))

    @property
    def C(self) -> float:
        return self.B * (self.k - 1.0)

    @property
    def inner_radius(self) -> float:
        return self.R - self.R / self.k

    @property
    def joins(self) -> tuple[float, float]:
        return (self.inner_radius, self.R)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        inner = 1.0 - self.B * r * r
        outer = self.C * (r - self.R) ** 2
        return np.where(r < self.inner_radius, inner, np.where(r < self.R, outer, 0.0))

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        inner = -2.0 * self.B * r
        outer = 2.0 * self.C * (r - self.R)
        return np.where(r < self.inner_radius, inner, np.where(r < self.R, outer, 0.0))

    def second_derivative(self, r):
        """Piecewise constant; defined almost everywhere."""
        r = np.asarray(r, dtype=float)
        return np.where(
            r < self.inner_radius, -2.0 * self.B, np.where(r < self.R, 2.0 * self.C, 0.0)
        )

    def derivative_over_r(self, r):
        """``phi'(r)/r`` with the removable value ``-2B`` at the origin."""
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        outer = 2.0 * self.C * (r - self.R) / safe
        return np.where(
            r < self.inner_radius, -2.0 * self.B, np.where(r < self.R, outer, 0.0)
        )

    def integral(self, n: int) -> float:
        """``K``: integral of the weight over ``R^n``."""
        return radial_integral(self.value, n, 0.0, self.R, self.joins[:1])

    def power_integral(self, n: int, power: float) -> float:
        """Integral of ``phi**power`` over the ball of radius ``R``."""
        return radial_integral(
            lambda r: self.value(r) ** power, n, 0.0, self.R, self.joins[:1]
        )


def phi_eval(r: float, w: WeightFunction) -> tuple[float, float]:
    """Weight value and first derivative at radius ``r >= 0``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return float(w.value(r)), float(w.derivative(r))


@dataclass(frozen=True)
class Background:
    """Constant state perturbed inside the ball of radius ``R0``."""

    rho_bar: float
    p_bar: float
    R0: float
    gamma: float

    def __post_init__(self):
        if not self.R0 > 0:
            raise ValueError(f"perturbation radius must be positive, got {self.R0}")
        # validates rho_bar, p_bar, gamma
        sound_speed(self.rho_bar, self.p_bar, self.gamma)

    @property
    def sigma(self) -> float:
        return sound_speed(self.rho_bar, self.p_bar, self.gamma)

    def radius(self, t):
        """Radius of the ball containing the perturbation at time ``t``."""
        return self.R0 + self.sigma * np.asarray(t, dtype=float)


def sound_speed(rho_bar: float, p_bar: float, gamma: float) -> float:
    if not (rho_bar > 0 and p_bar > 0):
        raise ValueError(f"background density and pressure must be positive, got {rho_bar}, {p_bar}")
    if not gamma > 1:
        raise ValueError(f"heat ratio must exceed 1, got {gamma}")
    return math.sqrt(gamma * p_bar / rho_bar)


@dataclass(frozen=True)
class ConstantsBundle:
    B: float
    C: float
    K: float
    delta: float
    omega_n: float
    A1: float
    A2: float
    phi_power_integral: float
    entropy_inf: float
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        out = {
            "B": self.B,
            "C": self.C,
            "K": self.K,
            "delta": self.delta,
            "omega_n": self.omega_n,
            "A1": self.A1,
            "A2": self.A2,
            "phi_power_integral": self.phi_power_integral,
            "entropy_inf": self.entropy_inf,
        }
        out.update(self.extra)
        return out


def derived_constants(g: GasParameters, w: WeightFunction, entropy_inf: float) -> ConstantsBundle:
    """All constants entering the moment estimates for a given gas and weight."""
    if not w.k > g.n:
        raise ValueError(f"shape parameter k={w.k} must exceed the dimension n={g.n}")
    if not math.isfinite(entropy_inf):
        raise ValueError("infimum of the initial entropy must be finite")
    power = g.gamma / (g.gamma - 1.0)
    phi_pow = w.power_integral(g.n, power)
    A1 = (w.k - g.n) * math.exp(entropy_inf) * phi_pow ** (1.0 - g.gamma)
    A2 = max(2.0, (g.gamma - 1.0) * w.k)
    return ConstantsBundle(
        B=w.B,
        C=w.C,
        K=w.integral(g.n),
        delta=g.delta,
        omega_n=g.omega_n,
        A1=A1,
        A2=A2,
        phi_power_integral=phi_pow,
        entropy_inf=float(entropy_inf),
    )


def entropy_inf(rho, p, gamma: float, floor: float = VACUUM_FLOOR) -> float:
    """Infimum of ``ln(p / rho**gamma)`` over samples with density above ``floor``."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    mask = rho > floor
    if not np.any(mask):
        raise ValueError("no samples above the vacuum floor")
    with np.errstate(divide="ignore"):
        s = np.log(p[mask]) - gamma * np.log(rho[mask])
    return float(np.min(s))
