"""Localized moment functionals and the energy integrals they are compared with."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Background, GasParameters, WeightFunction
from .fields import FieldEvaluator, FieldValues


@dataclass(frozen=True)
class MomentSample:
    t: float
    G: float
    G_prime: float
    E_k: float
    E_p: float
    E_total: float
    E_omega1: float
    E_omega2: float
    Q: float | None = None


@dataclass(frozen=True)
class HolderResult:
    lhs: float
    rhs: float
    satisfied: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf


def _require_cover(field, w: WeightFunction):
    if field.extent < w.R * (1 - 1e-12):
        raise ValueError(f"field covers radii up to {field.extent}, weight needs {w.R}")


def moment_G(field, w: WeightFunction) -> float:
    """Density integrated against the weight."""
    _require_cover(field, w)
    return field.integrate(lambda v: v.rho * w.value(v.r), 0.0, w.R, w.joins[:1])


def moment_Q(field, w: WeightFunction, rho_bar: float) -> float:
    """Excess density over ``rho_bar`` integrated against the weight."""
    _require_cover(field, w)
    return field.integrate(lambda v: (v.rho - rho_bar) * w.value(v.r), 0.0, w.R, w.joins[:1])


def moment_G_prime(field, w: WeightFunction) -> float:
    """Time derivative of the weighted moment: ``int phi'(|x|)/|x| (V.x) rho``."""
    _require_cover(field, w)
    return field.integrate(
        lambda v: w.derivative_over_r(v.r) * v.vdotx * v.rho, 0.0, w.R, w.joins[:1]
    )


def classical_moment(field) -> float:
    """``1/2 int rho |x|^2`` over all of space (or the field's extent)."""
    return field.integrate(lambda v: 0.5 * v.rho * v.r**2, 0.0, math.inf)


def mass(field) -> float:
    return field.integrate(lambda v: v.rho, 0.0, math.inf)


def excess_mass(field, rho_bar: float) -> float:
    return field.integrate(lambda v: v.rho - rho_bar, 0.0, math.inf)


def _kinetic(v: FieldValues):
    return 0.5 * v.rho * v.v2


def regional_energies(field, w: WeightFunction, g: GasParameters) -> dict:
    """Kinetic, potential and total energy over space and over the two
    shells of the weight's support."""
    gm1 = g.gamma - 1.0
    total = lambda v: _kinetic(v) + v.p / gm1
    E_k = field.integrate(_kinetic, 0.0, math.inf)
    E_p = field.integrate(lambda v: v.p / gm1, 0.0, math.inf)
    r1 = w.inner_radius
    return {
        "E_k": E_k,
        "E_p": E_p,
        "E_total": E_k + E_p,
        "E_omega1": field.integrate(total, 0.0, r1),
        "E_omega2": field.integrate(total, r1, w.R),
    }


def excess_energy(field, bg: Background, t: float = 0.0, whole_field: bool = True) -> float:
    """``e(t)``: kinetic energy plus potential energy in excess of the background.

    With ``whole_field`` the pressure excess is integrated over the field's
    full extent instead of the ball of radius ``R0 + sigma t``; the two agree
    for smooth solutions, and the former stays conservative under numerical
    diffusion past the sound front.
    """
    gm1 = bg.gamma - 1.0
    E_k = field.integrate(_kinetic, 0.0, math.inf)
    hi = math.inf if whole_field else float(bg.radius(t))
    return E_k + field.integrate(lambda v: (v.p - bg.p_bar) / gm1, 0.0, hi)


def moment_sample(field, w: WeightFunction, g: GasParameters, t: float = 0.0,
                  rho_bar: float | None = None) -> MomentSample:
    en = regional_energies(field, w, g)
    return MomentSample(
        t=t,
        G=moment_G(field, w),
        G_prime=moment_G_prime(field, w),
        Q=None if rho_bar is None else moment_Q(field, w, rho_bar),
        **en,
    )


def holder_check(field, w: WeightFunction, g: GasParameters,
                 entropy_inf: float | None = None) -> HolderResult:
    """Compare ``G^gamma`` with the entropy-weighted pressure bound."""
    if entropy_inf is None:
        entropy_inf = field.entropy_inf(g.gamma, w.R)
    G = moment_G(field, w)
    p_int = field.integrate(lambda v: v.p, 0.0, w.R, w.joins[:1])
    phi_pow = w.power_integral(g.n, g.gamma / (g.gamma - 1.0))
    lhs = G**g.gamma
    rhs = math.exp(-entropy_inf) * p_int * phi_pow ** (g.gamma - 1.0)
    return HolderResult(lhs, rhs, lhs <= rhs * (1.0 + 1e-9))


def second_derivative_rhs(field, w: WeightFunction, p_bar: float = 0.0) -> float:
    """Right-hand side of the identity for the second time derivative of ``G``.

    ``-2B (int_O1 rho|V|^2 + n int_O1 p)
    + 2C (int_O2 rho|V|^2 + n int_O2 p - R int_O2 rho|sigma|^2/|x|^3
          - (n-1) R int_O2 p/|x|)``.

    ``p_bar`` is subtracted from the pressure first; a constant pressure
    contributes exactly zero because ``phi'(R) = 0``.
    """
    n = field.n
    r1, R = w.inner_radius, w.R
    B, C = w.B, w.C

    def inner(v: FieldValues):
        return v.rho * v.v2 + n * (v.p - p_bar)

    def outer(v: FieldValues):
        r = np.where(v.r > 0, v.r, 1.0)
        out = v.rho * v.v2 + n * (v.p - p_bar) - (n - 1) * R * (v.p - p_bar) / r
        if not field.radial:
            out = out - R * v.rho * v.sigma2 / r**3
        return out

    return -2.0 * B * field.integrate(inner, 0.0, r1) + 2.0 * C * field.integrate(outer, r1, R)


def second_derivative_identity_check(evaluator: FieldEvaluator, w: WeightFunction, t: float,
                                     dt: float = 1e-3, p_bar: float = 0.0) -> dict:
    """Centred second difference of ``G`` against the identity's right-hand side."""
    G = [moment_G(evaluator.at_time(s), w) for s in (t - dt, t, t + dt)]
    fd = (G[0] - 2.0 * G[1] + G[2]) / dt**2
    rhs = second_derivative_rhs(evaluator.at_time(t), w, p_bar)
    return {"finite_difference": fd, "rhs": rhs, "residual": abs(fd - rhs)}


def default_cho_radii() -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(-3, 8, 881)])


def cho_functional(evaluator: FieldEvaluator, t: float, radii=None) -> float:
    """``sup_x |t (V.x) / (1 + |x|^2)|`` sampled over a radius ladder."""
    radii = default_cho_radii() if radii is None else np.asarray(radii, dtype=float)
    v = evaluator.point_values(radii, t)
    return float(np.max(np.abs(t * v.vdotx / (1.0 + v.r**2))))


def envelope(z, C: float, energy: float, A1: float, gamma: float, k: float, n: int):
    """Upper bound on ``(G')^2`` as a function of ``G``:
    ``8 C z (E - A1 z^gamma / ((gamma-1)(k-n)))``."""
    z = np.asarray(z, dtype=float)
    return 8.0 * C * z * (energy - A1 * z**gamma / ((gamma - 1.0) * (k - n)))
