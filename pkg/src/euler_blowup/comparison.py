"""Comparison problems bounding the weighted moment from below.

Nonlinear problem: ``z'' = 2B (A1 z^gamma - A2 E)`` with first integral
``z'^2 = f(z)``; its zero-crossing time comes either from the singular
quadrature ``t = int dz / sqrt(f)`` or from direct integration, and the two
routes are kept independent so they can check each other.

Linear problem: ``z'' = kappa^2 z + P(t)`` with ``P`` a polynomial, solved
in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .quadrature import adaptive_simpson


class ComparisonInputError(ValueError):
    """Initial data inconsistent with the moment inequalities."""


class StiffnessFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class NonlinearComparisonProblem:
    B: float
    A1: float
    A2: float
    E: float
    gamma: float
    z0: float
    z0_prime: float
    # only needed for G+ and z+; None when unknown
    k: float | None = None
    n: int | None = None
    mass: float | None = None

    @property
    def c(self) -> float:
        z0 = self.z0
        return self.z0_prime**2 - 4.0 * self.B * (
            self.A1 * z0 ** (self.gamma + 1.0) / (self.gamma + 1.0) - self.A2 * self.E * z0
        )

    def f(self, z):
        z = np.asarray(z, dtype=float)
        return 4.0 * self.B * (
            self.A1 * z ** (self.gamma + 1.0) / (self.gamma + 1.0) - self.A2 * self.E * z
        ) + self.c

    def f_prime(self, z):
        z = np.asarray(z, dtype=float)
        return 4.0 * self.B * (self.A1 * z**self.gamma - self.A2 * self.E)

    def f_second(self, z):
        z = np.asarray(z, dtype=float)
        return 4.0 * self.B * self.A1 * self.gamma * z ** (self.gamma - 1.0)

    def f_below(self, zb: float, fb: float, h):
        """``f(zb - h)`` given ``fb = f(zb)``, free of cancellation for small ``h``."""
        h = np.clip(np.asarray(h, dtype=float), 0.0, zb)
        g1 = self.gamma + 1.0
        if zb > 0:
            with np.errstate(divide="ignore"):
                power_diff = zb**g1 * np.expm1(g1 * np.log1p(-h / zb))
        else:
            power_diff = np.zeros_like(h)
        return fb + 4.0 * self.B * (self.A1 * power_diff / g1 + self.A2 * self.E * h)

    def rhs(self, z):
        return 2.0 * self.B * (self.A1 * np.maximum(z, 0.0) ** self.gamma - self.A2 * self.E)

    @property
    def G_plusplus(self) -> float:
        """Unique minimiser of ``f`` on ``(0, inf)``."""
        if self.A1 <= 0:
            return math.inf
        return (self.A2 * self.E / self.A1) ** (1.0 / self.gamma)

    @property
    def G_plus(self) -> float | None:
        if self.k is None or self.n is None:
            return None
        if self.A1 <= 0:
            return math.inf
        return ((self.gamma - 1.0) * (self.k - self.n) * self.E / self.A1) ** (1.0 / self.gamma)

    @property
    def z_plus(self) -> float | None:
        gp = self.G_plus
        if gp is None:
            return self.mass
        return gp if self.mass is None else min(self.mass, gp)


@dataclass(frozen=True)
class RootStructure:
    case_id: int
    z_star: float | None
    G_plus: float | None
    G_plusplus: float
    z_plus: float | None
    degenerate: bool = False


def _refine_root(p: NonlinearComparisonProblem, lo: float, hi: float) -> float:
    """Bisection to a tight bracket, then Newton polish.  ``f(lo) > 0 > f(hi)``."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if p.f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(abs(hi), 1e-300):
            break
    z = 0.5 * (lo + hi)
    for _ in range(5):
        fp = float(p.f_prime(z))
        if fp == 0:
            break
        step = float(p.f(z)) / fp
        znew = z - step
        if not lo <= znew <= hi:
            break
        z = znew
        if abs(step) <= 1e-15 * abs(z):
            break
    return z


def root_structure(p: NonlinearComparisonProblem) -> RootStructure:
    """Classify the roots of ``f`` on ``[z0, inf)``.

    Case 1: none.  Case 2: a smaller root ``z_star`` (possibly a double
    root at ``G++``, flagged degenerate).  ``z0 >= G++`` is rejected since
    the moment inequalities exclude it.
    """
    Gpp = p.G_plusplus
    base = dict(G_plus=p.G_plus, G_plusplus=Gpp, z_plus=p.z_plus)
    if not p.z0 < Gpp:
        raise ComparisonInputError(
            f"initial moment {p.z0} is not below the minimiser G++={Gpp} of f"
        )
    scale = max(abs(p.c), p.z0_prime**2, 4.0 * p.B * p.A2 * p.E * max(p.z0, 1e-300), 1e-300)
    if p.z0_prime == 0.0:
        return RootStructure(2, p.z0, degenerate=False, **base)

    if math.isinf(Gpp):
        # A1 = 0: f is affine and decreasing
        slope = 4.0 * p.B * p.A2 * p.E
        if slope <= 0:
            return RootStructure(1, None, **base)
        return RootStructure(2, p.z0 + p.z0_prime**2 / slope, **base)

    fmin = float(p.f(Gpp))
    if abs(fmin) <= 1e-12 * scale:
        return RootStructure(2, Gpp, degenerate=True, **base)
    if fmin > 0:
        return RootStructure(1, None, **base)
    # f(z0) > 0 > f(G++) and f decreases on the bracket
    return RootStructure(2, _refine_root(p, p.z0, Gpp), **base)


@dataclass
class ComparisonTrajectory:
    t: np.ndarray
    z: np.ndarray
    z_prime: np.ndarray
    crossing_time: float | None
    horizon: float
    dense: object = field(repr=False, default=None)
    # time at which z passed the escape cap (superlinear growth blows up)
    escape_time: float | None = None

    def __call__(self, t):
        """Dense-output evaluation of ``(z, z')`` at times within the run."""
        y = self.dense(np.asarray(t, dtype=float))
        return y[0], y[1]


def integrate_comparison(p: NonlinearComparisonProblem, horizon: float,
                         rtol: float = 1e-12, atol: float = 1e-15) -> ComparisonTrajectory:
    """Adaptive Dormand-Prince 4(5) integration up to the first zero of ``z``,
    the escape cap ``1e6 max(1, z0, G++)`` or ``horizon``."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    gpp = p.G_plusplus
    cap = 1e6 * max(1.0, p.z0, gpp if math.isfinite(gpp) else 0.0)

    def rhs(_t, y):
        return [y[1], float(p.rhs(y[0]))]

    def hit_zero(_t, y):
        return y[0]

    def escape(_t, y):
        return y[0] - cap

    hit_zero.terminal = True
    hit_zero.direction = -1
    escape.terminal = True
    escape.direction = 1

    sol = solve_ivp(rhs, (0.0, horizon), [p.z0, p.z0_prime], method="RK45",
                    rtol=rtol, atol=atol, events=(hit_zero, escape), dense_output=True)
    if sol.status == -1:
        raise StiffnessFailure(sol.message)
    crossing = float(sol.t_events[0][0]) if len(sol.t_events[0]) else None
    escaped = float(sol.t_events[1][0]) if len(sol.t_events[1]) else None
    return ComparisonTrajectory(sol.t, sol.y[0], sol.y[1], crossing, horizon, sol.sol, escaped)


@dataclass(frozen=True)
class BlowupTime:
    T: float
    degenerate: bool = False
    formula: str = ""


def _time_to_descend(p: NonlinearComparisonProblem, zb: float, fb: float, z_lo: float) -> float:
    """``int_{z_lo}^{zb} dz / sqrt(f)`` with ``u = sqrt(zb - z)``; regular even
    when ``f(zb) = 0`` at a simple root."""
    if zb <= z_lo:
        return 0.0
    u_max = math.sqrt(zb - z_lo)
    fp = float(p.f_prime(zb))

    def integrand(u):
        u = np.asarray(u, dtype=float)
        h = u * u
        fz = p.f_below(zb, fb, h)
        out = np.empty_like(u)
        small = u == 0.0
        # limit at u = 0: 2u/sqrt(fb + |f'| u^2) -> 0 (fb > 0) or 2/sqrt(|f'|)
        out[small] = 0.0 if fb > 0 else 2.0 / math.sqrt(abs(fp))
        big = ~small
        out[big] = 2.0 * u[big] / np.sqrt(np.maximum(fz[big], 0.0))
        return out

    return adaptive_simpson(integrand, 0.0, u_max, abs_tol=1e-14, rel_tol=1e-11)


def blowup_time_quadrature(p: NonlinearComparisonProblem, rs: RootStructure | None = None) -> BlowupTime:
    """Time at which the comparison solution reaches zero.

    ``z0' <= 0``: the solution is concave while below ``G++`` and descends
    straight to zero, ``T = int_0^{z0} dz/sqrt(f)``.  ``z0' > 0`` with a root
    ``z_star``: rise to ``z_star`` then fall to zero.  ``z0' > 0`` with no
    root, or a double root: ``T = inf``.
    """
    rs = root_structure(p) if rs is None else rs
    if p.z0_prime <= 0:
        return BlowupTime(_time_to_descend(p, p.z0, p.z0_prime**2, 0.0), formula="descend")
    if rs.case_id == 1:
        return BlowupTime(math.inf, formula="no-root")
    if rs.degenerate:
        return BlowupTime(math.inf, degenerate=True, formula="double-root")
    zs = rs.z_star
    rise = _time_to_descend(p, zs, 0.0, p.z0)
    fall = _time_to_descend(p, zs, 0.0, 0.0)
    return BlowupTime(rise + fall, formula="rise-fall")


@dataclass(frozen=True)
class LinearComparisonProblem:
    """``z'' = kappa_sq z + P(t)``; ``P_coeffs`` ascending in powers of ``t``."""

    kappa_sq: float
    P_coeffs: tuple
    z0: float
    z0_prime: float

    def __post_init__(self):
        if not self.kappa_sq > 0:
            raise ValueError("kappa^2 must be positive")

    @property
    def kappa(self) -> float:
        return math.sqrt(self.kappa_sq)

    def P(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.P_coeffs)


def case2_forcing(B: float, A1: float, A2: float, rho_bar: float, K: float, e0: float,
                  p_bar: float, omega_n: float, R0: float, sigma: float, n: int,
                  gamma: float) -> tuple[float, tuple]:
    """``kappa^2`` and the coefficients of
    ``P(t) = 2B (A1 (rho_bar K)^gamma - A2 (e0 + p_bar omega_n (R0 + sigma t)^n))``."""
    kappa_sq = 2.0 * gamma * B * A1 * (rho_bar * K) ** (gamma - 1.0)
    ball = [math.comb(n, j) * R0 ** (n - j) * sigma**j for j in range(n + 1)]
    coeffs = [-2.0 * B * A2 * p_bar * omega_n * c for c in ball]
    coeffs[0] += 2.0 * B * (A1 * (rho_bar * K) ** gamma - A2 * e0)
    if sigma == 0:
        coeffs = coeffs[:1]
    return kappa_sq, tuple(coeffs)


@dataclass(frozen=True)
class LinearSolution:
    C1: float
    C2: float
    kappa: float
    particular: tuple

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (self.C1 * np.exp(self.kappa * t) + self.C2 * np.exp(-self.kappa * t)
                + np.polynomial.polynomial.polyval(t, self.particular))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        dq = np.polynomial.polynomial.polyder(self.particular) if len(self.particular) > 1 else [0.0]
        return (self.kappa * (self.C1 * np.exp(self.kappa * t) - self.C2 * np.exp(-self.kappa * t))
                + np.polynomial.polynomial.polyval(t, dq))


def linear_closed_form(p: LinearComparisonProblem) -> LinearSolution:
    """Homogeneous exponentials plus a polynomial particular solution found by
    undetermined coefficients from the top degree down."""
    d = len(p.P_coeffs) - 1
    q = [0.0] * (d + 3)
    for j in range(d, -1, -1):
        q[j] = ((j + 2) * (j + 1) * q[j + 2] - p.P_coeffs[j]) / p.kappa_sq
    particular = tuple(q[: d + 1])
    q1 = particular[1] if d >= 1 else 0.0
    s = p.z0 - particular[0]
    dlt = (p.z0_prime - q1) / p.kappa
    return LinearSolution(0.5 * (s + dlt), 0.5 * (s - dlt), p.kappa, particular)


def integrate_linear(p: LinearComparisonProblem, times, rtol: float = 1e-12, atol: float = 1e-14):
    """Direct Runge-Kutta solution of the linear problem at ``times``."""
    times = np.asarray(times, dtype=float)
    sol = solve_ivp(lambda t, y: [y[1], p.kappa_sq * y[0] + float(p.P(t))],
                    (0.0, float(times[-1])), [p.z0, p.z0_prime], method="DOP853",
                    rtol=rtol, atol=atol, t_eval=times)
    return sol.y[0]


@dataclass
class PhasePortrait:
    curves: dict

    def rows(self):
        for cid, (z, q) in self.curves.items():
            for zi, qi in zip(z, q):
                yield cid, zi, qi


def _branch(z, q2):
    """Closed polyline ``q = +-sqrt(q2)`` over the samples where ``q2 >= 0``."""
    keep = q2 >= 0
    z, q = z[keep], np.sqrt(q2[keep])
    return np.concatenate([z, z[::-1]]), np.concatenate([q, -q[::-1]])


def phase_portrait(p: NonlinearComparisonProblem, z_max: float, C: float,
                   points: int = 400) -> PhasePortrait:
    """Polylines for the phase curve ``q^2 = f(z)``, the envelope
    ``q^2 = 8 C z (E - A1 z^gamma / ((gamma-1)(k-n)))`` and the line ``z = z+``."""
    if p.k is None or p.n is None:
        raise ValueError("phase portrait needs k and n for the envelope")
    z = np.linspace(0.0, z_max, points)
    curves = {"phase": _branch(z, p.f(z))}
    env = 8.0 * C * z * (p.E - p.A1 * z**p.gamma / ((p.gamma - 1.0) * (p.k - p.n)))
    gp = p.G_plus
    if gp is not None and gp <= z_max:
        z_env = np.unique(np.concatenate([z[z < gp], [gp]]))
        env = 8.0 * C * z_env * (p.E - p.A1 * z_env**p.gamma / ((p.gamma - 1.0) * (p.k - p.n)))
        curves["envelope"] = _branch(z_env, np.maximum(env, 0.0))
    else:
        curves["envelope"] = _branch(z, env)
    zp = p.z_plus
    if zp is not None:
        q_top = float(np.sqrt(max(np.max(p.f(z)), 0.0)))
        qs = np.linspace(-q_top, q_top, 21)
        curves["z_plus"] = (np.full_like(qs, zp), qs)
    return PhasePortrait(curves)
