"""Blowup certificates and density bounds built on the moment estimates.

Each checker consumes initial data (and optionally observed density
extremes of a later solution) and returns a report with the witness
numbers behind its verdict.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .comparison import (
    LinearComparisonProblem,
    NonlinearComparisonProblem,
    blowup_time_quadrature,
    case2_forcing,
    integrate_comparison,
    linear_closed_form,
    root_structure,
)
from .core import Background, ConstantsBundle, GasParameters, WeightFunction, derived_constants
from .moments import excess_energy, holder_check, moment_G, moment_G_prime, regional_energies
from .quadrature import radial_integral

log = logging.getLogger(__name__)

VIOLATION_RTOL = 1e-6


# ---------------------------------------------------------------- Theorem 1


@dataclass
class Theorem1Report:
    radius_ladder: list
    lhs_values: list
    flux_values: list
    instant_values: list
    delta1: float
    energy: float
    trend: dict
    verdict: str

    @property
    def threshold(self) -> float:
        return self.delta1 * self.energy

    def as_dict(self) -> dict:
        return {
            "radius_ladder": list(self.radius_ladder),
            "lhs_values": list(self.lhs_values),
            "flux_values": list(self.flux_values),
            "instant_values": list(self.instant_values),
            "delta1": self.delta1,
            "energy": self.energy,
            "threshold": self.threshold,
            "trend": dict(self.trend),
            "verdict": self.verdict,
        }


def default_delta1(g: GasParameters) -> float:
    return g.delta / (2.0 * g.n * g.omega_n)


def aitken_limit(values) -> float:
    """Delta-squared extrapolation from the last three terms of a sequence."""
    v = [float(x) for x in values]
    if len(v) < 3:
        return v[-1]
    x0, x1, x2 = v[-3:]
    d1, d2 = x1 - x0, x2 - x1
    denom = d2 - d1
    if denom == 0 or abs(denom) < 1e-14 * max(abs(x2), 1.0) or d1 * d2 <= 0:
        return x2
    return x2 - d2 * d2 / denom


def _monotonicity(values) -> str:
    d = np.diff(np.asarray(values, dtype=float))
    if np.all(d >= 0):
        return "nondecreasing"
    if np.all(d <= 0):
        return "nonincreasing"
    return "mixed"


def theorem1_times(t_max: float, count: int = 4001) -> np.ndarray:
    """Log-spaced sample times on ``[0, t_max]`` with a leading zero."""
    lo = t_max * 1e-9
    return np.concatenate([[0.0], np.geomspace(lo, t_max, count - 1)])


def theorem1_terms(evaluator, g: GasParameters, R: float, times) -> tuple[float, float]:
    """Flux and instantaneous parts of the bracket at radius ``R``, each
    scaled by ``R^n`` and maximised over the sphere."""
    gm = g.gamma / (g.gamma - 1.0)
    flux_rows, inst_rows = [], []
    for t in times:
        v = evaluator.point_values(np.array([R]), float(t))
        speed = np.sqrt(v.v2)
        flux_rows.append((0.5 * v.rho * v.v2 + gm * v.p) * speed)
        inst_rows.append(v.rho * v.v2 + g.n * v.p)
    flux = np.trapezoid(np.array(flux_rows), np.asarray(times, float), axis=0)
    inst = np.max(np.array(inst_rows), axis=0)
    scale = R**g.n
    per_dir = scale * (g.delta / R * flux + inst)
    return scale * g.delta / R * float(np.max(flux)), scale * float(np.max(inst)), float(np.max(per_dir))


def check_theorem1(evaluator, g: GasParameters, t_max: float, delta1: float | None = None,
                   ladder=None, energy: float | None = None, times=None,
                   rel_tol: float = 1e-2) -> Theorem1Report:
    """Evaluate the far-field bracket on a radius ladder.

    ``satisfied`` means the extrapolated limit sits at or below
    ``delta1 * energy`` (a blowup certificate); ``violated`` means it settles
    or keeps growing above it; anything else is ``inconclusive``.
    """
    limit = g.delta / (g.n * g.omega_n)
    if delta1 is None:
        delta1 = default_delta1(g)
    if not 0.0 <= delta1 < limit:
        raise ValueError(f"delta1 must lie in [0, {limit}), got {delta1}")
    if ladder is None:
        ladder = [10.0 * 2.0**j for j in range(8)]
    ladder = [float(r) for r in ladder]
    if times is None:
        times = theorem1_times(t_max)
    if energy is None:
        en = regional_energies(evaluator.at_time(0.0), WeightFunction(1.0, 2.0), g)
        energy = en["E_total"]
    lhs, flux, inst = [], [], []
    for R in ladder:
        fl, ins, tot = theorem1_terms(evaluator, g, R, times)
        flux.append(fl)
        inst.append(ins)
        lhs.append(tot)
    threshold = delta1 * energy
    est = aitken_limit(lhs)
    mono = _monotonicity(lhs)
    scale = max(abs(est), abs(threshold), 1e-300)
    converged = len(lhs) >= 2 and abs(lhs[-1] - est) <= rel_tol * scale
    if converged:
        verdict = "satisfied" if est <= threshold else "violated"
    elif mono == "nondecreasing" and lhs[-1] > threshold:
        verdict = "violated"
    else:
        verdict = "inconclusive"
    trend = {
        "limit_estimate": est,
        "flux_limit_estimate": aitken_limit(flux),
        "instant_limit_estimate": aitken_limit(inst),
        "monotonicity": mono,
        "converged": bool(converged),
        "largest_radius": ladder[-1],
    }
    return Theorem1Report(ladder, lhs, flux, inst, float(delta1), float(energy), trend, verdict)


# --------------------------------------------------------- density tracks


@dataclass
class DensityBoundTrack:
    times: np.ndarray
    lower_bound: np.ndarray
    upper_bound: np.ndarray
    observed_sup: np.ndarray
    observed_inf: np.ndarray
    violation: np.ndarray
    violation_time: float | None
    kind: str = ""

    def rows(self):
        for i in range(len(self.times)):
            yield (self.times[i], self.lower_bound[i], self.upper_bound[i],
                   self.observed_sup[i], self.observed_inf[i], int(self.violation[i]))


def flag_violations(lower, upper, sup, inf, rtol: float = VIOLATION_RTOL) -> np.ndarray:
    """Crossings by more than ``rtol`` relative; NaN entries never count."""
    lower, upper, sup, inf = (np.asarray(a, dtype=float) for a in (lower, upper, sup, inf))
    with np.errstate(invalid="ignore"):
        below = sup < lower - rtol * np.maximum(np.abs(lower), np.abs(sup))
        above = inf > upper + rtol * np.maximum(np.abs(upper), np.abs(inf))
    return np.nan_to_num(below, nan=False) | np.nan_to_num(above, nan=False)


def build_track(times, lower, upper, sup, inf, kind: str) -> DensityBoundTrack:
    times = np.asarray(times, dtype=float)
    n = len(times)
    expand = lambda a: np.broadcast_to(np.asarray(a, dtype=float), (n,)).copy()
    lower, upper, sup, inf = map(expand, (lower, upper, sup, inf))
    viol = flag_violations(lower, upper, sup, inf)
    hit = np.flatnonzero(viol)
    vt = float(times[hit[0]]) if hit.size else None
    return DensityBoundTrack(times, lower, upper, sup, inf, viol, vt, kind)


def _observe(observed, times):
    if observed is None:
        nan = np.full(len(times), np.nan)
        return nan, nan.copy()
    if callable(observed):
        pairs = [observed(float(t)) for t in times]
        return np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])
    sup, inf = observed
    return np.asarray(sup, dtype=float), np.asarray(inf, dtype=float)


# ---------------------------------------------------------------- Theorem 2


@dataclass
class Theorem2Result:
    track: DensityBoundTrack
    T: float
    degenerate: bool
    problem: NonlinearComparisonProblem
    constants: ConstantsBundle
    case_id: int
    trajectory: object = None


def case1_problem(field0, w: WeightFunction, g: GasParameters, mass: float, energy: float,
                  entropy_inf: float | None = None) -> tuple[NonlinearComparisonProblem, ConstantsBundle]:
    if entropy_inf is None:
        entropy_inf = field0.entropy_inf(g.gamma, w.R)
    cb = derived_constants(g, w, entropy_inf)
    G0 = moment_G(field0, w)
    Gp0 = moment_G_prime(field0, w)
    p = NonlinearComparisonProblem(cb.B, cb.A1, cb.A2, energy, g.gamma, G0, Gp0,
                                   k=w.k, n=g.n, mass=mass)
    return p, cb


def theorem2_bounds(field0, w: WeightFunction, g: GasParameters, mass: float, energy: float,
                    horizon: float, times=None, observed=None,
                    entropy_inf: float | None = None) -> Theorem2Result:
    """Lower bound ``z-(t)/K`` on ``sup rho`` and upper bound ``z+/K`` on
    ``inf rho`` over the ball of radius ``R``.

    ``observed`` is ``None``, a callable ``t -> (sup, inf)`` or a pair of
    arrays aligned with ``times``.
    """
    if entropy_inf is None:
        entropy_inf = field0.entropy_inf(g.gamma, w.R)
    hold = holder_check(field0, w, g, entropy_inf)
    if not hold.satisfied:
        raise ValueError(f"Holder check failed (lhs={hold.lhs}, rhs={hold.rhs}); data not admissible")
    p, cb = case1_problem(field0, w, g, mass, energy, entropy_inf)
    if not p.z0 < p.G_plusplus:
        raise ValueError("G(0) must lie below G++ for admissible data")
    rs = root_structure(p)
    bt = blowup_time_quadrature(p, rs)
    T = bt.T
    end = min(T, horizon)
    if times is None:
        times = np.linspace(0.0, end, 201)
    times = np.asarray(times, dtype=float)
    traj = integrate_comparison(p, max(float(times[-1]), 1e-12)) if times[-1] > 0 else None
    z = np.full(len(times), p.z0)
    if traj is not None:
        z = np.asarray(traj(times)[0], dtype=float).copy()
        z[times == 0] = p.z0
    z[times > T] = np.nan
    sup, inf = _observe(observed, times)
    track = build_track(times, z / cb.K, p.z_plus / cb.K, sup, inf, "theorem2")
    return Theorem2Result(track, T, bt.degenerate, p, cb, rs.case_id, traj)


# ---------------------------------------------------------------- Theorem 3


@dataclass
class Theorem3Verdict:
    N: float
    T1: float | None
    T2: float
    branch: str
    applies: bool
    G0: float
    G_prime0: float
    e0: float

    def as_dict(self) -> dict:
        return {"N": self.N, "T1": self.T1, "T2": self.T2, "branch": self.branch,
                "applies": self.applies, "G0": self.G0, "G_prime0": self.G_prime0, "e0": self.e0}


def theorem3_N(e0: float, w: WeightFunction, g: GasParameters, p_bar: float) -> float:
    frac = ((w.k - 1.0) / w.k) ** g.n
    return g.delta * e0 + g.omega_n * w.R**g.n * p_bar * frac * (g.n - g.delta / (g.gamma - 1.0))


def theorem3_T1(G0: float, Gp0: float, B: float, N: float) -> float | None:
    """Smallest positive root of ``-B N t^2 + G'(0) t + G(0)``, or ``None``.

    The form ``2G / (sqrt(D) - G')`` covers all signs of ``N`` and gives
    ``-G/G'`` at ``N = 0``.
    """
    D = Gp0 * Gp0 + 4.0 * B * N * G0
    if D < 0:
        return None
    den = math.sqrt(D) - Gp0
    if not den > 0:
        return None
    T1 = 2.0 * G0 / den
    return T1 if T1 > 0 else None


def theorem3_verdict(field0, w: WeightFunction, g: GasParameters, bg: Background,
                     e0: float | None = None) -> Theorem3Verdict:
    inner = (w.k - 1.0) * w.R / w.k
    if not bg.R0 < inner:
        raise ValueError(f"perturbation radius {bg.R0} must be below (k-1)R/k = {inner}")
    if e0 is None:
        e0 = excess_energy(field0, bg)
    G0 = moment_G(field0, w)
    Gp0 = moment_G_prime(field0, w)
    N = theorem3_N(e0, w, g, bg.p_bar)
    branch = "N>0" if N > 0 else ("N<0" if N < 0 else "N=0")
    T1 = theorem3_T1(G0, Gp0, w.B, N)
    T2 = (inner - bg.R0) / bg.sigma
    applies = T1 is not None and 0.0 < T1 <= T2
    return Theorem3Verdict(N, T1, T2, branch, bool(applies), G0, Gp0, float(e0))


# ---------------------------------------------------------------- Theorem 4


def ball_weight_integral(w: WeightFunction, n: int, s: float) -> float:
    """Integral of the weight over the ball of radius ``s``."""
    s = min(float(s), w.R)
    if s <= 0:
        return 0.0
    return radial_integral(w.value, n, 0.0, s, [b for b in w.joins if b < s])


def q_plus(t, m0: float, w: WeightFunction, n: int, bg: Background, omega_n: float) -> np.ndarray:
    """Upper bound on ``Q(t)``: ``m(0) + rho_bar (|B_r| - int_{B_r} phi)``
    with ``r = R0 + sigma t`` the radius of the perturbed region."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        r = float(bg.radius(ti))
        out[i] = m0 + bg.rho_bar * (omega_n * r**n - ball_weight_integral(w, n, r))
    return out


def q_plus_unclipped(t, m0: float, K: float, n: int, bg: Background, omega_n: float) -> np.ndarray:
    """``m(0) - rho_bar K + rho_bar |B_r|``; equals :func:`q_plus` once ``r >= R``."""
    t = np.asarray(t, dtype=float)
    return m0 - bg.rho_bar * K + bg.rho_bar * omega_n * bg.radius(t) ** n


@dataclass
class Theorem4Result:
    track: DensityBoundTrack
    Q_minus: np.ndarray
    Q_plus: np.ndarray
    Q_plus_unclipped: np.ndarray
    problem: LinearComparisonProblem
    solution: object
    constants: ConstantsBundle
    trivial_time: float | None
    G0: float
    G_prime0: float
    extra: dict = field(default_factory=dict)


def case2_problem(field0, w: WeightFunction, g: GasParameters, bg: Background, e0: float,
                  entropy_inf: float | None = None):
    if entropy_inf is None:
        entropy_inf = field0.entropy_inf(g.gamma, w.R)
    cb = derived_constants(g, w, entropy_inf)
    G0 = moment_G(field0, w)
    Gp0 = moment_G_prime(field0, w)
    kappa_sq, coeffs = case2_forcing(cb.B, cb.A1, cb.A2, bg.rho_bar, cb.K, e0, bg.p_bar,
                                     cb.omega_n, bg.R0, bg.sigma, g.n, g.gamma)
    lp = LinearComparisonProblem(kappa_sq, coeffs, G0 - bg.rho_bar * cb.K, Gp0)
    return lp, cb, G0, Gp0


def trivial_time(solution, floor: float, horizon: float, samples: int = 2001) -> float | None:
    """First time in ``[0, horizon]`` where ``solution`` drops below ``floor``."""
    ts = np.linspace(0.0, horizon, samples)
    vals = solution(ts) - floor
    below = np.flatnonzero(vals < 0)
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0:
        return 0.0
    return float(brentq(lambda s: float(solution(s)) - floor, ts[i - 1], ts[i], xtol=1e-14))


def theorem4_bounds(field0, w: WeightFunction, g: GasParameters, bg: Background, horizon: float,
                    m0: float | None = None, e0: float | None = None, times=None,
                    observed=None, entropy_inf: float | None = None) -> Theorem4Result:
    """Bounds ``rho_bar + Q-(t)/K <= sup rho`` and ``inf rho <= rho_bar + Q+(t)/K``."""
    if m0 is None:
        m0 = field0.integrate(lambda v: v.rho - bg.rho_bar, 0.0, math.inf)
    if e0 is None:
        e0 = excess_energy(field0, bg)
    lp, cb, G0, Gp0 = case2_problem(field0, w, g, bg, e0, entropy_inf)
    sol = linear_closed_form(lp)
    if times is None:
        times = np.linspace(0.0, horizon, 201)
    times = np.asarray(times, dtype=float)
    Qm = np.asarray(sol(times), dtype=float)
    Qp = q_plus(times, m0, w, g.n, bg, cb.omega_n)
    Qp_raw = q_plus_unclipped(times, m0, cb.K, g.n, bg, cb.omega_n)
    sup, inf = _observe(observed, times)
    track = build_track(times, bg.rho_bar + Qm / cb.K, bg.rho_bar + Qp / cb.K, sup, inf, "theorem4")
    tt = trivial_time(sol, -bg.rho_bar * cb.K, max(horizon, float(times[-1])))
    return Theorem4Result(track, Qm, Qp, Qp_raw, lp, sol, cb, tt, G0, Gp0,
                          {"m0": m0, "e0": e0})


# ------------------------------------------------------------------ phantom


@dataclass(frozen=True)
class PhantomResult:
    ie2_satisfied: bool
    f_at_z_plus: float
    G_prime_0: float
    G0: float
    z_plus: float


def phantom_from_problem(p: NonlinearComparisonProblem) -> PhantomResult:
    zp = p.z_plus
    f_zp = float(p.f(zp))
    return PhantomResult(bool(p.z0_prime > 0 and f_zp >= 0), f_zp, p.z0_prime, p.z0, zp)


def phantom_check(field0, w: WeightFunction, g: GasParameters, mass: float, energy: float,
                  entropy_inf: float | None = None) -> PhantomResult:
    """Initial-data condition ``G'(0) > 0`` and ``f(z+) >= 0``."""
    p, _ = case1_problem(field0, w, g, mass, energy, entropy_inf)
    return phantom_from_problem(p)


def phantom_witness(G0, Gp0, mass, energy, A1, w: WeightFunction, g: GasParameters):
    """Vectorised (ie2) witnesses for arrays of moment data."""
    G0, Gp0, mass, energy, A1 = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                                      for a in (G0, Gp0, mass, energy, A1)))
    A2 = max(2.0, (g.gamma - 1.0) * w.k)
    g1 = g.gamma + 1.0
    G_plus = ((g.gamma - 1.0) * (w.k - g.n) * energy / A1) ** (1.0 / g.gamma)
    zp = np.minimum(mass, G_plus)
    F = lambda z: 4.0 * w.B * (A1 * z**g1 / g1 - A2 * energy * z)
    f_zp = F(zp) - F(G0) + Gp0 * Gp0
    return (Gp0 > 0) & (f_zp >= 0), f_zp, zp
