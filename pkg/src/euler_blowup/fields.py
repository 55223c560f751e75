"""Field containers the moment functionals integrate over.

Three shapes of data occur:

* ``RadialProfile`` -- closed-form radial functions at a fixed time,
  integrated with adaptive Simpson;
* ``RadialField`` -- a sampled radial table, integrated exactly on its
  piecewise-linear interpolant with composite Simpson;
* ``GridField`` -- a general field on a Cartesian grid, integrated with
  midpoint sums.

All three expose ``integrate(integrand, lo, hi, breakpoints)`` where the
integrand receives a ``FieldValues`` and the domain is the shell
``lo <= |x| <= hi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .core import VACUUM_FLOOR, entropy_inf
from .quadrature import ABS_TOL, REL_TOL, radial_integral, unit_ball_volume


@dataclass(frozen=True)
class FieldValues:
    """Pointwise values handed to integrands.

    ``vdotx`` is ``V . x``; ``v2`` is ``|V|^2``; ``sigma2`` is the squared
    angular-momentum density ``|V|^2 |x|^2 - (V . x)^2``.
    """

    r: np.ndarray
    rho: np.ndarray
    vdotx: np.ndarray
    v2: np.ndarray
    p: np.ndarray
    sigma2: np.ndarray


Integrand = Callable[[FieldValues], np.ndarray]


def _radial_values(r, rho, vr, p) -> FieldValues:
    r = np.asarray(r, dtype=float)
    vr = np.asarray(vr, dtype=float)
    return FieldValues(
        r=r,
        rho=np.asarray(rho, dtype=float),
        vdotx=vr * r,
        v2=vr * vr,
        p=np.asarray(p, dtype=float),
        sigma2=np.zeros_like(r),
    )


class RadialProfile:
    """Radially symmetric fields given by ``func(r) -> (rho, v_r, p)``."""

    radial = True

    def __init__(self, func: Callable, n: int, abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL):
        self.func = func
        self.n = n
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol

    def values(self, r) -> FieldValues:
        r = np.asarray(r, dtype=float)
        rho, vr, p = self.func(r)
        return _radial_values(r, np.broadcast_to(rho, r.shape), np.broadcast_to(vr, r.shape),
                              np.broadcast_to(p, r.shape))

    def integrate(self, integrand: Integrand, lo: float = 0.0, hi: float = math.inf,
                  breakpoints: Iterable[float] = ()) -> float:
        return radial_integral(
            lambda r: integrand(self.values(r)), self.n, lo, hi, breakpoints,
            self.abs_tol, self.rel_tol,
        )

    @property
    def extent(self) -> float:
        return math.inf

    def density_extremes(self, hi: float, samples: int = 2001) -> tuple[float, float]:
        """Sup and inf of density on ``|x| <= hi``: dense sampling, then a
        bounded local search around the extreme nodes."""
        from scipy.optimize import minimize_scalar

        r = np.linspace(0.0, hi, samples)
        rho = self.values(r).rho
        out = []
        for sign, idx in ((-1.0, int(np.argmax(rho))), (1.0, int(np.argmin(rho)))):
            a = r[max(idx - 1, 0)]
            b = r[min(idx + 1, samples - 1)]
            best = rho[idx]
            if b > a:
                res = minimize_scalar(
                    lambda s: sign * float(self.values(np.array([s])).rho[0]),
                    bounds=(a, b), method="bounded", options={"xatol": 1e-12},
                )
                cand = sign * res.fun
                best = max(best, cand) if sign < 0 else min(best, cand)
            out.append(float(best))
        return out[0], out[1]

    def entropy_inf(self, gamma: float, hi: float, samples: int = 4001) -> float:
        v = self.values(np.linspace(0.0, hi, samples))
        return entropy_inf(v.rho, v.p, gamma)


class RadialField:
    """Sampled radial table ``(r, rho, v_r, p)`` with ``r`` strictly increasing."""

    radial = True

    def __init__(self, r, rho, v_r, p, n: int = 1):
        r = np.asarray(r, dtype=float)
        rho = np.asarray(rho, dtype=float)
        v_r = np.asarray(v_r, dtype=float)
        p = np.asarray(p, dtype=float)
        if not (r.shape == rho.shape == v_r.shape == p.shape) or r.ndim != 1:
            raise ValueError("radial samples must be 1-d arrays of equal length")
        if r.size < 2 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be strictly increasing with at least two samples")
        if r[0] < 0:
            raise ValueError("radii must be nonnegative")
        if np.any(rho < 0) or np.any(p < 0):
            raise ValueError("density and pressure must be nonnegative")
        self.r, self.rho, self.v_r, self.p = r, rho, v_r, p
        self.n = n

    @property
    def extent(self) -> float:
        return float(self.r[-1])

    def values(self, r) -> FieldValues:
        r = np.asarray(r, dtype=float)
        return _radial_values(
            r,
            np.interp(r, self.r, self.rho),
            np.interp(r, self.r, self.v_r),
            np.interp(r, self.r, self.p),
        )

    def covers(self, hi: float) -> bool:
        return self.r[0] <= 0.0 and self.r[-1] >= hi * (1 - 1e-12)

    def integrate(self, integrand: Integrand, lo: float = 0.0, hi: float | None = None,
                  breakpoints: Iterable[float] = ()) -> float:
        if hi is None or math.isinf(hi) or hi > self.r[-1]:
            hi = float(self.r[-1])
        lo = max(float(lo), float(self.r[0]))
        if hi <= lo:
            return 0.0
        inner = self.r[(self.r > lo) & (self.r < hi)]
        extra = [x for x in breakpoints if lo < x < hi]
        knots = np.unique(np.concatenate([[lo], inner, extra, [hi]]))
        a, b = knots[:-1], knots[1:]
        m = 0.5 * (a + b)
        fa = integrand(self.values(a))
        fm = integrand(self.values(m))
        fb = integrand(self.values(b))
        if self.n > 1:
            fa = fa * a ** (self.n - 1)
            fm = fm * m ** (self.n - 1)
            fb = fb * b ** (self.n - 1)
        panels = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        return self.n * unit_ball_volume(self.n) * math.fsum(panels.tolist())

    def density_extremes(self, hi: float) -> tuple[float, float]:
        mask = self.r <= hi
        rho = self.rho[mask]
        if hi > self.r[0]:
            edge = float(np.interp(hi, self.r, self.rho))
            rho = np.append(rho, edge)
        return float(np.max(rho)), float(np.min(rho))

    def entropy_inf(self, gamma: float, hi: float | None = None,
                    floor: float = VACUUM_FLOOR) -> float:
        mask = np.ones_like(self.r, dtype=bool) if hi is None else self.r <= hi
        return entropy_inf(self.rho[mask], self.p[mask], gamma, floor)

    @classmethod
    def from_symmetric_line(cls, x, rho, v, p, r_max: float | None = None) -> "RadialField":
        """Fold a 1-d field sampled at cell centres symmetric about 0 onto the
        half-line: density and pressure are averaged evenly, velocity oddly.
        A sample at ``r = 0`` is prepended from the even extension."""
        x = np.asarray(x, dtype=float)
        if x.size % 2 or not np.allclose(x, -x[::-1], rtol=0, atol=1e-12 * np.max(np.abs(x))):
            raise ValueError("cell centres must be symmetric about the origin")
        half = x.size // 2
        right = slice(half, None)
        left = slice(half - 1, None, -1)
        r = x[right]
        rho_r = 0.5 * (np.asarray(rho)[right] + np.asarray(rho)[left])
        v_r = 0.5 * (np.asarray(v)[right] - np.asarray(v)[left])
        p_r = 0.5 * (np.asarray(p)[right] + np.asarray(p)[left])
        r = np.concatenate([[0.0], r])
        rho_r = np.concatenate([[rho_r[0]], rho_r])
        v_r = np.concatenate([[0.0], v_r])
        p_r = np.concatenate([[p_r[0]], p_r])
        if r_max is not None:
            keep = r <= r_max
            if keep.sum() < r.size:
                # carry one sample past r_max so the table covers it
                keep[np.argmax(~keep)] = True
            r, rho_r, v_r, p_r = r[keep], rho_r[keep], v_r[keep], p_r[keep]
        return cls(r, rho_r, v_r, p_r, n=1)


class GridField:
    """General field on a Cartesian grid of cell centres with cell volumes."""

    radial = False

    def __init__(self, points, volumes, rho, V, p):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.volumes = np.asarray(volumes, dtype=float) * np.ones(self.points.shape[0])
        self.rho = np.asarray(rho, dtype=float)
        self.V = np.asarray(V, dtype=float).reshape(self.points.shape)
        self.p = np.asarray(p, dtype=float)
        self.n = self.points.shape[1]
        r = np.linalg.norm(self.points, axis=1)
        vdotx = np.einsum("ij,ij->i", self.V, self.points)
        v2 = np.einsum("ij,ij->i", self.V, self.V)
        self._values = FieldValues(
            r=r, rho=self.rho, vdotx=vdotx, v2=v2, p=self.p,
            sigma2=np.maximum(v2 * r * r - vdotx * vdotx, 0.0),
        )

    @property
    def extent(self) -> float:
        return float(np.max(self._values.r))

    def values(self) -> FieldValues:
        return self._values

    def integrate(self, integrand: Integrand, lo: float = 0.0, hi: float = math.inf,
                  breakpoints: Iterable[float] = ()) -> float:
        r = self._values.r
        mask = (r >= lo) & (r < hi) if lo > 0 else r < hi
        vals = integrand(self._values)
        return math.fsum((vals * self.volumes)[mask].tolist())

    def density_extremes(self, hi: float) -> tuple[float, float]:
        mask = self._values.r <= hi
        return float(np.max(self.rho[mask])), float(np.min(self.rho[mask]))

    def entropy_inf(self, gamma: float, hi: float | None = None) -> float:
        mask = np.ones_like(self.rho, dtype=bool) if hi is None else self._values.r <= hi
        return entropy_inf(self.rho[mask], self.p[mask], gamma)


class FieldEvaluator:
    """Time-dependent field.

    For ``radial=True`` the callable is ``func(r, t) -> (rho, v_r, p)``; for
    general fields it is ``func(x, t) -> (rho, V, p)`` with ``x`` of shape
    ``(m, n)`` and a ``grid`` of ``(points, volumes)`` must be supplied.
    """

    def __init__(self, func: Callable, n: int, radial: bool = True, grid=None):
        if not radial and grid is None:
            raise ValueError("general evaluators need an integration grid")
        self.func = func
        self.n = n
        self.radial = radial
        self.grid = grid

    def at_time(self, t: float):
        if self.radial:
            return RadialProfile(lambda r: self.func(r, t), self.n)
        points, volumes = self.grid
        rho, V, p = self.func(points, t)
        return GridField(points, volumes, rho, V, p)

    def point_values(self, r, t, directions: int | None = None) -> FieldValues:
        """Values on spheres of radius ``r``.  Radial fields need one point
        per sphere; general fields are sampled in ``2**n * 32`` directions."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.radial:
            rho, vr, p = self.func(r, t)
            return _radial_values(r, np.broadcast_to(rho, r.shape), np.broadcast_to(vr, r.shape),
                                  np.broadcast_to(p, r.shape))
        dirs = sphere_directions(self.n, directions or 2**self.n * 32)
        x = (r[:, None, None] * dirs[None, :, :]).reshape(-1, self.n)
        rho, V, p = self.func(x, t)
        V = np.asarray(V, dtype=float).reshape(x.shape)
        rr = np.repeat(r, dirs.shape[0])
        vdotx = np.einsum("ij,ij->i", V, x)
        v2 = np.einsum("ij,ij->i", V, V)
        return FieldValues(r=rr, rho=np.asarray(rho, float), vdotx=vdotx, v2=v2,
                           p=np.asarray(p, float),
                           sigma2=np.maximum(v2 * rr * rr - vdotx**2, 0.0))


def sphere_directions(n: int, count: int) -> np.ndarray:
    """Quasi-uniform unit vectors in ``R^n``."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        ang = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    # Halton points pushed through the normal quantile, then normalised
    from scipy.stats import norm, qmc

    u = qmc.Halton(d=n, scramble=False).random(count + 1)[1:]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
