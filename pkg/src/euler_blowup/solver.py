"""First-order Rusanov finite-volume solver for the 1-d Euler equations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .fields import RadialField

log = logging.getLogger(__name__)


class SolverBreakdown(RuntimeError):
    """Positivity could not be restored by step halving."""

    def __init__(self, t: float, message: str):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    cells: int

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.cells) + 0.5) * self.h


def to_conserved(rho, v, p, gamma):
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.stack([rho, rho * v, p / (gamma - 1.0) + 0.5 * rho * v * v])


def to_primitive(U, gamma):
    rho = U[0]
    v = U[1] / rho
    p = (gamma - 1.0) * (U[2] - 0.5 * rho * v * v)
    return rho, v, p


def physical_flux(U, gamma):
    rho, v, p = to_primitive(U, gamma)
    return np.stack([U[1], U[1] * v + p, (U[2] + p) * v])


def rusanov_flux(UL, UR, gamma):
    rl, vl, pl = to_primitive(UL, gamma)
    rr, vr, pr = to_primitive(UR, gamma)
    smax = np.maximum(np.abs(vl) + np.sqrt(gamma * pl / rl), np.abs(vr) + np.sqrt(gamma * pr / rr))
    return 0.5 * (physical_flux(UL, gamma) + physical_flux(UR, gamma)) - 0.5 * smax * (UR - UL)


# boundary provider: (t, grid) -> (left ghost, right ghost) as primitive triples
Boundary = Callable[[float, Grid], tuple]


def constant_boundary(rho: float, v: float, p: float) -> Boundary:
    state = (rho, v, p)
    return lambda t, grid: (state, state)


def exact_boundary(fields: Callable) -> Boundary:
    """Dirichlet ghost values from a closed-form ``fields(x, t)``."""
    def provider(t, grid):
        xl = grid.x_min - 0.5 * grid.h
        xr = grid.x_max + 0.5 * grid.h
        return tuple(float(a) for a in fields(xl, t)), tuple(float(a) for a in fields(xr, t))

    return provider


def outflow_boundary() -> Boundary:
    """Zero-gradient extrapolation; the ghosts are filled from edge cells."""
    return None


@dataclass
class SolverState:
    grid: Grid
    U: np.ndarray
    t: float
    gamma: float
    cfl: float = 0.45

    @classmethod
    def from_primitive(cls, grid: Grid, rho, v, p, gamma: float, t: float = 0.0, cfl: float = 0.45):
        return cls(grid, to_conserved(rho, v, p, gamma), t, gamma, cfl)

    def primitive(self):
        return to_primitive(self.U, self.gamma)

    def max_speed(self) -> float:
        rho, v, p = self.primitive()
        return float(np.max(np.abs(v) + np.sqrt(self.gamma * p / rho)))

    def stable_dt(self) -> float:
        return self.cfl * self.grid.h / self.max_speed()

    def is_positive(self) -> bool:
        rho, v, p = self.primitive()
        return bool(np.all(rho > 0) and np.all(p > 0) and np.all(np.isfinite(self.U)))

    def radial_field(self, r_max: float | None = None) -> RadialField:
        rho, v, p = self.primitive()
        return RadialField.from_symmetric_line(self.grid.centers, rho, v, p, r_max)


def _ghosts(state: SolverState, boundary: Boundary | None):
    if boundary is None:
        return state.U[:, :1], state.U[:, -1:]
    left, right = boundary(state.t, state.grid)
    return (to_conserved(*left, state.gamma)[:, None],
            to_conserved(*right, state.gamma)[:, None])


def interface_fluxes(state: SolverState, boundary: Boundary | None) -> np.ndarray:
    gl, gr = _ghosts(state, boundary)
    Ue = np.concatenate([gl, state.U, gr], axis=1)
    return rusanov_flux(Ue[:, :-1], Ue[:, 1:], state.gamma)


def step(state: SolverState, boundary: Boundary | None, dt: float | None = None,
         max_halvings: int = 20) -> SolverState:
    """One forward-Euler update; ``dt`` defaults to the CFL step and is halved
    until density and pressure stay positive."""
    dt = state.stable_dt() if dt is None else dt
    F = interface_fluxes(state, boundary)
    div = (F[:, 1:] - F[:, :-1]) / state.grid.h
    for _ in range(max_halvings + 1):
        new = replace(state, U=state.U - dt * div, t=state.t + dt)
        if new.is_positive():
            return new
        dt *= 0.5
    raise SolverBreakdown(state.t, f"positivity lost at t={state.t:.6g} after {max_halvings} halvings")


@dataclass
class BlowupDetector:
    """Flags steepening once ``max |drho/dx|`` exceeds ``factor`` times its
    initial value."""

    factor: float = 50.0
    reference: float | None = None
    detected_time: float | None = None
    history: list = field(default_factory=list)

    @staticmethod
    def gradient(state: SolverState) -> float:
        rho = state.U[0]
        return float(np.max(np.abs(np.diff(rho)))) / state.grid.h

    @property
    def threshold(self) -> float:
        return self.factor * (self.reference or 0.0)

    def update(self, state: SolverState) -> bool:
        g = self.gradient(state)
        if self.reference is None:
            self.reference = g
        self.history.append((state.t, g))
        if self.detected_time is None and g > self.threshold:
            self.detected_time = state.t
        return self.detected_time is not None


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    p: np.ndarray
    detected: bool

    def radial_field(self, r_max: float | None = None) -> RadialField:
        return RadialField.from_symmetric_line(self.x, self.rho, self.v, self.p, r_max)


@dataclass
class RunResult:
    snapshots: list
    detection_time: float | None
    breakdown_time: float | None
    final: SolverState
    steps: int


def run_until(state: SolverState, t_end: float, boundary: Boundary | None,
              detector: BlowupDetector | None = None, probes=(),
              stop_on_breakdown: bool = True) -> RunResult:
    """Advance to ``t_end`` landing exactly on every probe time."""
    if not t_end > state.t:
        raise ValueError("t_end must exceed the current time")
    targets = sorted({float(t) for t in probes if state.t <= t <= t_end} | {float(t_end)})
    detector = detector if detector is not None else BlowupDetector()
    detector.update(state)
    snapshots = []
    breakdown = None
    steps = 0

    def snap(s):
        rho, v, p = s.primitive()
        snapshots.append(Snapshot(s.t, s.grid.centers, rho.copy(), v.copy(), p.copy(),
                                  detector.detected_time is not None))

    if targets and targets[0] == state.t:
        snap(state)
        targets = targets[1:]
    for target in targets:
        while state.t < target:
            dt = min(state.stable_dt(), target - state.t)
            try:
                state = step(state, boundary, dt)
            except SolverBreakdown as exc:
                breakdown = exc.t
                log.warning("solver breakdown at t=%.6g", exc.t)
                if detector.detected_time is None:
                    detector.detected_time = exc.t
                if stop_on_breakdown:
                    return RunResult(snapshots, detector.detected_time, breakdown, state, steps)
                raise
            if target - state.t < 1e-14 * max(1.0, target):
                state = replace(state, t=target)
            steps += 1
            detector.update(state)
        snap(state)
    return RunResult(snapshots, detector.detected_time, breakdown, state, steps)
