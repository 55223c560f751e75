"""Adaptive composite Simpson quadrature.

The integrator works breadth-first on batches of subintervals so that a
vectorised integrand is called once per refinement level rather than once
per point.  Accepted panel contributions are summed with ``math.fsum``,
which makes the result independent of the order in which panels converge.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

ABS_TOL = 1e-12
REL_TOL = 1e-10

# Evaluation point standing in for u = 0 in the tail map r = r1/u.
_TAIL_U_FLOOR = 1e-10


class QuadratureError(RuntimeError):
    """Raised when refinement hits the level cap without meeting tolerance."""


def _segments(a: float, b: float, breakpoints: Iterable[float], initial: int) -> np.ndarray:
    inner = sorted({float(x) for x in breakpoints if a < x < b})
    knots = [a, *inner, b]
    edges = [np.linspace(lo, hi, initial + 1) for lo, hi in zip(knots[:-1], knots[1:])]
    return np.concatenate([e[:-1] for e in edges] + [np.array([b])])


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    initial: int = 4,
    max_level: int = 40,
) -> float:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    Breakpoints inside ``(a, b)`` always become panel boundaries, so a
    piecewise-smooth integrand is only ever sampled on smooth pieces.
    A panel is accepted once the two-half Simpson estimate differs from the
    one-panel estimate by less than its length-weighted share of
    ``max(abs_tol, rel_tol * |I|)``; the accepted value carries the usual
    Richardson correction.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, breakpoints, abs_tol, rel_tol, initial, max_level)

    edges = _segments(a, b, breakpoints, initial)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_lo = np.asarray(f(lo), dtype=float)
    f_hi = np.asarray(f(hi), dtype=float)
    f_mid = np.asarray(f(mid), dtype=float)
    width = b - a

    accepted: list[float] = []
    for _ in range(max_level):
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        f_q1 = np.asarray(f(q1), dtype=float)
        f_q3 = np.asarray(f(q3), dtype=float)
        h = hi - lo
        whole = h / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
        halves = h / 12.0 * (f_lo + 4.0 * f_q1 + 2.0 * f_mid + 4.0 * f_q3 + f_hi)
        err = halves - whole
        if not np.all(np.isfinite(halves)):
            raise QuadratureError("integrand returned non-finite values")

        estimate = math.fsum(accepted) + math.fsum(halves.tolist())
        tol = max(abs_tol, rel_tol * abs(estimate))
        ok = np.abs(err) <= 15.0 * tol * h / width
        if np.any(ok):
            accepted.extend((halves[ok] + err[ok] / 15.0).tolist())
        todo = ~ok
        if not np.any(todo):
            return math.fsum(accepted)

        # children: [lo, mid] and [mid, hi], both reusing cached samples
        lo_t, mid_t, hi_t = lo[todo], mid[todo], hi[todo]
        lo = np.concatenate([lo_t, mid_t])
        hi = np.concatenate([mid_t, hi_t])
        new_mid = np.concatenate([q1[todo], q3[todo]])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo[todo], f_mid[todo]]),
            np.concatenate([f_q1[todo], f_q3[todo]]),
            np.concatenate([f_mid[todo], f_hi[todo]]),
        )
        mid = new_mid

    raise QuadratureError(
        f"adaptive Simpson did not converge on [{a}, {b}] within {max_level} levels"
    )


def integrate_to_infinity(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    split: float | None = None,
    breakpoints: Iterable[float] = (),
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
) -> float:
    """Integrate over ``[a, inf)``.

    The finite part ``[a, split]`` is integrated directly; the tail is mapped
    by ``r = split / u`` onto ``(0, 1]``.  The integrand must decay at least
    like ``r**-2`` so the mapped tail stays bounded at ``u = 0``.
    """
    if split is None:
        split = max(1.0, 2.0 * abs(a)) if a >= 0 else 1.0
    if split <= a:
        split = a + 1.0
    head = adaptive_simpson(f, a, split, breakpoints, abs_tol, rel_tol)

    def tail(u: np.ndarray) -> np.ndarray:
        u = np.maximum(np.asarray(u, dtype=float), _TAIL_U_FLOOR)
        r = split / u
        return np.asarray(f(r), dtype=float) * split / (u * u)

    return head + adaptive_simpson(tail, 0.0, 1.0, (), abs_tol, rel_tol)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in ``n`` dimensions, by the recurrence
    ``w_n = 2 pi w_{n-2} / n`` (exact for ``n = 1``)."""
    w = 1.0 if n % 2 == 0 else 2.0
    for j in range(2 + n % 2, n + 1, 2):
        w *= 2.0 * math.pi / j
    return w


def radial_integral(
    g: Callable[[np.ndarray], np.ndarray],
    n: int,
    lo: float,
    hi: float,
    breakpoints: Iterable[float] = (),
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
) -> float:
    """``int_{lo <= |x| <= hi} g(|x|) dx`` in ``R^n`` via the shell measure.

    ``hi`` may be ``math.inf``.
    """
    surface = n * unit_ball_volume(n)
    if n == 1:
        weighted = g
    else:
        def weighted(r: np.ndarray) -> np.ndarray:
            return np.asarray(g(r), dtype=float) * np.asarray(r, dtype=float) ** (n - 1)

    if math.isinf(hi):
        value = integrate_to_infinity(weighted, lo, None, breakpoints, abs_tol, rel_tol)
    else:
        value = adaptive_simpson(weighted, lo, hi, breakpoints, abs_tol, rel_tol)
    return surface * value
