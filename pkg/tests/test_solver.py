import numpy as np
import pytest

from euler_blowup.core import WeightFunction
from euler_blowup.moments import moment_Q
from euler_blowup.oracles import ExactSolution
from euler_blowup.solver import (
    BlowupDetector,
    Grid,
    SolverBreakdown,
    SolverState,
    constant_boundary,
    exact_boundary,
    interface_fluxes,
    outflow_boundary,
    run_until,
    step,
    to_conserved,
    to_primitive,
)


def uniform(cells=64, rho=1.3, v=0.4, p=0.7):
    g = Grid(-1.0, 1.0, cells)
    return SolverState.from_primitive(g, np.full(cells, rho), np.full(cells, v), np.full(cells, p), 1.4)


def sod(cells=200):
    g = Grid(-1.0, 1.0, cells)
    left = g.centers < 0
    return SolverState.from_primitive(g, np.where(left, 1.0, 0.125), np.zeros(cells),
                                      np.where(left, 1.0, 0.1), 1.4)


def test_conversion_roundtrip():
    rho, v, p = np.array([1.0, 2.0]), np.array([-3.0, 0.5]), np.array([0.2, 4.0])
    back = to_primitive(to_conserved(rho, v, p, 1.4), 1.4)
    for a, b in zip(back, (rho, v, p)):
        assert np.allclose(a, b, rtol=1e-14)


def test_uniform_state_preserved_exactly():
    s = uniform()
    U0 = s.U.copy()
    bc = constant_boundary(1.3, 0.4, 0.7)
    for _ in range(50):
        s = step(s, bc)
    assert np.array_equal(s.U, U0)


def test_sod_positive_and_conservative():
    s = sod()
    bc = outflow_boundary()
    for _ in range(200):
        F = interface_fluxes(s, bc)
        old = s.U.sum(axis=1) * s.grid.h
        new_state = step(s, bc)
        dt = new_state.t - s.t
        change = new_state.U.sum(axis=1) * s.grid.h - old
        expected = -dt * (F[:, -1] - F[:, 0])
        assert np.allclose(change, expected, rtol=0, atol=1e-12 * np.abs(old))
        s = new_state
        assert s.is_positive()


def test_step_halving_restores_positivity():
    g = Grid(-1.0, 1.0, 40)
    x = g.centers
    s = SolverState.from_primitive(g, np.ones(40), np.where(x < 0, -5.0, 5.0), np.full(40, 0.01), 1.4)
    dt = 10 * s.stable_dt()
    new = step(s, outflow_boundary(), dt)
    assert new.is_positive()
    assert new.t - s.t < dt
    with pytest.raises(SolverBreakdown):
        step(s, outflow_boundary(), dt, max_halvings=0)


def _l1_error(cells, a0=-1.0, t_end=0.5):
    ex = ExactSolution(a0)
    g = Grid(-5.0, 5.0, cells)
    s = SolverState.from_primitive(g, *ex.fields(g.centers, 0.0), 3.0)
    res = run_until(s, t_end, exact_boundary(ex.fields))
    rho = res.final.primitive()[0]
    return float(np.sum(np.abs(rho - ex.fields(g.centers, t_end)[0])) * g.h)


def test_convergence_against_exact_solution():
    e400, e800 = _l1_error(400), _l1_error(800)
    assert e400 / e800 >= 1.8


def test_exact_tracking_run_is_smooth():
    ex = ExactSolution(-1.0)
    g = Grid(-5.0, 5.0, 800)
    s = SolverState.from_primitive(g, *ex.fields(g.centers, 0.0), 3.0)
    det = BlowupDetector()
    res = run_until(s, 1.0, exact_boundary(ex.fields), det)
    assert res.detection_time is None and res.breakdown_time is None


def test_run_until_lands_on_probes():
    s = sod(100)
    probes = [0.0, 0.05, 0.1, 0.125]
    res = run_until(s, 0.15, outflow_boundary(), probes=probes)
    assert [sn.t for sn in res.snapshots] == probes + [0.15]
    with pytest.raises(ValueError):
        run_until(res.final, 0.1, outflow_boundary())


def test_detector_is_monotone():
    det = BlowupDetector(factor=2.0)
    s = sod(100)
    assert det.update(s) is False
    steep = SolverState.from_primitive(s.grid, np.where(s.grid.centers < 0, 10.0, 0.1),
                                       np.zeros(100), np.ones(100), 1.4, t=1.0)
    assert det.update(steep) is True
    assert det.update(s) is True
    assert det.detected_time == 1.0


def test_background_run_has_zero_moment(cii1_background):
    g = Grid(-3.0, 3.0, 300)
    s = SolverState.from_primitive(g, np.ones(300), np.zeros(300), np.ones(300), 3.0)
    res = run_until(s, 0.1, constant_boundary(1.0, 0.0, 1.0), probes=np.linspace(0, 0.1, 5))
    w = WeightFunction(1.0, 2.0)
    assert res.detection_time is None
    for sn in res.snapshots:
        assert abs(moment_Q(sn.radial_field(3.0), w, 1.0)) < 1e-10


def test_converging_case2_detects(cii1_generator):
    g = Grid(-3.0, 3.0, 1200)
    x = g.centers
    rho, vr, p = cii1_generator.profile_func(np.abs(x))
    s = SolverState.from_primitive(g, rho, vr * np.sign(x), p, 3.0)
    res = run_until(s, 0.05, constant_boundary(1.0, 0.0, 1.0))
    assert res.detection_time is not None and 0 < res.detection_time < 0.05
