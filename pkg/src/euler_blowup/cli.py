"""Command-line front end: ``euler-blowup constants|analyze|figures|phantom``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .certificates import (
    check_theorem1,
    phantom_from_problem,
    phantom_witness,
    theorem2_bounds,
    theorem3_verdict,
    theorem4_bounds,
    case1_problem,
)
from .comparison import blowup_time_quadrature, integrate_comparison, phase_portrait, root_structure
from .core import Background, GasParameters, WeightFunction, derived_constants
from .fields import RadialField
from .moments import envelope, excess_energy, excess_mass, mass as total_mass, moment_G, moment_G_prime, moment_Q, regional_energies
from .oracles import CaseIIGenerator, ExactSolution
from .solver import BlowupDetector, Grid, SolverState, constant_boundary, run_until

log = logging.getLogger("euler_blowup")

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_VIOLATION = 3
EXIT_CONFIG = 64
EXIT_IO = 74

_pos = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["case", "gas", "weight", "data"],
    "properties": {
        "case": {"enum": ["I", "II"]},
        "gas": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "gamma"],
            "properties": {"n": {"type": "integer", "minimum": 1}, "gamma": {"type": "number"}},
        },
        "weight": {
            "type": "object",
            "additionalProperties": False,
            "required": ["R", "k"],
            "properties": {"R": _pos, "k": {"type": "number"}},
        },
        "data": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "exact": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["a0"],
                    "properties": {"a0": {"type": "number"}},
                },
                "case2": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["background"],
                    "properties": {
                        "background": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["rho_bar", "p_bar", "R0"],
                            "properties": {"rho_bar": _pos, "p_bar": _pos, "R0": _pos},
                        },
                        "amplitudes": {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                "rho": {"type": "number"},
                                "v": {"type": "number"},
                                "p": {"type": "number"},
                            },
                        },
                    },
                },
                "file": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["path"],
                    "properties": {"path": {"type": "string"}},
                },
            },
        },
        "entropy_inf": {"type": "number"},
        "horizon": _pos,
        "theorems": {"type": "array", "items": {"enum": [1, 2, 3, 4]}, "uniqueItems": True},
        "theorem1": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_max": _pos,
                "delta1": {"type": "number", "minimum": 0},
                "ladder": {"type": "array", "items": _pos, "minItems": 1},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cells": {"type": "integer", "minimum": 8},
                "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "domain": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "probes": {"type": "integer", "minimum": 2},
                "detector_factor": _pos,
            },
        },
        "phantom": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "budget": {"type": "integer", "minimum": 0},
                "a0_points": {"type": "integer", "minimum": 0},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "json"]}, "uniqueItems": True},
            },
        },
    },
}

DEFAULTS = {
    "horizon": 2.0,
    "theorem1": {"t_max": 1e6, "ladder": [10.0 * 2.0**j for j in range(8)]},
    "solver": {"cells": 1200, "cfl": 0.45, "domain": [-3.0, 3.0], "probes": 151, "detector_factor": 50.0},
    "phantom": {"budget": 10000, "a0_points": 201},
    "outputs": {"directory": "out", "formats": ["csv", "json"]},
}


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ config


def resolve_config(raw: dict, base_dir: Path | None = None) -> dict:
    """Validate against the schema and physical constraints; fill defaults."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message}") from None
    cfg = json.loads(json.dumps(raw))
    for key, val in DEFAULTS.items():
        if isinstance(val, dict):
            cfg[key] = {**val, **cfg.get(key, {})}
        else:
            cfg.setdefault(key, val)
    gas, weight = cfg["gas"], cfg["weight"]
    if not gas["gamma"] > 1:
        raise ConfigError(f"gamma must exceed 1, got {gas['gamma']}")
    if not weight["k"] > gas["n"]:
        raise ConfigError(f"k must exceed n, got k={weight['k']}, n={gas['n']}")
    source = next(iter(cfg["data"]))
    if cfg["case"] == "I" and source == "case2":
        raise ConfigError("case I needs exact or file data")
    if cfg["case"] == "II" and source != "case2":
        raise ConfigError("case II needs case2 data")
    if source == "exact" and (gas["n"] != 1 or gas["gamma"] != 3):
        raise ConfigError("the exact solution is defined for n=1, gamma=3")
    if source == "file" and base_dir is not None:
        p = Path(cfg["data"]["file"]["path"])
        cfg["data"]["file"]["path"] = str(p if p.is_absolute() else base_dir / p)
    if cfg["case"] == "II":
        bg = cfg["data"]["case2"]["background"]
        amp = {"rho": 0.0, "v": 0.0, "p": 0.0, **cfg["data"]["case2"].get("amplitudes", {})}
        cfg["data"]["case2"]["amplitudes"] = amp
        if bg["rho_bar"] + min(amp["rho"], 0.0) <= 0 or bg["p_bar"] + min(amp["p"], 0.0) <= 0:
            raise ConfigError("perturbation amplitudes make density or pressure nonpositive")
        theorems = cfg.get("theorems", [3, 4])
        inner = (weight["k"] - 1.0) * weight["R"] / weight["k"]
        if 3 in theorems and not bg["R0"] < inner:
            raise ConfigError(f"R0={bg['R0']} must be below (k-1)R/k={inner} for the first Case II test")
    lo, hi = cfg["solver"]["domain"]
    if not lo < hi:
        raise ConfigError("solver domain must be increasing")
    t1 = cfg["theorem1"]
    if "delta1" in t1:
        g = GasParameters(gas["n"], gas["gamma"])
        if not t1["delta1"] < g.delta / (g.n * g.omega_n):
            raise ConfigError("delta1 outside its admissible interval")
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return resolve_config(raw, Path(path).resolve().parent)


# ----------------------------------------------------------------- writers


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


class Outputs:
    def __init__(self, cfg: dict, out: str | None):
        self.dir = Path(out or cfg["outputs"]["directory"])
        self.formats = set(cfg["outputs"]["formats"])
        self.dir.mkdir(parents=True, exist_ok=True)

    def json(self, name: str, payload: dict):
        if "json" in self.formats:
            write_json(self.dir / name, payload)

    def csv(self, name: str, header, rows):
        if "csv" in self.formats:
            write_csv(self.dir / name, header, rows)


# --------------------------------------------------------------- scenarios


def _gas(cfg) -> GasParameters:
    return GasParameters(cfg["gas"]["n"], float(cfg["gas"]["gamma"]))


def _weight(cfg) -> WeightFunction:
    return WeightFunction(float(cfg["weight"]["R"]), float(cfg["weight"]["k"]))


def _background(cfg) -> Background:
    bg = cfg["data"]["case2"]["background"]
    return Background(bg["rho_bar"], bg["p_bar"], bg["R0"], float(cfg["gas"]["gamma"]))


def _generator(cfg) -> CaseIIGenerator:
    amp = cfg["data"]["case2"]["amplitudes"]
    return CaseIIGenerator(_background(cfg), cfg["gas"]["n"], amp["rho"], amp["v"], amp["p"])


def load_field_file(path: str, n: int) -> RadialField:
    """Radial samples from a CSV with header ``r,rho,v,p``."""
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise OSError(f"cannot read data file {path}: {exc}") from exc
    try:
        return RadialField(data["r"], data["rho"], data["v"], data["p"], n=n)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad data file {path}: {exc}") from None


def case1_data(cfg):
    """``(field0, evaluator or None, mass, energy, exact or None)``."""
    g = _gas(cfg)
    if "exact" in cfg["data"]:
        ex = ExactSolution(float(cfg["data"]["exact"]["a0"]))
        return ex.profile(0.0), ex.evaluator(), ex.mass, ex.energy, ex
    f = load_field_file(cfg["data"]["file"]["path"], g.n)
    gm1 = g.gamma - 1.0
    energy = f.integrate(lambda v: 0.5 * v.rho * v.v2 + v.p / gm1, 0.0, None)
    return f, None, total_mass(f), energy, None


def _entropy(cfg, field0, g: GasParameters, w: WeightFunction) -> float:
    if "entropy_inf" in cfg:
        return float(cfg["entropy_inf"])
    return field0.entropy_inf(g.gamma, w.R)


# ---------------------------------------------------------------- commands


def cmd_constants(cfg: dict, out: Outputs) -> int:
    g, w = _gas(cfg), _weight(cfg)
    if cfg["case"] == "I":
        field0, _, m, E, _ = case1_data(cfg)
    else:
        gen = _generator(cfg)
        field0, m, E = gen.profile(), gen.initial_mass(), gen.initial_energy()
    s_inf = _entropy(cfg, field0, g, w)
    cb = derived_constants(g, w, s_inf)
    table = cb.as_dict()
    if cfg["case"] == "I":
        table["G_plusplus"] = (cb.A2 * E / cb.A1) ** (1.0 / g.gamma)
        table["G_plus"] = ((g.gamma - 1.0) * (w.k - g.n) * E / cb.A1) ** (1.0 / g.gamma)
        table["energy"] = E
        table["mass"] = m
    else:
        table["sigma"] = _background(cfg).sigma
        table["e0"] = E
        table["m0"] = m
    for key in sorted(table):
        print(f"{key:>20s} = {table[key]:.17g}")
    out.json("constants.json", {"version": __version__, "config": cfg, "constants": table})
    return EXIT_OK


def _analyze_case1(cfg, out: Outputs) -> tuple[int, dict]:
    g, w = _gas(cfg), _weight(cfg)
    theorems = cfg.get("theorems", [1, 2])
    field0, ev, m, E, ex = case1_data(cfg)
    s_inf = _entropy(cfg, field0, g, w)
    report: dict = {"mass": m, "energy": E, "entropy_inf": s_inf}
    code = EXIT_OK
    if 1 in theorems and ev is not None:
        t1 = cfg["theorem1"]
        rep = check_theorem1(ev, g, t1["t_max"], t1.get("delta1"), t1["ladder"], E)
        report["theorem1"] = rep.as_dict()
        if rep.verdict == "satisfied":
            code = EXIT_BLOWUP
    p, cb = case1_problem(field0, w, g, m, E, s_inf)
    report["constants"] = cb.as_dict()
    ph = phantom_from_problem(p)
    report["phantom"] = {"ie2_satisfied": ph.ie2_satisfied, "f_at_z_plus": ph.f_at_z_plus,
                         "G_prime_0": ph.G_prime_0, "G0": ph.G0, "z_plus": ph.z_plus}
    if ph.ie2_satisfied:
        log.warning("phantom condition satisfied: finite-time singularity certified")
        code = EXIT_BLOWUP
    if 2 in theorems:
        observed = None
        if ev is not None:
            observed = lambda t: ev.at_time(t).density_extremes(w.R)
        res = theorem2_bounds(field0, w, g, m, E, cfg["horizon"], observed=observed, entropy_inf=s_inf)
        tr = res.track
        report["theorem2"] = {"T": res.T, "degenerate": res.degenerate, "case_id": res.case_id,
                              "z0": res.problem.z0, "z0_prime": res.problem.z0_prime,
                              "z_plus": res.problem.z_plus, "violation_time": tr.violation_time,
                              "violations": int(tr.violation.sum())}
        out.csv("bounds.csv", ["t", "lower", "upper", "observed_sup", "observed_inf", "violation"], tr.rows())
        if tr.violation_time is not None and code != EXIT_BLOWUP:
            code = EXIT_VIOLATION
    return code, report


def run_case2_solver(cfg, gen: CaseIIGenerator, horizon: float):
    """Solver run on the symmetric line with constant background ghosts."""
    s = cfg["solver"]
    bg = gen.background
    grid = Grid(float(s["domain"][0]), float(s["domain"][1]), int(s["cells"]))
    x = grid.centers
    rho, vr, p = gen.profile_func(np.abs(x))
    state = SolverState.from_primitive(grid, rho, vr * np.sign(x), p, bg.gamma, cfl=float(s["cfl"]))
    det = BlowupDetector(factor=float(s["detector_factor"]))
    probes = np.linspace(0.0, horizon, int(s["probes"]))
    return run_until(state, horizon, constant_boundary(bg.rho_bar, 0.0, bg.p_bar), det, probes)


def _analyze_case2(cfg, out: Outputs) -> tuple[int, dict]:
    g, w = _gas(cfg), _weight(cfg)
    theorems = cfg.get("theorems", [3, 4])
    gen = _generator(cfg)
    bg = gen.background
    horizon = float(cfg["horizon"])
    report: dict = {"sigma": bg.sigma}
    code = EXIT_OK
    run = None
    field0 = gen.profile()
    m0, e0 = gen.initial_mass(), gen.initial_energy()
    if g.n == 1:
        run = run_case2_solver(cfg, gen, horizon)
        lo, hi = cfg["solver"]["domain"]
        r_max = min(-lo, hi)
        if r_max < w.R:
            raise ConfigError("solver domain must contain the ball of radius R")
        # seed the bounds from the discrete initial data the solver actually evolves
        field0 = run.snapshots[0].radial_field(r_max)
        m0, e0 = excess_mass(field0, bg.rho_bar), excess_energy(field0, bg)
        report["solver"] = {"detection_time": run.detection_time, "breakdown_time": run.breakdown_time,
                            "steps": run.steps, "cells": cfg["solver"]["cells"]}
    else:
        log.warning("the solver is one-dimensional; no observed densities for n=%d", g.n)
    report["m0"], report["e0"] = m0, e0
    s_inf = _entropy(cfg, field0, g, w)
    if 3 in theorems:
        v3 = theorem3_verdict(field0, w, g, bg, e0)
        report["theorem3"] = v3.as_dict()
        if v3.applies:
            code = EXIT_BLOWUP
            if run is not None and run.detection_time is not None:
                report["theorem3"]["detector_before_T1"] = bool(run.detection_time <= v3.T1)
                if run.detection_time > v3.T1:
                    log.warning("detector fired at %.6g after the certified time %.6g", run.detection_time, v3.T1)
    if 4 in theorems:
        if run is not None:
            times = np.array([sn.t for sn in run.snapshots])
            fields = [sn.radial_field(min(-cfg["solver"]["domain"][0], cfg["solver"]["domain"][1]))
                      for sn in run.snapshots]
            ext = [f.density_extremes(w.R) for f in fields]
            observed = (np.array([a for a, _ in ext]), np.array([b for _, b in ext]))
            Q = np.array([moment_Q(f, w, bg.rho_bar) for f in fields])
        else:
            times, observed, Q = np.linspace(0.0, horizon, 201), None, None
        res = theorem4_bounds(field0, w, g, bg, horizon, m0, e0, times, observed, s_inf)
        tr = res.track
        smooth = np.ones(len(times), dtype=bool)
        if run is not None and run.detection_time is not None:
            smooth = times <= run.detection_time
        viol_smooth = tr.violation & smooth
        entry = {"trivial_time": res.trivial_time, "violation_time": tr.violation_time,
                 "violations_pre_detection": int(viol_smooth.sum()),
                 "kappa_sq": res.problem.kappa_sq, "P_coeffs": list(res.problem.P_coeffs),
                 "G0": res.G0, "G_prime0": res.G_prime0}
        if Q is not None:
            tol = 1e-9 * max(1.0, float(np.max(np.abs(Q))))
            entry["Q_observed_max_abs"] = float(np.max(np.abs(Q)))
            entry["Q_ordering_pre_detection"] = bool(
                np.all(res.Q_minus[smooth] <= Q[smooth] + tol) and np.all(Q[smooth] <= res.Q_plus[smooth] + tol))
        report["theorem4"] = entry
        out.csv("bounds.csv", ["t", "lower", "upper", "observed_sup", "observed_inf", "violation"], tr.rows())
        if viol_smooth.any() and code != EXIT_BLOWUP:
            code = EXIT_VIOLATION
    return code, report


def cmd_analyze(cfg: dict, out: Outputs) -> int:
    code, report = _analyze_case1(cfg, out) if cfg["case"] == "I" else _analyze_case2(cfg, out)
    status = {EXIT_OK: "smooth-consistent", EXIT_BLOWUP: "blowup certified",
              EXIT_VIOLATION: "bound violation"}[code]
    out.json("report.json", {"version": __version__, "config": cfg, "command": "analyze",
                             "status": status, "exit_code": code, "results": report})
    print(status)
    return code


def figure_data(cfg: dict, points: int = 400, samples: int = 200):
    """Rows for the phase-portrait and dynamics figures of a Case I exact scenario."""
    g, w = _gas(cfg), _weight(cfg)
    field0, ev, m, E, ex = case1_data(cfg)
    if ev is None:
        raise ConfigError("figures need exact-solution data")
    p, cb = case1_problem(field0, w, g, m, E, _entropy(cfg, field0, g, w))
    z_max = 1.2 * max(p.G_plus, p.z0)
    real = phase_portrait(p, z_max, cb.C, points)
    # hypothetical data: same constants with G'(0) raised until f has no root
    f_min = float(p.f(p.G_plusplus))
    bump = max(-f_min, 0.0) + 0.25 * abs(f_min) + 1e-12
    hyp_p = type(p)(p.B, p.A1, p.A2, p.E, p.gamma, p.z0, math.sqrt(p.z0_prime**2 + bump),
                    k=p.k, n=p.n, mass=p.mass)
    hyp = phase_portrait(hyp_p, z_max, cb.C, points)
    zp = p.z_plus
    q3 = math.sqrt(max(float(p.f(p.z0)), 0.0))
    q4 = math.sqrt(float(hyp_p.f(zp)))
    fig1 = []
    for cid, curve in ((1, real.curves["phase"]), (2, hyp.curves["phase"])):
        fig1 += [(cid, z, q) for z, q in zip(*curve)]
    fig1 += [(3, zp, q) for q in np.linspace(-q3, q3, 21)]
    fig1 += [(4, zp, q) for q in np.linspace(-q4, q4, 21)]

    T = blowup_time_quadrature(p, root_structure(p)).T
    t_end = min(T, float(cfg["horizon"])) if math.isfinite(T) else float(cfg["horizon"])
    times = np.linspace(0.0, t_end, samples)
    traj = integrate_comparison(p, t_end)
    G = np.array([moment_G(ev.at_time(t), w) for t in times])
    Gp = np.array([moment_G_prime(ev.at_time(t), w) for t in times])
    z, zq = (np.asarray(a, dtype=float) for a in traj(times))
    z, zq = z.copy(), zq.copy()
    z[0], zq[0] = p.z0, p.z0_prime
    env_curve = real.curves["envelope"]
    fig2 = [(1, a, b) for a, b in zip(G, Gp)]
    fig2 += [(2, a, b) for a, b in zip(z, zq)]
    fig2 += [(3, a, b) for a, b in zip(*env_curve)]
    meta = {"T": T, "t_end": t_end, "z_plus": zp, "G_plus": p.G_plus, "G_plusplus": p.G_plusplus,
            "envelope_margin": float(np.min(envelope(G, cb.C, E, cb.A1, g.gamma, w.k, g.n) - Gp**2)),
            "ordering_margin": float(np.min(G - z)), "times": times}
    return fig1, fig2, meta


def cmd_figures(cfg: dict, out: Outputs) -> int:
    fig1, fig2, meta = figure_data(cfg)
    out.csv("fig1_phase.csv", ["curve_id", "z", "q"], fig1)
    out.csv("fig2_dynamics.csv", ["curve_id", "G", "G_prime"], fig2)
    meta = {k: v for k, v in meta.items() if k != "times"}
    out.json("figures.json", {"version": __version__, "config": cfg, "command": "figures", "summary": meta})
    return EXIT_OK


# ----------------------------------------------------------------- phantom


def _gauss_nodes(a: float, b: float, count: int):
    x, wts = np.polynomial.legendre.leggauss(count)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * wts


def random_case1_moments(rng: np.random.Generator, size: int, w: WeightFunction, g: GasParameters,
                         nodes: int = 96):
    """Moments of the family ``rho = A s^-2``, ``p = P s^-beta``,
    ``V = a x s^-mu`` with ``s = 1 + (|x|/L)^2``, by fixed Gauss rules."""
    A = rng.uniform(0.1, 10.0, size)
    L = rng.uniform(0.1, 10.0, size)
    P = rng.uniform(0.1, 10.0, size)
    beta = rng.uniform(1.0, 3.0, size)
    mu = rng.uniform(0.0, 1.0, size)
    a = rng.uniform(-10.0, 10.0, size)
    params = np.stack([A, L, P, beta, mu, a], axis=1)
    n = g.n
    area = n * g.omega_n
    col = lambda v: v[:, None]

    def fields(r):
        s = 1.0 + (r / col(L)) ** 2
        rho = col(A) * s**-2.0
        vr = col(a) * r * s ** -col(mu)
        p = col(P) * s ** -col(beta)
        return rho, vr, p

    # weighted moments on [0, R], split at the join of the weight
    r1 = w.inner_radius
    ra, wa = _gauss_nodes(0.0, r1, nodes)
    rb, wb = _gauss_nodes(r1, w.R, nodes)
    r = np.concatenate([ra, rb])
    wt = np.concatenate([wa, wb]) * area * r ** (n - 1)
    rho, vr, _ = fields(r[None, :])
    G0 = (rho * w.value(r)) @ wt
    Gp0 = (w.derivative_over_r(r) * vr * r * rho) @ wt
    # whole-space mass and energy via r = L u / (1 - u)
    u, wu = _gauss_nodes(0.0, 1.0, 4 * nodes)
    rr = col(L) * u / (1.0 - u)
    jac = col(L) / (1.0 - u) ** 2 * wu * area * rr ** (n - 1)
    rho, vr, p = fields(rr)
    m = np.sum(rho * jac, axis=1)
    E = np.sum((0.5 * rho * vr * vr + p / (g.gamma - 1.0)) * jac, axis=1)
    # entropy infimum of ln(p / rho^gamma) = ln(P/A^gamma) + (2 gamma - beta) ln s
    expo = 2.0 * g.gamma - beta
    s_inf = np.log(P / A**g.gamma)
    admissible = expo >= 0
    return params, G0, Gp0, m, E, s_inf, admissible


def cmd_phantom(cfg: dict, out: Outputs, seed: int | None) -> int:
    g, w = _gas(cfg), _weight(cfg)
    ph = cfg["phantom"]
    budget = int(ph["budget"])
    if seed is None:
        seed = cfg.get("seed")
    if budget > 0 and seed is None:
        raise ConfigError("a seed is required for the randomized search")
    header = ["source", "index", "p1", "p2", "p3", "p4", "p5", "p6", "G0", "G_prime0", "z_plus",
              "f_at_z_plus", "satisfied"]
    rows = []
    hits = 0
    counts = {"exact": 0, "random": 0}
    if budget > 0:
        if g.n == 1 and g.gamma == 3:
            for i, a0 in enumerate(np.linspace(-10.0, 10.0, int(ph["a0_points"]))):
                ex = ExactSolution(float(a0))
                prof = ex.profile(0.0)
                p, _ = case1_problem(prof, w, g, ex.mass, ex.energy, 0.0)
                res = phantom_from_problem(p)
                hits += res.ie2_satisfied
                counts["exact"] += 1
                rows.append(("exact", i, a0, "", "", "", "", "", res.G0, res.G_prime_0, res.z_plus,
                             res.f_at_z_plus, res.ie2_satisfied))
        rng = np.random.default_rng(seed)
        params, G0, Gp0, m, E, s_inf, ok = random_case1_moments(rng, budget, w, g)
        A1 = (w.k - g.n) * np.exp(s_inf) * w.power_integral(g.n, g.gamma / (g.gamma - 1.0)) ** (1.0 - g.gamma)
        sat, f_zp, zp = phantom_witness(G0, Gp0, m, E, A1, w, g)
        sat &= ok
        for i in range(budget):
            if not ok[i]:
                continue
            counts["random"] += 1
            hits += bool(sat[i])
            rows.append(("random", i, *params[i], G0[i], Gp0[i], zp[i], f_zp[i], bool(sat[i])))
    if hits:
        log.warning("PHANTOM CONDITION SATISFIED by %d data sets; see phantom_log.csv", hits)
    out.csv("phantom_log.csv", header, rows)
    out.json("phantom.json", {"version": __version__, "config": cfg, "command": "phantom", "seed": seed,
                              "evaluated": counts, "hits": int(hits)})
    print(f"evaluated {counts['exact']} exact and {counts['random']} random data sets; hits: {hits}")
    return EXIT_OK


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="euler-blowup",
                                 description="Moment bounds and blowup certificates for Euler flows.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=["constants", "analyze", "figures", "phantom"])
    ap.add_argument("--config", required=True, help="JSON scenario file")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="seed for randomized searches")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        out = Outputs(cfg, args.out)
        if args.command == "constants":
            return cmd_constants(cfg, out)
        if args.command == "analyze":
            return cmd_analyze(cfg, out)
        if args.command == "figures":
            return cmd_figures(cfg, out)
        return cmd_phantom(cfg, out, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # physically inadmissible data surfaces as ValueError from the library
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
