import csv
import json
from pathlib import Path

import pytest

from euler_blowup.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_IO, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


EXACT = {"case": "I", "gas": {"n": 1, "gamma": 3}, "weight": {"R": 1, "k": 2},
         "data": {"exact": {"a0": -7}}, "entropy_inf": 0, "horizon": 2,
         "phantom": {"budget": 50, "a0_points": 5}}


def test_constants(tmp_path, capsys):
    assert main(["constants", "--config", write_cfg(tmp_path, EXACT), "--out", str(tmp_path / "o")]) == EXIT_OK
    data = json.loads((tmp_path / "o" / "constants.json").read_text())
    assert data["constants"]["K"] == pytest.approx(1.0)
    assert data["constants"]["A2"] == pytest.approx(4.0)


def test_analyze_exact_smooth(tmp_path):
    out = tmp_path / "o"
    cfg = dict(EXACT, theorem1={"t_max": 1e4})
    assert main(["analyze", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "smooth-consistent"
    with open(out / "bounds.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header[0] == "t"


def test_analyze_cii1_blowup(tmp_path):
    out = tmp_path / "o"
    code = main(["analyze", "--config", str(CONFIGS / "cii1.json"), "--out", str(out)])
    assert code == EXIT_BLOWUP
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "blowup certified"


@pytest.mark.parametrize("patch", [
    {"gas": {"n": 1, "gamma": 1.0}},
    {"weight": {"R": 1, "k": 1}},
    {"bogus": 1},
    {"case": "II"},
])
def test_config_errors(tmp_path, patch):
    cfg = dict(EXACT, **patch)
    assert main(["analyze", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["constants", "--config", str(path)]) == EXIT_CONFIG


def test_missing_config_is_io_error(tmp_path):
    assert main(["constants", "--config", str(tmp_path / "missing.json")]) == EXIT_IO


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["constants", "--config", write_cfg(tmp_path, EXACT), "--out", str(blocker / "sub")])
    assert code == EXIT_IO


def test_phantom_requires_seed(tmp_path):
    assert main(["phantom", "--config", write_cfg(tmp_path, EXACT), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_phantom_zero_budget_header_only(tmp_path):
    cfg = dict(EXACT, phantom={"budget": 0, "a0_points": 5})
    out = tmp_path / "o"
    assert main(["phantom", "--config", write_cfg(tmp_path, cfg), "--out", str(out)]) == EXIT_OK
    lines = (out / "phantom_log.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("source,index")


def test_phantom_deterministic(tmp_path):
    path = write_cfg(tmp_path, EXACT)
    for name in ("a", "b"):
        assert main(["phantom", "--config", path, "--out", str(tmp_path / name), "--seed", "7"]) == EXIT_OK
    a = (tmp_path / "a" / "phantom_log.csv").read_bytes()
    assert a == (tmp_path / "b" / "phantom_log.csv").read_bytes()
    summary = json.loads((tmp_path / "a" / "phantom.json").read_text())
    assert summary["hits"] == 0
    assert summary["evaluated"]["exact"] == 5


def test_figures(tmp_path):
    out = tmp_path / "o"
    assert main(["figures", "--config", write_cfg(tmp_path, EXACT), "--out", str(out)]) == EXIT_OK
    for name in ("fig1_phase.csv", "fig2_dynamics.csv", "figures.json"):
        assert (out / name).exists()
    meta = json.loads((out / "figures.json").read_text())
    assert meta["summary"]["envelope_margin"] >= 0
    assert meta["summary"]["ordering_margin"] >= -1e-9


def test_bad_seed(tmp_path):
    assert main(["phantom", "--config", write_cfg(tmp_path, EXACT), "--seed", "-1"]) == EXIT_CONFIG
