import csv
import io
import json

import jsonschema
import pytest

from symsystole import cli
from symsystole.config import load_schema, spec_hash
from symsystole.verify import ConvexSample

BALL = '{"kind": "ball", "n": 2}'
E12 = '{"kind": "ellipsoid", "a": [1, 2]}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_info_report(capsys):
    code, out, _ = run(capsys, "info", "--config", BALL)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("report"))
    assert doc["rng_seed"] == 0
    assert doc["domain_spec_sha256"] == spec_hash(json.loads(BALL))
    assert doc["result"]["convexity"]["passed"]
    assert doc["result"]["ball_sandwich"]["r_out"] == pytest.approx(1.0, abs=1e-9)


def test_config_from_file(tmp_path, capsys):
    path = tmp_path / "e.json"
    path.write_text(E12)
    code, out, _ = run(capsys, "info", "--config", str(path), "--seed", "7")
    assert code == 0
    assert json.loads(out)["rng_seed"] == 7


@pytest.mark.parametrize(
    "argv",
    [
        ["info"],
        ["info", "--config", "{not json"],
        ["info", "--config", "/nonexistent/domain.json"],
        ["info", "--config", '{"kind": "torus"}'],
        ["info", "--config", '{"kind": "ellipsoid", "a": [1, -2]}'],
        ["ratio", "--config", BALL, "--tol", "-1"],
        ["flow", "--config", BALL, "--time", "1", "--z0", "1", "0"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_flow_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "flow", "--config", E12, "--z0", "1", "0", "0", "0", "--time", "1", "--samples", "5")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "x1", "y1", "x2", "y2", "H_drift"]
    assert len(rows) == 6
    first, last = [float(v) for v in rows[1][1:5]], [float(v) for v in rows[-1][1:5]]
    assert max(abs(a - b) for a, b in zip(first, last)) < 1e-8


def test_flow_writes_report_and_csv(tmp_path, capsys):
    code, _, _ = run(capsys, "flow", "--config", BALL, "--time", "3.14159", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["result"]["csv"] == "trajectory.csv"
    assert (tmp_path / "trajectory.csv").read_text().startswith("t,x1,y1,x2,y2,H_drift")


def test_ratio_on_ellipsoid(tmp_path, capsys):
    code, _, _ = run(capsys, "ratio", "--config", E12, "--ceiling", "2.5", "--seeds", "16", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    res = doc["result"]
    assert res["systole_estimate"] == pytest.approx(1.0, abs=1e-9)
    assert res["symmetric_systole_estimate"] == pytest.approx(1.0, abs=1e-9)
    assert res["ratio"] == pytest.approx(1.0, abs=1e-9)
    assert set(doc["tolerances"]) >= {"integration", "residual", "ceiling"}
    assert (tmp_path / "certificate_systole.csv").exists()


def test_output_is_bit_identical(capsys):
    argv = ["systole", "--config", BALL, "--seeds", "6", "--seed", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_shoot_table(capsys):
    code, out, _ = run(capsys, "shoot", "--config", BALL, "--seeds", "2", "--ceiling", "4")
    assert code == 0
    chords = json.loads(out)["result"]["chords"]
    assert chords
    assert chords[0]["duration"] == pytest.approx(1.5707963267948966, abs=1e-9)
    assert chords[0]["closed_period"] == pytest.approx(3.141592653589793, abs=1e-9)


def test_no_orbit_below_ceiling_is_numerical_failure(capsys):
    code, _, _ = run(capsys, "systole", "--config", BALL, "--ceiling", "0.5", "--seeds", "4")
    assert code == 2
    code, out, _ = run(capsys, "ratio", "--config", BALL, "--ceiling", "0.5", "--seeds", "4")
    assert code == 2
    assert json.loads(out)["result"]["ratio"] == "inf"


def test_scan_table(capsys):
    code, out, _ = run(capsys, "scan", "--config", BALL, "--param", "scale", "--values", "1", "2", "--seeds", "4")
    assert code == 0
    rows = json.loads(out)["result"]["rows"]
    assert [r["systole"] for r in rows] == pytest.approx([3.141592653589793, 6.283185307179586], abs=1e-8)
    assert [r["ratio"] for r in rows] == pytest.approx([1.0, 1.0], abs=1e-9)


def test_verify_convex_violation_exit_code(monkeypatch, capsys):
    bad = ConvexSample(
        index=0, spec={"kind": "custom", "n": 2, "terms": []}, systole=1.0, symmetric_systole=2.5, ratio=2.5,
        ball_bounds=(0.8, 3.2), ratio_ok=False, sandwich_ok=True, convex=True,
    )
    monkeypatch.setattr(cli, "verify_convex", lambda *a, **k: ([bad], {"bins": [], "counts": []}))
    code, _, err = run(capsys, "verify-convex", "--samples", "1")
    assert code == 3
    assert '"kind":"custom"' in err
