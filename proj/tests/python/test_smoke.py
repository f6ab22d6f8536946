import json
import math
import os
import pathlib
import subprocess
import sys

import jsonschema
import pytest

import krflow

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMA = json.loads(pathlib.Path(os.environ.get("KRFLOW_SCHEMA", ROOT / "schema/experiment_config.schema.json")).read_text())
CLI = os.environ.get("KRFLOW_CLI", str(ROOT / "build/krflow"))

sys.path.insert(0, str(ROOT / "tests/oracles"))


def grid(lo, hi, n):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def test_presets_listed():
    names = [p["name"] for p in krflow.presets()]
    assert len(names) == 9
    assert "flat-cone" in names and "fik-selfsimilar" in names


def test_soliton_coefficients_match_sympy_oracle():
    series_oracle = pytest.importorskip("series_oracle")
    for n, lam in [(2, 3), (3, 5)]:
        expected = [str(c) for c in series_oracle.coefficients(n, lam, 3)]
        assert krflow.soliton_coefficients(str(n), str(lam), 3) == expected


def test_flat_cone_has_no_curvature():
    base = krflow.BaseGeometry(n=2, lambda_=2.0)
    prof = krflow.make_model("Conical", base, grid(0.0, 6.0, 257), k_log=0.0)
    assert krflow.closedness_defect(prof, 1) < 1e-5
    assert max(abs(x) for x in krflow.curvature_norm(prof, base)[2:-2]) < 1e-6
    assert max(abs(x) for x in krflow.scalar_curvature(prof, base)[2:-2]) < 1e-6


def test_cylinder_evolves_linearly():
    base = krflow.BaseGeometry(n=2, lambda_=1.0, mu=0)
    init = krflow.make_model("Cylindrical", base, grid(0.0, 6.0, 129), c=1.0, offset=1.5)
    times, profiles = krflow.evolve(init, base, 1.0, output_times=[0.5])
    assert times == [0.0, 0.5, 1.0]
    last = profiles[-1]
    assert max(abs(p - 0.5) for p in last.phi) < 1e-8
    assert max(abs(s - 2.0) for s in last.psi) < 1e-8


def test_errors_carry_their_kind():
    with pytest.raises(krflow.KrflowError) as info:
        krflow.resolve_config(preset="flat-cone", flags={"flow.scheme": "Euler"})
    assert info.value.kind == "ConfigInvalid"
    assert "config.flow.scheme" in str(info.value)


@pytest.mark.parametrize("preset", [p["name"] for p in krflow.presets()])
def test_resolved_configs_validate(preset):
    jsonschema.validate(json.loads(krflow.resolve_config(preset=preset)), SCHEMA)


def test_run_in_process(tmp_path):
    out = tmp_path / "fc"
    r = krflow.run(preset="flat-cone", flags={"output_dir": str(out)}, write=True)
    assert r["all_pass"]
    assert {v["name"] for v in r["verdicts"]} == {"curvature_zero", "stationary"}
    assert (out / "summary.json").exists()


def test_cli_run_writes_valid_report(tmp_path):
    out = tmp_path / "cyl"
    proc = subprocess.run([CLI, "run", "--preset", "cylinder-split", "--output_dir", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "[PASS]" in proc.stdout and "[FAIL]" not in proc.stdout
    jsonschema.validate(json.loads((out / "config.resolved.json").read_text()), SCHEMA)
    summary = json.loads((out / "summary.json").read_text())
    assert all(v["pass"] for v in summary["verdicts"])
    meta = json.loads((out / "run_metadata.json").read_text())
    assert math.isfinite(meta["wall_seconds"])


def test_cli_rejects_bad_config(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"flow": {"scheme": "Euler"}}))
    proc = subprocess.run([CLI, "run", "--preset", "flat-cone", "--config", str(cfg)], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "config.flow.scheme" in proc.stderr
