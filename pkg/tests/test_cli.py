import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from levyme import cli, validate
from tests.test_models import GOLDEN_PHI_ORACLE


def schema(name):
    return json.loads((resources.files("levyme") / "schemas" / name).read_text())


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_phi_json(capsys):
    code, out, _ = run(["phi", "--builtin", "paper-sec7"], capsys)
    assert code == 0
    doc = json.loads(out)
    np.testing.assert_allclose(doc["matrix"], GOLDEN_PHI_ORACLE, atol=1e-10)
    assert doc["horizon_is_ph"] is False
    assert doc["residual"] < 1e-7


def test_phi_csv(tmp_path, capsys):
    out = tmp_path / "phi.csv"
    assert cli.main(["phi", "--model", "bm:1,0.5", "--horizon", "erlang:2,3", "--format", "csv",
                     "--out", str(out)]) == 0
    header, data = cli.read_csv(out.read_text())
    assert header == ["c1", "c2"]
    assert data.shape == (2, 2)


def test_curve_rows_roundtrip_and_schema(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = cli.main(["curve", "--builtin", "paper-sec7", "--op", "p-up", "--grid", "0:2:0.1", "--out", str(out)])
    assert code == 0
    raw = out.read_bytes()
    assert b"\r\n" not in raw
    header, data = cli.read_csv(raw.decode())
    assert header == ["argument", "value"]
    assert data.shape == (21, 2)
    assert np.all(np.diff(data[:, 1]) <= 0)
    s = schema("curve.schema.json")
    for row in data:
        jsonschema.validate(dict(zip(header, map(float, row))), s)


def test_curve_with_mc_columns(capsys):
    code, out, _ = run(["curve", "--model", "bm:1,0.3", "--horizon", "exp:2", "--op", "p-up",
                        "--grid", "0.2,0.6", "--mc", "--paths", "2000", "--seed", "3"], capsys)
    assert code == 0
    header, data = cli.read_csv(out)
    assert header == ["argument", "value", "mc_estimate", "mc_se"]
    assert np.all(np.abs(data[:, 1] - data[:, 2]) <= 4 * data[:, 3])


def test_seeded_curve_is_reproducible(capsys):
    args = ["curve", "--builtin", "paper-sec7", "--op", "p-up", "--grid", "0.5", "--mc", "--paths", "500"]
    _, a, _ = run(args + ["--seed", "7"], capsys)
    _, b, _ = run(args + ["--seed", "7"], capsys)
    _, c, _ = run(args + ["--seed", "8"], capsys)
    assert a == b
    assert a != c


def test_env_seed(monkeypatch, capsys):
    args = ["curve", "--builtin", "paper-sec7", "--op", "p-up", "--grid", "0.5", "--mc", "--paths", "300"]
    monkeypatch.setenv("LEVYME_SEED", "21")
    _, env, _ = run(args, capsys)
    monkeypatch.delenv("LEVYME_SEED")
    _, flag, _ = run(args + ["--seed", "21"], capsys)
    assert env == flag


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "stable:1.5", "horizon": "paper-sec7", "operation": "p-up",
                               "grid": [0.1, 0.5, 1.0]}))
    code, out, _ = run(["curve", "--config", str(cfg)], capsys)
    assert code == 0
    _, data = cli.read_csv(out)
    np.testing.assert_allclose(data[:, 1], [0.8635492611140195, 0.5038106259496422, 0.30325307781453364],
                               rtol=1e-10)


def test_bad_config_reports_position(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"model": "stable:1.5",\n "grid": [0.1,}\n')
    code, _, err = run(["curve", "--config", str(cfg)], capsys)
    assert code == 2
    assert "bad.json:2:" in err


def test_unknown_operation_exit_code(capsys):
    code, _, err = run(["curve", "--op", "nope"], capsys)
    assert code == 2
    assert "p-up" in err


def test_corrupted_horizon_exit_code(tmp_path, capsys):
    bad = tmp_path / "terms.csv"
    bad.write_text("re_c,im_c,re_lambda,im_lambda\n1,0,-1,0\n")
    code, _, err = run(["phi", "--horizon", f"terms:{bad}"], capsys)
    assert code == 2
    assert err.startswith("levyme: error:")


def test_missing_parameter(capsys):
    code, _, err = run(["curve", "--op", "scale-w-scalar", "--grid", "0.5"], capsys)
    assert code == 2
    assert "q_re" in err


def test_help_lists_every_operation(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for name in cli.REGISTRY:
        assert name in out


def test_registry_evaluates_everywhere():
    from levyme.models import Stable
    from levyme.scale import ScaleEval
    ev = ScaleEval(Stable(1.5), cli.parse_horizon("erlang:2,3"))
    params = {"y": 0.5, "a": 1.5, "b": 1.0, "theta": 0.0, "u": 0.3, "v": 0.4, "x": 0.2,
              "q": 1.0, "q_re": 1.0, "x0": 0.0, "x1": 0.5, "y0": 0.0, "y1": 0.5, "beta": 0.0}
    for name, op in cli.REGISTRY.items():
        val = np.asarray(op.value(ev, 0.3, params))
        assert np.all(np.isfinite(val)), name


def test_validate_report_schema(tmp_path, capsys):
    rep = tmp_path / "report.json"
    code = cli.main(["validate", "--only", "golden,spectrum", "--paths", "2000", "--report", str(rep), "--quiet"])
    doc = json.loads(rep.read_text())
    jsonschema.validate(doc, schema("validation_report.schema.json"))
    assert code == 0 and doc["passed"]
    assert doc["seed"] == validate.DEFAULT_SEED
    assert {c["check"] for c in doc["checks"]} >= {"Phi residual"}


def test_validate_rejects_unknown_check(capsys):
    code, _, _ = run(["validate", "--only", "bogus", "--skip-acceptance", "--paths", "100"], capsys)
    assert code == 0
    code, _, _ = run(["validate", "--only", "bogus", "--paths", "100"], capsys)
    assert code == 2


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "levyme.cli", "phi", "--model", "bm:1,0", "--horizon", "exp:1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["matrix"][0][0] == pytest.approx(np.sqrt(2.0))


def test_parsers():
    np.testing.assert_allclose(cli.parse_grid("0:0.3:0.1"), [0.0, 0.1, 0.2, 0.3])
    assert cli.parse_params(["a=1", "b=2.5"]) == {"a": 1.0, "b": 2.5}
    with pytest.raises(Exception):
        cli.parse_model("weird:1")
