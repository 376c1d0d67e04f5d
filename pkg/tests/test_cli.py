import io
import json
import subprocess
import sys

import numpy as np
import pytest

from abschmidt import cli
from abschmidt.errors import SchemaError
from abschmidt.sampling import random_density, rng_from
from abschmidt.states import isotropic_like, maximally_entangled


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, err = invoke(*argv)
    assert code == 0, err
    return json.loads(out)


def test_witness_example():
    rep = report("witness", "--preset", "isotropic:k=2,d=3", "--witness", "canonical:r=1", "--p", "0.5")
    assert rep["results"]["expectation"] == pytest.approx((2 - 2.5) / 3, abs=1e-12)
    assert rep["results"]["detected"] is True
    assert set(rep) == {"provenance", "inputs", "results"}
    assert rep["provenance"]["seed"] == 0
    assert "witness" in rep["provenance"]["tolerances"]


def test_sweep_example_csv():
    code, out, _ = invoke(
        "sweep", "--preset", "isotropic:k=1,d=3", "--unitary", "paper:U1", "--map", "k=1,r=1",
        "--p", "0:1:0.001", "--format", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,detH1,detH2,verdict"
    assert len(lines) == 1002
    rows = [line.split(",") for line in lines[1:]]
    assert [float(r[0]) for r in rows[:3]] == [0.0, 0.001, 0.002]
    rep = report("sweep", "--preset", "isotropic:k=1,d=3", "--unitary", "paper:U1", "--map", "k=1,r=1", "--p", "0:1:0.001")
    (h1,) = rep["results"]["sign_changes"]["detH1"]
    (h2,) = rep["results"]["sign_changes"]["detH2"]
    assert 0.43 <= h1 <= 0.45
    assert 0.30 <= h2 <= 0.32


def test_sweep_parallel_matches_serial():
    args = ("sweep", "--preset", "isotropic:k=1,d=3", "--unitary", "paper:U1", "--map", "k=1,r=1", "--p", "0:1:0.05")
    assert invoke(*args)[1] == invoke(*args, "--workers", "4")[1]


def test_channel_example():
    rep = report("channel", "--depolarizing", "0.7", "--r", "2", "--k", "0.5")
    assert rep["results"]["verdict"] == "NonMemberByTheorem5"
    rep = report("channel", "--depolarizing", "0.5", "--r", "2", "--k", "0.5", "--inputs", "uniform")
    assert rep["results"]["verdict"] == "MemberByTheorem5"


def test_channel_from_kraus_file(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"kraus": [{"re": np.eye(9).tolist()}], "label": "id"}))
    rep = report("channel", "--kraus", str(path), "--r", "2")
    assert rep["results"]["verdict"] == "NonMemberByTheorem5"
    path.write_text(json.dumps({"kraus": [{"re": (0.5 * np.eye(9)).tolist()}]}))
    code, _, err = invoke("channel", "--kraus", str(path))
    assert code == 2 and json.loads(err)["error"]["type"] == "InvalidKraus"


def test_measure_command():
    rep = report("measure", "--preset", "isotropic:k=1,d=3,p=0.5", "--unitary", "paper:rho1", "--r", "1", "--budget", "4")
    res = rep["results"]
    assert res["closed_form"]["value"] == pytest.approx(2 / 3, abs=1e-12)
    assert res["optimized"]["value"] == pytest.approx(2 / 3, abs=1e-4)
    assert res["restricted"]["value"] == pytest.approx(1 / 6, abs=1e-12)


def test_printed_unitary_is_a_validation_error():
    code, out, err = invoke("measure", "--preset", "isotropic:k=1,d=3,p=0.5", "--unitary", "paper:rho1-printed")
    assert code == 2 and out == ""
    assert json.loads(err)["error"]["type"] == "NotUnitary"


def test_moments_and_discriminate_commands():
    rep = report("moments", "--preset", "maximally_mixed:d=3")
    assert rep["results"]["purity_ball"] == "CertifiedMember"
    assert rep["results"]["p3_ppt"] is True
    rep = report("discriminate", "--preset", "isotropic:k=3,d=3,p=1", "--depolarizing", "0", "--budget", "8")
    (row,) = rep["results"]["tasks"]
    assert row["p_probe"] == pytest.approx(17 / 18, abs=1e-12)


def test_load_state_presets_and_raw(tmp_path):
    phi = cli.load_state("isotropic:k=3,d=3,p=1")
    assert np.allclose(phi.matrix, maximally_entangled(3, 3).density().matrix, atol=1e-15)
    assert np.allclose(cli.load_state("isotropic:k=1,d=3", p=0.3).matrix, isotropic_like(1, 3, 0.3).matrix)
    path = tmp_path / "mixed.json"
    path.write_text(json.dumps({"dims": [3, 3], "re": (np.eye(9) / 9).tolist()}))
    assert np.allclose(cli.load_state(str(path)).matrix, np.eye(9) / 9)
    path.write_text(json.dumps({"preset": "isotropic", "params": {"k": 2, "d": 3, "p": 0.5}}))
    assert np.allclose(cli.load_state(str(path)).matrix, isotropic_like(2, 3, 0.5).matrix)


def test_trace_violation_names_unit_trace(tmp_path):
    # trace 0.9
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [3, 3], "re": (0.1 * np.eye(9)).tolist()}))
    code, _, err = invoke("moments", "--state", str(path))
    assert code == 2
    assert "unit-trace" in json.loads(err)["error"]["message"]


def test_schema_errors():
    with pytest.raises(SchemaError):
        cli.state_from_json({"nothing": 1})
    with pytest.raises(SchemaError):
        cli.load_state("nosuchpreset:d=3")
    code, _, err = invoke("witness", "--preset", "isotropic:k=2,d=3,p=0.5", "--witness", "other")
    assert code == 2 and json.loads(err)["error"]["type"] == "SchemaError"


def test_dump_load_round_trip(tmp_path):
    rng = rng_from(12)
    for i in range(5):
        rho = random_density(3, 3, rng)
        path = tmp_path / f"s{i}.json"
        path.write_text(json.dumps(cli.dump_state(rho)))
        back = cli.load_state(str(path))
        assert np.array_equal(back.matrix, rho.matrix)


def test_reports_byte_identical(tmp_path):
    args = ("measure", "--preset", "isotropic:k=2,d=3,p=0.7", "--r", "2", "--budget", "3", "--seed", "4")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.run([*args, "--output", str(a)]) == 0
    assert cli.run([*args, "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_tolerance_override():
    rep = report("witness", "--preset", "maximally_mixed:d=3", "--tolerance", "witness=1e-3")
    assert rep["provenance"]["tolerances"]["witness"] == 1e-3
    code, _, err = invoke("witness", "--preset", "maximally_mixed:d=3", "--tolerance", "bogus=1")
    assert code == 2 and "bogus" in json.loads(err)["error"]["message"]


def test_verdicts_exit_zero():
    # a detection is data, not a failure
    code, _, _ = invoke("witness", "--preset", "isotropic:k=3,d=3,p=1")
    assert code == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "abschmidt", "witness", "--preset", "maximally_mixed:d=3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["expectation"] == pytest.approx(2 / 3)
