import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from icregion import cli
from icregion.det_capacity import outer_bound
from icregion.region import equals, from_json

from conftest import REF_CHANNEL

GOLDEN = Path(__file__).parent / "golden"
REF_JSON = json.dumps(REF_CHANNEL.to_json())


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), buf)
    return code, buf.getvalue()


CASES = {
    "det_region_ref.json": ["det-region", REF_JSON],
    "det_region_k0.json": ["det-region", '{"k": 0, "n_direct": [4], "n_cross": []}'],
    "gdof_example.json": ["gdof", "--alpha", "2,1,1", "--beta", "2,2"],
    "o2m_dof.json": ["o2m-dof", "--n", "2,2,2", "--beta", "1,1"],
    "gauss_gap_k2_seed3.json": ["gauss-gap", "--k", "2", "--seed", "3"],
    "example_n2.csv": ["example", "--n", "2", "--symbols", "2000"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = run(*CASES[name])
    assert code == 0
    path = GOLDEN / name
    if os.environ.get("UPDATE_GOLDEN"):
        path.parent.mkdir(exist_ok=True)
        path.write_text(text)
    assert text == path.read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_repeat_is_byte_identical(name):
    assert run(*CASES[name]) == run(*CASES[name])


def test_det_region_verdict_and_round_trip():
    code, text = run("det-region", REF_JSON)
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == "inner==outer: true"
    assert equals(from_json(doc["outer"]), outer_bound(REF_CHANNEL))
    assert equals(from_json(doc["inner"]), from_json(doc["outer"]))


def test_det_region_one_to_many():
    doc = json.loads(run("det-region", json.dumps(REF_CHANNEL.reversed().to_json()))[1])
    assert doc["equal"]


def test_reciprocity_and_simulate():
    code, text = run("det-reciprocity", REF_JSON)
    assert code == 0 and json.loads(text)["reciprocal"]
    code, text = run("det-simulate", REF_JSON, "--symbols", "200")
    doc = json.loads(text)
    assert code == 0 and doc["ok"] and len(doc["corners"]) == 21


def test_det_grid_small():
    code, text = run("det-grid", "--k", "1", "--max-gain", "2")
    assert code == 0 and json.loads(text) == {"channels": 27, "failures": 0, "k": 1, "max_gain": 2}
    code, text = run("det-grid", "--k", "1", "--max-gain", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 8 and all(r["inner_equals_outer"] == "True" for r in rows)


def test_gauss_region_file_and_db(tmp_path):
    f = tmp_path / "ch.json"
    f.write_text(json.dumps({"snr": [40, 20, 20], "inr": [40, 40]}))
    code, text = run("gauss-region", str(f), "--db")
    doc = json.loads(text)
    assert code == 0 and doc["topology"] == "m2o"
    assert doc["params"]["snr"][0] == pytest.approx(1e4)
    code, text = run("gauss-region", str(f), "--db", "--topology", "o2m")
    assert code == 0 and json.loads(text)["topology"] == "o2m"


def test_gauss_gap_o2m_and_failure_exit():
    code, text = run("gauss-gap", "--k", "1", "--topology", "o2m")
    assert code == 0 and json.loads(text)["certificate"] == "pass"
    # the simplified scheme misses the offset on this channel
    ch = json.dumps({"snr": [116555.05379404008, 35296.07532965169], "inr": [333.75630981492776],
                     "orientation": "one_to_many"})
    code, text = run("gauss-gap", ch, "--scheme", "simplified")
    assert code == 1 and json.loads(text)["certificate"] == "fail"


def test_example_json_format():
    code, text = run("example", "--n", "1", "--symbols", "100", "--format", "json")
    assert code == 0 and json.loads(text)["rows"][0]["beta"] == 4


@pytest.mark.parametrize("argv", [
    ["det-region", "{not json"],
    ["det-region", "/nonexistent/file.json"],
    ["det-region", '{"k": 1, "n_direct": [1], "n_cross": [1]}'],
    ["det-region", REF_JSON, "--max-k", "2"],
    ["gauss-gap"],
    ["gauss-region", '{"snr": [1, 2]}'],
    ["gdof", "--alpha", "1,x", "--beta", "1"],
    ["example", "--n", "3", "--symbols", "0"],
    ["no-such-command"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run(*argv)[0] == 2


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "icregion.cli", "gdof", "--alpha", "1,1", "--beta", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["equals_scaled_deterministic"] is True
