import json

import pytest
from click.testing import CliRunner

from maxlab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_build_space_writes_file(runner, tmp_path):
    out = tmp_path / "space.json"
    result = runner.invoke(
        main,
        ["build-space", "--desc", '{"kind":"basic_s","params":{"tau":2,"d":"3/2","m":"2/1"}}', "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert data["weight"] == ["1/1", "2/1", "2/1"]


def test_build_space_bad_descriptor(runner):
    result = runner.invoke(main, ["build-space", "--desc", '{"kind":"nope","params":{}}'])
    assert result.exit_code != 0
    assert "nope" in result.output


def test_eval_and_estimate(runner, tmp_path):
    space_path = tmp_path / "s.json"
    runner.invoke(
        main,
        ["build-space", "--desc", '{"kind":"basic_s","params":{"tau":2,"d":"3/2","m":"2/1"}}', "--out", str(space_path)],
    )
    result = runner.invoke(
        main,
        ["eval", "--space", str(space_path), "--op", "c", "--k", "1/1", "--f", '["1/1","0/1","0/1"]'],
    )
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["values"] == ["1/1", "1/3", "1/3"]

    result = runner.invoke(
        main,
        [
            "estimate",
            "--space", str(space_path),
            "--k", "1/1",
            "--p", "1/1",
            "--kind", "weak",
            "--op", "c",
            "--restarts", "2",
            "--iters", "1",
            "--seed", "0",
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["estimate"]["lower_bound"] >= 5 / 3 - 1e-9


def test_eval_reads_function_from_file(runner, tmp_path):
    space_path = tmp_path / "s.json"
    runner.invoke(
        main,
        ["build-space", "--desc", '{"kind":"basic_t","params":{"tau":1,"d":"2/1","m":"3/1"}}', "--out", str(space_path)],
    )
    f_path = tmp_path / "f.json"
    f_path.write_text('["1/1","0/1","0/1"]')
    result = runner.invoke(
        main, ["eval", "--space", str(space_path), "--op", "nc", "--k", "1/1", "--f", f"@{f_path}"]
    )
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["values"] == ["1/1", "1/2", "1/5"]


def test_reproduce_writes_report(runner, tmp_path):
    result = runner.invoke(
        main,
        ["reproduce", "lemma2", "--params", '{"n_max": 3, "trials": 4, "seed": 2}', "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "lemma2.json").read_text())
    assert report["ok"]


def test_reproduce_unknown_experiment(runner):
    result = runner.invoke(main, ["reproduce", "not-an-experiment"])
    assert result.exit_code != 0


def test_sweep_csv(runner, tmp_path):
    spec = {
        "spaces": [{"kind": "basic_s", "params": {"tau": 1, "d": "3/2", "m": "2/1"}}],
        "k_grid": ["1/1"],
        "p_grid": ["1/1", "inf"],
        "kinds": ["weak"],
        "op_kinds": ["centered"],
        "budget": {"restarts": 1, "iters": 1},
        "seed": 0,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "rows.csv"
    result = runner.invoke(main, ["sweep", "--spec", f"@{spec_path}", "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "space_id,k,p,op_kind,kind,lower_bound,analytic_upper,witness_id,runtime_ms"
    assert len(lines) == 3
