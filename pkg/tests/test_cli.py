import json

import pytest
from click.testing import CliRunner

from pwfqsd.cli import main
from pwfqsd.states import state_to_json, strange_state


@pytest.fixture()
def runner():
    return CliRunner()


def test_algebra_d3(runner):
    result = runner.invoke(main, ["algebra", "--dims", "3"])
    assert result.exit_code == 0, result.output
    assert "6/6 checks passed" in result.output
    assert "spectrum d=3: +1 x2, -1 x1" in result.output


def test_algebra_d5_spectrum(runner):
    result = runner.invoke(main, ["algebra", "--dims", "5"])
    assert result.exit_code == 0
    assert "spectrum d=5: +1 x3, -1 x2" in result.output


def test_algebra_composite(runner):
    result = runner.invoke(main, ["algebra", "--dims", "3,3"])
    assert result.exit_code == 0, result.output
    assert "6/6 checks passed" in result.output


def test_algebra_json_format(runner):
    result = runner.invoke(main, ["algebra", "--dims", "3", "--format", "json"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["schema"] == 1
    assert doc["passed"] is True
    assert set(doc["residuals"]) == {
        "hermitian",
        "resolution_of_identity",
        "orthogonality",
        "unit_trace",
        "reconstruction",
        "transpose_closure",
    }


def test_algebra_rejects_bad_dims(runner):
    result = runner.invoke(main, ["algebra", "--dims", "4"])
    assert result.exit_code == 2


def test_unknown_flag_rejected(runner):
    result = runner.invoke(main, ["algebra", "--no-such-flag"])
    assert result.exit_code == 2


def test_wigner_named_strange(runner, tmp_path):
    out = tmp_path / "w.csv"
    result = runner.invoke(main, ["wigner", "--named", "strange", "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "a1_1,a2_1,value"
    assert len(lines) == 10
    assert lines[1].startswith("0,0,-0.333333333333")


def test_wigner_state_file(runner, tmp_path):
    doc = state_to_json(strange_state().density())
    path = tmp_path / "state.json"
    path.write_text(json.dumps(doc))
    result = runner.invoke(main, ["wigner", "--state", str(path)])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("a1_1,a2_1,value")


def test_wigner_requires_one_source(runner):
    result = runner.invoke(main, ["wigner"])
    assert result.exit_code == 2
    result = runner.invoke(main, ["wigner", "--named", "strange", "--state", "x.json"])
    assert result.exit_code == 2


def test_discriminate_strange(runner):
    result = runner.invoke(main, ["discriminate", "--pair", "strange"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["schema"] == 1
    assert abs(doc["primal"] - 0.25) < 1e-6
    assert abs(doc["dual"] - 0.25) < 1e-6
    assert doc["gap"] < 1e-6


def test_certify_origin_minus(runner):
    result = runner.invoke(
        main, ["certify", "--subspace", "origin-minus", "--d", "3", "--no-strong"]
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["verdict"] == "extendible" or doc["verdict"] == "unextendible"
    # the minus eigenspace at d=3 is the strange span: its complement
    # holds PWF states, so it is extendible
    assert doc["verdict"] == "extendible"


def test_certify_origin_plus_strong(runner):
    result = runner.invoke(main, ["certify", "--subspace", "origin-plus", "--d", "3"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["verdict"] == "unextendible"
    assert doc["strong"] is True
    assert doc["witness"]["dims"] == [3]


def test_certify_example_s1(runner):
    # the all-magic half's complement is the positive half, which hosts
    # positively represented states, so the magic half is extendible
    result = runner.invoke(main, ["certify", "--subspace", "example-s1", "--no-strong"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["verdict"] == "extendible"
    assert doc["margin"] > 1e-3
    assert doc["witness"] is not None


def test_certify_example_s0_strong(runner):
    result = runner.invoke(main, ["certify", "--subspace", "example-s0"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["verdict"] == "unextendible"
    assert abs(doc["margin"] + 0.2) < 1e-6
    assert doc["strong"] is True


def test_reproduce_data_hiding(runner):
    result = runner.invoke(
        main, ["reproduce", "--claim", "data-hiding", "--format", "json"]
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    quantities = {row["quantity"]: row for row in doc["rows"]}
    assert abs(quantities["ratio, 1 copy"]["computed"] - 2.0) < 1e-6
    assert abs(quantities["ratio, 2 copies"]["computed"] - 4 / 3) < 1e-6
    assert all(row["passed"] for row in doc["rows"])


def test_reproduce_stab_basis(runner):
    result = runner.invoke(main, ["reproduce", "--claim", "stab-basis"])
    assert result.exit_code == 0, result.output
    assert "FAIL" not in result.output


def test_reproduce_example_d5(runner):
    result = runner.invoke(
        main, ["reproduce", "--claim", "example-d5", "--format", "csv"]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().split("\n")
    assert lines[0] == "claim,quantity,expected,computed,delta,pass"
    assert all(line.endswith(",pass") for line in lines[1:])


def test_experiment_csv_deterministic(runner, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for out in (out1, out2):
        result = runner.invoke(
            main,
            ["experiment-robustness", "--pairs", "3", "--seed", "7", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().split("\n")
    assert lines[0] == "seed,sn,robustness,dh_ratio,status"
    assert len(lines) == 4
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[-1] == "ok"
        assert float(cells[2]) >= -1e-9
        assert float(cells[3]) >= 1 - 1e-9


def test_experiment_requires_seed(runner):
    result = runner.invoke(main, ["experiment-robustness", "--pairs", "2"])
    assert result.exit_code == 2
