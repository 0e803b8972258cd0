import json

import pytest

from slfr.cli import main, parse_field
from slfr.field import GF


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_field():
    assert parse_field("7") == GF(7)
    assert parse_field("2^4") == GF(2, 4)
    assert parse_field("16") == GF(2, 4)
    assert parse_field("9") == GF(3, 2)
    with pytest.raises(ValueError):
        parse_field("12")


def test_graph_command_four_users(tmp_path, capsys):
    code, out, _ = run(
        ["graph", "--K", "4", "--N", "2", "--t", "1", "--q", "3", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    assert "components: 1" in out and "constrained: 3" in out
    dot = (tmp_path / "component_3_4.dot").read_text()
    assert "shape=box" in dot and "style=dashed" in dot
    status = json.loads((tmp_path / "coefficient_status.json").read_text())
    assert status["components"] == 1 and len(status["constrained"]) == 3


def test_graph_command_five_users(tmp_path, capsys):
    code, out, _ = run(
        ["graph", "--K", "5", "--N", "2", "--t", "1", "--q", "3", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    assert "components: 3" in out
    assert {p.name for p in tmp_path.glob("component_*.dot")} == {
        "component_3_4.dot", "component_3_5.dot", "component_4_5.dot",
    }


def test_graph_command_nothing_to_reconstruct(capsys):
    code, out, _ = run(["graph", "--K", "3", "--N", "2", "--t", "2", "--q", "2"], capsys)
    assert code == 0
    assert "nothing to reconstruct" in out


def test_graph_invalid_params_exit_2(capsys):
    code, _, err = run(["graph", "--K", "4", "--N", "2", "--t", "9", "--q", "3"], capsys)
    assert code == 2 and "error:" in err


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["graph", "--K", "4", "--N", "2", "--t", "1", "--q", "12"])
    assert exc.value.code == 2


def test_verify_exhaustive_pass(capsys):
    code, out, _ = run(
        ["verify", "--K", "4", "--N", "2", "--t", "1", "--q", "2",
         "--demands", "exhaustive", "--alpha", "wan"],
        capsys,
    )
    assert code == 0
    assert "256/256 trials passed" in out


def test_verify_random_free(capsys):
    code, out, _ = run(
        ["verify", "--K", "5", "--N", "2", "--t", "1", "--q", "7", "--alpha", "random-free",
         "--demands", "random", "--trials", "10", "--seed", "7"],
        capsys,
    )
    assert code == 0
    assert "10/10 trials passed" in out


def test_verify_bad_alpha_file_exit_1(tmp_path, capsys):
    from slfr.codec import coefficient_domain

    doc = {
        "field": {"p": 3, "m": 1},
        "K": 4,
        "t": 1,
        "alpha": {f"k={k}|T={','.join(map(str, t))}": 1 for k, t in coefficient_domain(4, 1)},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(
        ["verify", "--K", "4", "--N", "2", "--t", "1", "--q", "3",
         "--demands", "exhaustive", "--alpha", f"file:{path}", "--format", "json"],
        capsys,
    )
    assert code == 1
    assert "ReconstructionMismatch" in out


def test_verify_demand_file(tmp_path, capsys):
    path = tmp_path / "demand.json"
    path.write_text(json.dumps({"D": [[1, 0], [0, 1], [1, 1], [1, 2]]}))
    code, out, _ = run(
        ["verify", "--K", "4", "--N", "2", "--t", "1", "--q", "3",
         "--demands", f"file:{path}", "--alpha", "wan"],
        capsys,
    )
    assert code == 0 and "1/1 trials passed" in out


def test_verify_output_dir(tmp_path, capsys):
    code, out, _ = run(
        ["verify", "--K", "4", "--N", "2", "--t", "1", "--q", "2",
         "--demands", "exhaustive", "--alpha", "wan", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    lines = (tmp_path / "report.jsonl").read_text().splitlines()
    assert len(lines) == 257
    assert json.loads(lines[-1])["all_pass"] is True


def test_verify_deterministic_output(capsys):
    args = ["verify", "--K", "4", "--N", "2", "--t", "1", "--q", "3",
            "--demands", "random", "--trials", "5", "--seed", "11", "--format", "json"]
    _, out1, _ = run(args, capsys)
    _, out2, _ = run(args, capsys)
    assert out1 == out2


@pytest.mark.parametrize("which", ["appendix-a", "appendix-b"])
def test_demo_commands(which, capsys):
    code, out, _ = run(["demo", which], capsys)
    assert code == 0
    assert "equivalence with the reference solved forms: ok" in out
    assert "end-to-end decode over GF(3): ok" in out


def test_log_env_respected(monkeypatch, capsys):
    monkeypatch.setenv("SLFR_LOG", "DEBUG")
    code, _, _ = run(["graph", "--K", "3", "--N", "2", "--t", "2", "--q", "2"], capsys)
    assert code == 0
