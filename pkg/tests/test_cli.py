import json

import pytest

from iwahori_h1.cli import RunConfig, UsageError, build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_decompose_n3_total(capsys):
    code, out = run(capsys, "decompose", "--n", "3", "--p", "5", "--f", "1", "--e", "1",
                    "--chi", "exps:[0,0,0];uvals:[1,1,1]")
    assert code == 0 and json.loads(out)["total_dim"] == 33


def test_decompose_nonsplit_witness(capsys):
    code, out = run(capsys, "decompose", "--n", "2", "--p", "5", "--chi", "exps:[1,0];uvals:[1,1]")
    lv = json.loads(out)["levels"][1]
    assert code == 0 and lv["split"] is False and lv["certificate"] == "none-proof"


def test_decompose_n4_top_summand(capsys):
    code, out = run(capsys, "decompose", "--n", "4", "--p", "5")
    top = json.loads(out)["levels"][3]["summands"]
    assert code == 0 and top == [dict(top[0], beta="a1,4", dim=8, supersingular=True)]


def test_dump_m_beta_r(capsys, tmp_path):
    dest = tmp_path / "m.json"
    code, _ = run(capsys, "dump", "--n", "3", "--p", "5", "--which", "m_beta_r",
                  "--beta", "1,3", "--out", str(dest))
    js = json.loads(dest.read_text())
    assert code == 0 and js["dim"] == 3 and js["kind"] == "hecke_module"


@pytest.mark.parametrize("argv", [
    ["decompose", "--n", "7", "--p", "5"],
    ["decompose", "--n", "3", "--p", "5", "--chi", "exps:[0];uvals:[1]"],
    ["decompose", "--n", "3", "--p", "4"],
    ["verify", "--n", "2", "--p", "3", "--f", "2"],
    ["verify", "--n", "4", "--p", "3"],
    ["dump", "--n", "3", "--p", "5", "--which", "m_beta_r", "--beta", "2,1"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_verify_all_n2(capsys):
    code, out = run(capsys, "verify", "--suite", "all", "--n", "2", "--p", "5")
    assert code == 0


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(n=1, p=5)
    cfg = RunConfig(n=3, p=5, chi="generic:2")
    assert cfg.character().n == 3


def test_parser_has_subcommands():
    p = build_parser()
    assert p.parse_args(["decompose", "--n", "3", "--p", "3"]).n == 3
