import json
from types import SimpleNamespace

import pytest

from signorth.cli import Config, CliError, main, resolve_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_cert_fixture(capsys):
    code, out, _ = run(capsys, "verify-cert", "cert_5x6")
    assert code == 0
    js = json.loads(out)
    assert js["verdict"] == "Accept" and js["delta"] == "3/73"


def test_sipp_conference(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "conference6_matrix", "--out", str(tmp_path))
    assert code == 0
    path = tmp_path / "conference6_matrix.json"
    code, out, _ = run(capsys, "sipp", str(path))
    js = json.loads(out)
    assert code == 2 and js["has_sipp"] is False and js["witness"] is not None


def test_check_exit_codes(capsys, tmp_path):
    assert run(capsys, "check", "minimal_m4_4")[0] == 0
    f = tmp_path / "p.txt"
    f.write_text("+-+\n+-+\n")
    code, out, _ = run(capsys, "check", str(f))
    assert code == 2 and json.loads(out)["evidence"]["kind"] == "ppo_failure"
    code, out, _ = run(capsys, "check", "three_zero_rows_3x4")
    assert code == 3 and json.loads(out)["status"] == "Unknown"


def test_same_seed_same_bytes(capsys):
    a = run(capsys, "find-cert", "minimal_5x6_s1", "--seed", "4")[1]
    b = run(capsys, "find-cert", "minimal_5x6_s1", "--seed", "4")[1]
    assert a == b and json.loads(a)["found"]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    code, _, err = run(capsys, "check", "no_such_thing")
    assert code == 1 and "neither a file" in err


def test_simulate_csv(capsys, tmp_path):
    csv_path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "simulate", "--m", "3", "--n", "20,30", "--trials", "20", "--relax",
                       "--csv", str(csv_path))
    assert code == 0 and len(json.loads(out)["sweep"]) == 2
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "m,n,p,r,empirical,lo,hi,bound" and len(lines) == 3


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--m", "3", "--max-n", "4", "--format", "text")
    assert code == 0 and "n = 3: 1 class(es)" in out


def test_config_roundtrip_and_precedence(tmp_path):
    cfg = Config(seed=3, scale=900, out="x")
    assert Config.parse(cfg.to_text()) == cfg
    with pytest.raises(CliError):
        Config(scale=0)
    with pytest.raises(CliError):
        Config.parse("bogus = 1")
    path = tmp_path / "c.cfg"
    path.write_text("seed = 5\nbits = 70  # more precision\n")
    args = SimpleNamespace(config=str(path), seed=None, out=None, bits=None, format=None)
    assert resolve_config(args, {}).seed == 5
    assert resolve_config(args, {"SIGNORTH_SEED": "8"}).seed == 8
    args.seed = 9
    cfg = resolve_config(args, {"SIGNORTH_SEED": "8", "SIGNORTH_OUT": "/tmp/z"})
    assert cfg.seed == 9 and cfg.out == "/tmp/z" and cfg.bits == 70


def test_construct_list(capsys):
    code, out, _ = run(capsys, "construct", "--list")
    assert code == 0 and "open_6x8" in out


def test_sipp_numeric_text_file(capsys, tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("3/4 1 -2\n1 1 1\n")
    assert main(["sipp", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["has_sipp"] is True
    f.write_text("1 2*sqrt2\n")
    assert main(["sipp", str(f)]) == 0
    f.write_text("1 x\n")
    assert main(["sipp", str(f)]) == 1
    f.write_text("+ -\n")
    assert main(["sipp", str(f)]) == 1
    assert "illegal character" in capsys.readouterr().err
