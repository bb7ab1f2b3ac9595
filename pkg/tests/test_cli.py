import json
import subprocess
import sys

import pytest

from unitspec.cli import JobConfig, build_parser, config_from_args, corpus_names, execute, main
from unitspec.errors import ConfigError


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_gl1_small_ring_passes(tmp_path):
    code, rep, _ = run(["gl1", "--ring", "Z/2", "-N", "2", "--nmax", "2"], tmp_path)
    assert code == 0 and rep["status"] == "pass"
    assert all(rep["verdicts"].values())
    assert rep["schema_version"] == 1


def test_reports_are_byte_identical(tmp_path):
    args = ["gl1", "--ring", "Z/4", "-N", "2", "--nmax", "2"]
    _, _, a = run(args, tmp_path, "a.json")
    _, _, b = run(args, tmp_path, "b.json")
    assert a == b


def test_bad_ring_is_a_config_error(tmp_path):
    code, rep, _ = run(["gl1", "--ring", "Z/1x"], tmp_path)
    assert code == 2 and rep["stage"] == "ring"


def test_kmax_beyond_range_exits_two(capsys):
    assert main(["gl1", "--ring", "Z/2", "-D", "4", "--kmax", "3"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_validate_rejects_kmax():
    with pytest.raises(ConfigError):
        JobConfig(command="gl1", ring="Z/2", D=3, k_max=2).validate()


def test_env_supplies_defaults_and_flags_win(monkeypatch):
    monkeypatch.setenv("UNITSPEC_RING", "F5")
    monkeypatch.setenv("UNITSPEC_N", "2")
    cfg = config_from_args(build_parser().parse_args(["gl1"]))
    assert (cfg.ring, cfg.N) == ("F5", 2)
    cfg = config_from_args(build_parser().parse_args(["gl1", "--ring", "Z/6"]))
    assert (cfg.ring, cfg.N) == ("Z/6", 2)


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_diagrams_match_expectations(name, tmp_path):
    code, rep, _ = run(["hocolim", "--diagram", f"builtin:{name}", "-N", "2", "--kmax", "2"], tmp_path)
    assert code == 0, rep.get("error")
    assert rep["verdicts"]["matches_expected"] and rep["verdicts"]["pi0_matches_colimit"]


def test_hocolim_of_ring(tmp_path):
    code, rep, _ = run(["hocolim", "--ring", "F5", "-N", "2"], tmp_path)
    assert code == 0
    assert rep["hocolim"]["pi0_colimit"] == 5


def test_suite_seeded_and_negative_control(tmp_path):
    code, rep, _ = run(["suite", "--seed", "42", "--checks", "core", "-N", "3"], tmp_path)
    assert code == 0
    code, rep, _ = run(["suite", "--seed", "42", "--checks", "core", "--negative-control"], tmp_path, "neg.json")
    assert code == 1
    assert rep["verdicts"]["injected_fault/corrupted"] is False


def test_execute_returns_report_without_timing():
    code, rep = execute(JobConfig(command="hocolim", ring=None, diagram="builtin:point", N=2))
    assert code == 0
    assert "time" not in json.dumps(rep)
    assert "out" not in rep["job"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "unitspec", "hocolim", "--diagram", "builtin:circle", "-N", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "hocolim: pass" in res.stdout
