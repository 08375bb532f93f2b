import json
import math
import subprocess
import sys
import time
from importlib import resources

import jsonschema
import pytest
from hypothesis import given, strategies as st

from wzwnorms import cli
from wzwnorms.cli import RunConfig, main, parse_levels


def schema(name):
    text = resources.files("wzwnorms").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema(argv[0]))
    return doc


@pytest.fixture(autouse=True)
def _cache(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path / "cache"))


def test_fusion_example(capsys):
    doc = run_json(capsys, "fusion", "--n", "2", "--level", "1")
    assert doc["N"][1][1][0] == 1
    assert {"a": "1/2", "b": "1/2", "c": "0", "N": 1} in doc["nonzero"]


def test_qdim_example(capsys):
    doc = run_json(capsys, "qdim", "--n", "2", "--level", "2", "--j", "1/2")
    assert doc["qdims"][0]["qdim"] == pytest.approx(math.sqrt(2), abs=1e-15)
    assert doc["qdims"][0]["spin"] == "1/2" and doc["qdims"][0]["twice"] == 1


def test_alcove_example(capsys):
    doc = run_json(capsys, "alcove", "--n", "2", "--level", "0")
    assert [w["coords"] for w in doc["weights"]] == [[0]]
    doc = run_json(capsys, "alcove", "--n", "3", "--level", "1")
    assert len(doc["weights"]) == 3


def test_smatrix(capsys):
    doc = run_json(capsys, "smatrix", "--n", "2", "--level", "1")
    assert doc["S"][1][1] == [pytest.approx(-1 / math.sqrt(2)), 0.0]
    code, out, _ = run(capsys, "smatrix", "--n", "2", "--level", "1", "--format", "csv")
    assert out.splitlines()[0] == "row,col,re,im" and len(out.splitlines()) == 5


def test_norm_examples(capsys):
    doc = run_json(capsys, "norm", "--j", "1/2", "--k", "0", "--kappa", "7.3")
    assert doc["value"] == 1
    doc = run_json(capsys, "norm", "--j", "2", "--k", "1", "--level", "4")
    assert doc["window"] is False and doc["status"] != "finite"
    assert doc["offending"] and "x+=6" in doc["offending"][0]
    doc = run_json(capsys, "norm", "--j", "1", "--k", "1", "--kappa", "5", "--ratio", "1/2")
    from wzwnorms.norms import norm_ratio
    assert doc["ratio"] == pytest.approx(norm_ratio(1, "1/2", 1, 5), rel=1e-14)
    assert doc["ratio_to"] == {"spin": "1/2", "twice": 1}


def test_norm_conjecture(capsys):
    doc = run_json(capsys, "norm", "--n", "3", "--weight", "0,0", "--k", "2", "--kappa", "7.3")
    assert len(doc["factors"]) == 3 and doc["i_range"] == "k-1"


def test_norm_pretty(capsys):
    code, out, _ = run(capsys, "norm", "--j", "1", "--k", "2", "--kappa", "7.3", "--format", "pretty")
    assert code == 0
    assert out.splitlines()[-1].startswith("total")


def test_modular_check(capsys):
    doc = run_json(capsys, "modular-check", "--n", "2", "--levels", "1..8")
    assert doc["passed"] and len(doc["reports"]) == 8
    doc = run_json(capsys, "modular-check", "--n", "2", "--levels", "0")
    assert doc["reports"][0]["passed"]
    doc = run_json(capsys, "modular-check", "--n", "3", "--levels", "1..4")
    assert doc["max_residual"] < 1e-12


def test_modular_check_corrupt_exit_3(capsys):
    code, out, err = run(capsys, "modular-check", "--n", "2", "--levels", "1..3", "--corrupt-s")
    assert code == 3 and out == "" and "residual" in err


def test_fusion_corrupt_exit_3(capsys):
    code, out, err = run(capsys, "fusion", "--n", "2", "--level", "3", "--corrupt-s")
    assert code == 3 and out == ""


@pytest.mark.parametrize("argv", [
    ["alcove", "--n", "2", "--level", "-1"],
    ["alcove", "--n", "2"],
    ["norm", "--j", "1", "--k", "1"],
    ["norm", "--j", "1", "--k", "1", "--kappa", "5", "--level", "3"],
    ["qdim", "--n", "3", "--level", "2", "--weight", "1"],
    ["kz-verify", "--k", "3", "--kappa", "7.3", "--j-max", "1"],
    ["norm", "--j", "1", "--k", "1", "--kappa", "-3"],
])
def test_parameter_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


@pytest.mark.parametrize("argv", [["norm", "--j", "1/3", "--k", "1", "--kappa", "5"],
                                  ["modular-check", "--levels", "5..2"]])
def test_argparse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""


def test_kz_verify_example(capsys):
    doc = run_json(capsys, "kz-verify", "--k", "1", "--kappa", "7.3", "--j-max", "3/2",
                   "--tol", "1e-10")
    assert [r["spin"] for r in doc["rows"]] == ["1/2", "1", "3/2"]
    assert doc["max_relative_deviation"] < 1e-6
    assert "wall_clock_s" not in doc


def test_kz_verify_trivial(capsys):
    doc = run_json(capsys, "kz-verify", "--k", "0", "--kappa", "7.3", "--j-max", "3/2")
    assert all(r["ratio"] == 1 for r in doc["rows"])


def test_kz_verify_resonance_exit_4(capsys):
    code, out, err = run(capsys, "kz-verify", "--k", "1", "--kappa", "3", "--j-max", "1/2")
    assert code == 4 and out == "" and "Resonance" in err


def test_kz_verify_cache(capsys, tmp_path):
    argv = ["kz-verify", "--k", "2", "--kappa", "6.9", "--j-max", "2", "--cache-dir",
            str(tmp_path / "c2")]
    t0 = time.perf_counter()
    code, first, _ = run(capsys, *argv)
    t1 = time.perf_counter()
    code2, second, _ = run(capsys, *argv)
    t2 = time.perf_counter()
    assert code == code2 == 0
    assert first == second
    assert (t2 - t1) < 0.1 * (t1 - t0)
    assert len(list((tmp_path / "c2").glob("*.json"))) == 3


def test_kz_verify_jobs_same_output(capsys, tmp_path):
    base = ["kz-verify", "--k", "1", "--kappa", "6.1", "--j-max", "3/2"]
    _, a, _ = run(capsys, *base, "--cache-dir", str(tmp_path / "a"))
    _, b, _ = run(capsys, *base, "--cache-dir", str(tmp_path / "b"), "--jobs", "2")
    assert a == b


def test_kz_verify_timing_flag(capsys):
    doc = run_json(capsys, "kz-verify", "--k", "1", "--kappa", "7.3", "--j-max", "1/2", "--timing")
    assert doc["wall_clock_s"] >= 0


def test_byte_stable(capsys):
    _, a, _ = run(capsys, "smatrix", "--n", "3", "--level", "2")
    _, b, _ = run(capsys, "smatrix", "--n", "3", "--level", "2")
    assert a == b


def test_cache_key_depends_on_inputs():
    k = cli.cache_key(1, 1, 7.3, 1e-10)
    assert k == cli.cache_key(1, 1, 7.3, 1e-10)
    assert len({k, cli.cache_key(2, 1, 7.3, 1e-10), cli.cache_key(1, 1, 7.3, 1e-11),
                cli.cache_key(1, 1, 7.31, 1e-10)}) == 4


@given(st.sampled_from(["alcove", "norm", "kz-verify"]), st.integers(2, 5),
       st.one_of(st.none(), st.integers(0, 9)), st.floats(0.1, 100), st.sampled_from(["k", "k-1"]),
       st.sampled_from(["json", "csv", "pretty"]), st.booleans())
def test_run_config_round_trip(sub, n, level, kappa, i_range, fmt, timing):
    cfg = RunConfig(sub, n=n, level=level, kappa=kappa, j="3/2", k=2, i_range=i_range, fmt=fmt,
                    timing=timing, levels=[1, 2])
    assert RunConfig.from_json(cfg.to_json()) == cfg
    jsonschema.validate(cfg.to_dict(), schema("run-config"))


def test_run_config_rejects_unknown():
    with pytest.raises(cli.ParameterError):
        RunConfig.from_dict({"subcommand": "alcove", "bogus": 1})


def test_parse_levels():
    assert parse_levels("1..3") == [1, 2, 3]
    assert parse_levels("4") == [4]
    assert parse_levels("1,5") == [1, 5]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "wzwnorms", "qdim", "--level", "2", "--j", "1",
                          "--format", "csv"], capture_output=True, text=True, check=True).stdout
    head, row = out.splitlines()
    assert head == "label,qdim"
    assert row.split(",")[0] == "1" and float(row.split(",")[1]) == pytest.approx(1.0, abs=1e-15)
