import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from qmjac import pipelines
from qmjac.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main, render_manpage

ROOT = Path(__file__).resolve().parents[1]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stream=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_family_json():
    code, data = run_json("family", "--g", "4", "--a", "1/2")
    assert code == EXIT_OK
    assert data["model"]["pretty"] == "x^9 + x^7 - x^3 - x"
    assert data["moduli_orbit"] == ["-7/1", "-5/3", "-1/2", "1/2", "5/3", "7/1"]


def test_family_scan():
    code, data = run_json("family", "--b", "2", "--scan")
    assert code == EXIT_OK and sorted(data["automorphisms"]) == ["-1/x", "-x", "1/x", "x"]


def test_frobenius_report_and_cache(tmp_path):
    cache = tmp_path / "counts.jsonl"
    code, data = run_json("--cache", str(cache), "frobenius", "--p", "41")
    assert code == EXIT_OK
    assert data["g_p"] == ["1/1", "-2/1", "-30/1", "-82/1", "1681/1"]
    assert len(cache.read_text().splitlines()) == 3
    again = run("frobenius", "--p", "41", "--cache", str(cache))[1]
    assert json.loads(again) == data


def test_cache_env_var(tmp_path, monkeypatch):
    cache = tmp_path / "env.jsonl"
    monkeypatch.setenv("QMJAC_CACHE", str(cache))
    assert run("frobenius", "--p", "13")[0] == EXIT_OK
    assert cache.exists()


def test_monodromy_with_given_omega():
    code, data = run_json("monodromy", "--primes", "13,41,73", "--bad", "2,3", "--omega", "13:-1,41:1,73:1")
    assert code == EXIT_OK
    assert data["identification"]["identified"] == "Q(zeta8)"


def test_csv_and_pretty():
    code, text = run("lattice", "--csv")
    assert code == EXIT_OK and text.startswith("key,value\n")
    assert "nonfreeness.verdict,NotLocallyFree" in text
    code, text = run("--pretty", "clusters", "--t-adic")
    assert code == EXIT_OK and "GoodReduction" in text


def test_periods_hex_output():
    code, data = run_json("periods", "--a", "1/2")
    assert code == EXIT_OK
    assert float.fromhex(data["residual_beta"]) < 1e-8


def test_schoen_verify():
    code, data = run_json("schoen-verify", "--g", "6", "--beta", "2,3", "--trials", "5")
    assert code == EXIT_OK and data["report"]["passed"] == 5


@pytest.mark.parametrize(
    "argv",
    [[], ["pipeline", "nope"], ["frobenius"], ["family", "--a", "1", "--b", "2"], ["bogus"], ["clusters"]],
)
def test_usage_errors(argv):
    code, data = run_json(*argv)
    assert code == EXIT_USAGE and data["error"] == "USAGE"


@pytest.mark.parametrize(
    "argv,err",
    [
        (["frobenius", "--p", "3"], "BAD_PRIME"),
        (["frobenius", "--p", "41", "--budget", "100"], "BUDGET_EXCEEDED"),
        (["periods", "--a", "0.99999999"], "ILL_CONDITIONED"),
        (["family", "--g", "5"], "DEGENERATE_INPUT"),
    ],
)
def test_computational_errors(argv, err):
    code, data = run_json(*argv)
    assert code == EXIT_ERROR and data["error"] == err


def test_pipeline_mismatch_exit_code(monkeypatch):
    def failing(rep, config):
        rep.expect("always wrong", 1, 2)

    monkeypatch.setitem(pipelines.PIPELINES, "lattice", failing)
    code, data = run_json("pipeline", "lattice")
    assert code == EXIT_MISMATCH and data["all_match"] is False


@pytest.mark.parametrize("name", ["lattice", "clusters", "cor-fields-g4"])
def test_pipeline_bytes_reproducible(name):
    first = run("pipeline", name, "--no-timing")
    second = run("pipeline", name, "--no-timing")
    assert first[0] == EXIT_OK and first == second


def test_pipeline_timing_only_difference():
    a = json.loads(run("pipeline", "clusters")[1])
    b = json.loads(run("pipeline", "clusters")[1])
    a.pop("wall_clock_s"), b.pop("wall_clock_s")
    assert a == b


def test_manpage_covers_parser():
    page = render_manpage()
    for name in ("family", "frobenius", "monodromy", "lattice", "periods", "clusters", "schoen-verify", "pipeline"):
        assert f".SS {name}" in page
    for flag in ("\\-\\-json", "\\-\\-csv", "\\-\\-cache", "\\-\\-budget", "\\-\\-threads", "\\-\\-seed", "QMJAC_CACHE"):
        assert flag in page


def test_shipped_manpage_is_current():
    assert (ROOT / "docs" / "qmjac.1").read_text() == render_manpage()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qmjac.cli", "pipeline", "nope"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
