from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from tstruct.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, main
from tstruct.io import dumps

ROOT = Path(__file__).resolve().parent.parent
JOBS = ROOT / "jobs"
GOLDEN = Path(__file__).resolve().parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("golden, argv", [
    ("classify_two_minimal_primes.txt", ["classify", "two_minimal_primes.json"]),
    ("classify_two_minimal_primes.json", ["classify", "two_minimal_primes.json", "--json"]),
    ("classify_zmod12.json", ["classify", "zmod12.json", "--json"]),
    ("fastpaths_canonical_shift.txt", ["classify", "canonical_shift.json", "--fastpaths-only"]),
    ("spectrum_zmod12.txt", ["spectrum", "zmod12.json"]),
    ("spectrum_dedekind.json", ["spectrum", "dedekind.json", "--json"]),
    ("enumerate_chain2.txt", ["enumerate", "chain2.json", "--window", "0:1"]),
    ("enumerate_chain2_stats.json", ["enumerate", "chain2.json", "--window", "0:2", "--stats",
                                     "--json"]),
    ("verify_cor512.txt", ["verify", "cor512", "cor512_chain3.json"]),
])
def test_golden(capsys, golden, argv):
    argv = [str(JOBS / a) if a.endswith(".json") else a for a in argv]
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    assert out == (GOLDEN / golden).read_text()


class TestClassify:
    def test_two_minimal_primes(self, capsys):
        code, out, _ = run(capsys, "classify", JOBS / "two_minimal_primes.json", "--json")
        res = json.loads(out)["results"][0]["classification"]
        assert res["verdict"] == "module" and res["ring_A"] == "k(p2) x k(p1)"

    def test_canonical_shift(self, capsys):
        code, out, _ = run(capsys, "classify", JOBS / "canonical_shift.json", "--json")
        res = json.loads(out)["results"][0]
        assert res["classification"]["verdict"] == "module"
        assert res["classification"]["ring_A"] == "R"
        assert res["fastpaths"]["left_nondegenerate"]["m"] == 2

    def test_strict_conditional(self, capsys):
        job = JOBS / "conditional_abstract.json"
        assert run(capsys, "classify", job)[0] == EXIT_OK
        code, out, _ = run(capsys, "classify", job, "--strict")
        assert code == EXIT_FAIL and "verdict: conditional" in out

    def test_enumerate_directive(self, capsys, tmp_path):
        doc = {"poset": {"elements": ["p", "m"], "covers": [["p", "m"]]},
               "filtrations": [{"name": "all", "enumerate": {"window": "0:1"}}]}
        path = tmp_path / "job.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "classify", path, "--json")
        names = [r["name"] for r in json.loads(out)["results"]]
        assert names == [f"all[{k}]" for k in range(6)]

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "classify", JOBS / "zmod12.json", "--json", "--out", target)
        assert code == EXIT_OK and out == ""
        assert json.loads(target.read_text())["ring"] == {"n": 12, "variant": "zmod"}


class TestEnumerate:
    def test_counts(self, capsys, tmp_path):
        code, out, _ = run(capsys, "enumerate", JOBS / "chain2.json", "--window", "0:1", "--json")
        assert json.loads(out)["total"] == 6
        point = tmp_path / "point.json"
        point.write_text(json.dumps({"poset": {"elements": ["p"]}}))
        code, out, _ = run(capsys, "enumerate", point, "--window", "0:0", "--json")
        assert json.loads(out)["total"] == 2

    def test_stats_hides_listing(self, capsys):
        code, out, _ = run(capsys, "enumerate", JOBS / "chain2.json", "--window", "0:1",
                           "--stats", "--json")
        doc = json.loads(out)
        assert "filtrations" not in doc and "shapes" in doc

    def test_needs_window(self, capsys):
        code, _, err = run(capsys, "enumerate", JOBS / "chain2.json")
        assert code == EXIT_INPUT and "window" in err

    def test_oversized_window(self, capsys, monkeypatch):
        monkeypatch.delenv("TSTRUCT_GUARD_OVERRIDE", raising=False)
        code, _, err = run(capsys, "enumerate", JOBS / "chain2.json", "--window", "0:40")
        assert code == EXIT_RESOURCE and "resource limit" in err


class TestVerify:
    @pytest.mark.parametrize("suite, job", [
        ("lemma31", "lemma31_zmod8.json"),
        ("prop53", "prop53.json"),
        ("cor512", "cor512_chain3.json"),
        ("prop32", None),
        ("component-split", None),
        ("snf", None),
    ])
    def test_suites_pass(self, capsys, suite, job, tmp_path):
        if job is None and suite == "component-split":
            path = tmp_path / "small.json"
            path.write_text(json.dumps({"max_part": 2, "max_total": 4, "window": [0, 2]}))
            argv = ["verify", suite, path]
        else:
            argv = ["verify", suite] + ([JOBS / job] if job else [])
        code, out, _ = run(capsys, *argv)
        assert code == EXIT_OK
        assert out.rstrip().splitlines()[-1].startswith(f"{suite}: PASS")

    def test_seed_is_deterministic(self, capsys):
        a = run(capsys, "verify", "snf", "--seed", "7", "--json")[1]
        b = run(capsys, "verify", "snf", "--seed", "7", "--json")[1]
        strip = [{k: v for k, v in json.loads(x).items() if k != "seconds"} for x in (a, b)]
        assert strip[0] == strip[1]

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "nonsense"])
        assert exc.value.code == 2


class TestErrors:
    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "spectrum", bad)
        assert code == EXIT_INPUT and "invalid JSON" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "spectrum", tmp_path / "nope.json")
        assert code == EXIT_INPUT

    def test_unknown_label(self, capsys, tmp_path):
        job = tmp_path / "job.json"
        job.write_text(json.dumps({"ring": {"variant": "zmod", "n": 12},
                                   "filtrations": [{"steps": [{"upto": 0, "value": ["(5)"]}]}]}))
        code, _, err = run(capsys, "classify", job)
        assert code == EXIT_INPUT and "(5)" in err

    def test_spectrum_counts(self, capsys):
        code, out, _ = run(capsys, "spectrum", JOBS / "dedekind.json", "--json")
        doc = json.loads(out)
        assert len(doc["elements"]) == 3 and len(doc["covers"]) == 2
        code, out, _ = run(capsys, "spectrum", JOBS / "zmod12.json", "--json")
        assert len(json.loads(out)["components"]) == 2


@pytest.mark.parametrize("argv", [
    ["spectrum", "dedekind.json"],
    ["classify", "two_minimal_primes.json"],
    ["classify", "zmod12.json"],
    ["classify", "dedekind.json", "--fastpaths-only"],
    ["enumerate", "chain2.json", "--window=-1:1"],
    ["verify", "cor512", "cor512_chain3.json"],
])
def test_json_round_trip_is_byte_identical(capsys, argv):
    argv = [str(JOBS / a) if a.endswith(".json") else a for a in argv]
    _, out, _ = run(capsys, *argv, "--json")
    assert dumps(json.loads(out)) == out


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "tstruct.cli", "classify", str(JOBS / "conditional_abstract.json"),
         "--strict"], capture_output=True, text=True)
    assert proc.returncode == EXIT_FAIL
    assert "verdict: conditional" in proc.stdout
