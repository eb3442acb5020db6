import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from quadgroup.cli import run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "genus": ["genus", "abAB", "--json"],
    "genus-bounds": ["genus", "abABabAB", "--max-genus", "1", "--json"],
    "growth": ["growth", "abAB", "--pmax", "3", "--json"],
    "canonicalize": ["canonicalize", "x y x Y", "--json"],
    "elementary": ["elementary", "aa,aaa", "--json"],
    "elementary-z2z3": [
        "elementary",
        "0:1 1:1,0:1 1:1 0:1 1:1",
        "--group",
        '{"type": "product", "factors": [{"type": "cyclic", "order": 2}, {"type": "cyclic", "order": 3}]}',
        "--json",
    ],
    "reduce-hom": ["reduce-hom", "a,b,b,a", "--json"],
    "klein": ["klein", "ab,BA", "--json"],
    "orbit": ["orbit", "a", "b", "--max-length", "2", "--json"],
    "endo-search": ["endo-search", "--max-length", "2", "--json"],
}


def invoke(argv):
    buf = io.StringIO()
    code = run(argv, buf)
    return code, buf.getvalue()


def stable(report):
    report = dict(report)
    report.pop("timestamp")
    return report


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_reports(name):
    code, text = invoke(CASES[name])
    report = json.loads(text)
    assert report["exit_code"] == code
    assert report["schema_version"] == "1.0"
    path = GOLDEN / f"{name}.json"
    if os.environ.get("UPDATE_GOLDEN"):
        path.write_text(json.dumps(stable(report), indent=2, sort_keys=True) + "\n")
    assert stable(report) == json.loads(path.read_text())


@pytest.mark.parametrize("name", ["genus", "growth", "canonicalize", "elementary", "elementary-z2z3", "reduce-hom", "klein", "orbit"])
def test_reports_replay(name, tmp_path):
    _, text = invoke(CASES[name])
    saved = tmp_path / "report.json"
    saved.write_text(text)
    code, out = invoke([CASES[name][0], "--replay", str(saved)])
    assert code == 0
    assert out.startswith("replay ok")


def test_tampered_report_fails_replay(tmp_path):
    _, text = invoke(CASES["elementary"])
    report = json.loads(text)
    report["result"]["terminal"] = ["1", "b"]
    saved = tmp_path / "bad.json"
    saved.write_text(json.dumps(report))
    code, out = invoke(["elementary", "--replay", str(saved)])
    assert code == 3 and "FAILED" in out


def test_text_output():
    code, out = invoke(["genus", "abAB"])
    assert code == 0
    assert out.splitlines()[0] == "genus(abAB) Exact(1)"
    code, out = invoke(["canonicalize", "x x y y"])
    assert "non-orientable genus 2" in out


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["genus", "abab"], 3),  # not in the commutator subgroup
        (["genus", "a?b"], 2),
        (["genus"], 2),
        (["elementary", "a,b"], 3),  # not a solution of the relator
        (["elementary", "a,A", "--non-orientable"], 3),
        (["elementary", "aa,aaa", "--group", "{\"type\": \"nope\"}"], 2),
        (["elementary", "aa,aaa", "--budget", "-1"], 2),
        (["canonicalize", "x x x"], 2),
        (["verify", "no-such-suite"], 2),
        (["genus", "abAB", "--max-genus", "4"], 3),
        (["genus", "abABabAB", "--max-genus", "1", "--budget", "0"], 1),
        (["elementary", "a,b,b,a", "--budget", "1"], 1),
    ],
)
def test_exit_codes(argv, expected):
    code, _ = invoke(argv)
    assert code == expected


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as e:
        run(["frobnicate"])
    assert e.value.code == 2


def test_hom_from_json_file(tmp_path):
    spec = {"genus": 1, "orientable": True, "target": {"type": "free", "rank": 2}, "images": ["aa", "aaa"]}
    f = tmp_path / "hom.json"
    f.write_text(json.dumps(spec))
    code, text = invoke(["elementary", str(f), "--json"])
    assert code == 0
    assert json.loads(text)["result"]["terminal"][0] == "1"


def test_verify_small_suite():
    code, text = invoke(["verify", "klein-4-8", "--json"])
    report = json.loads(text)
    assert code == 0 and report["result"]["passed"]
    assert report["result"]["cases"] == 28


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "quadgroup", "genus", "abAB"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "Exact(1)" in proc.stdout
