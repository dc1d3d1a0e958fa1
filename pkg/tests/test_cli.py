import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from voalab.cli import main

SCHEMA = json.loads(resources.files("voalab").joinpath("data/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_ope(capsys):
    code, doc = run_json(capsys, "ope", "G+", "G-")
    assert code == 0 and doc["ok"]
    prods = doc["result"]["products"]
    assert set(prods) == {"0", "1", "2"}


def test_normal_order_text(capsys):
    code, out, _ = run(capsys, "normal-order", ":G- G+:", "--ell", "1")
    assert code == 0 and out.strip().endswith("ok")


def test_verify_relation(capsys):
    code, doc = run_json(capsys, "verify-relation", "J _0_ G+ = G+")
    assert code == 0 and doc["ok"]
    code, doc = run_json(capsys, "verify-relation", "J _0_ G+ = 2*G+")
    assert code == 1 and not doc["ok"]


def test_verify_relation_file(capsys, tmp_path):
    f = tmp_path / "rel.txt"
    f.write_text("# comment\nT _1_ J\n= J\n")
    code, doc = run_json(capsys, "verify-relation", "--file", str(f))
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ("normal-order", ":J("),
        ("ope", "J", "nosuchfield"),
        ("ope", "J", "J", "--ell", "one"),
        ("ope", "J", "J", "--algebra", "/nonexistent/path"),
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("voalab")


def test_argparse_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["cn-table"])
    assert e.value.code == 2


def test_cn_table(capsys):
    code, doc = run_json(capsys, "cn-table", "--n", "1", "--tables")
    assert code == 0 and doc["ok"]


def test_mode_bracket(capsys):
    code, doc = run_json(capsys, "mode-bracket", "J", "G+", "--shifted")
    assert code == 0
    assert "G+" in json.dumps(doc["result"])


def test_character(capsys):
    code, doc = run_json(capsys, "character", "--ell", "1", "--order", "3", "--normalized")
    assert code == 0
    code, doc = run_json(capsys, "character", "--ell", "1", "--order", "3", "--z-power-grading")
    assert code == 0


def test_character_needs_integer_level(capsys):
    code, _, _ = run(capsys, "character", "--order", "3")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [("verify-decomposition", "--ell", "1", "--order", "4"), ("verify-corollary", "--ell", "2", "--s", "1", "--order", "4")],
)
def test_series_reports(capsys, argv):
    code, doc = run_json(capsys, *argv)
    assert code == 0
    assert doc["result"]["first_mismatch"] is None
    assert doc["result"]["calibration_choices"]


def test_selftest_subset(capsys):
    code, doc = run_json(capsys, "selftest", "--criteria", "2,6", "--threads", "2")
    assert code == 0
    assert [c["criterion"] for c in doc["result"]["criteria"]] == [2, 6]


def test_selftest_text_reports_failure(capsys):
    code, out, _ = run(capsys, "selftest", "--criteria", "10")
    assert code == 1
    assert "criterion 10 FAIL" in out


def test_cache_cold_warm(capsys, tmp_path):
    path = tmp_path / "cache.json"
    argv = ("normal-order", ":(:G+ G-:) (:G- G+:):", "--cache", str(path), "--format", "json")
    code, cold, _ = run(capsys, *argv)
    assert code == 0 and path.exists()
    size = path.stat().st_size
    code, warm, _ = run(capsys, *argv)
    assert code == 0 and warm == cold
    assert path.stat().st_size >= size


def test_corrupt_cache_ignored(capsys, tmp_path):
    path = tmp_path / "cache.json"
    argv = ("ope", "G+", "G-", "--cache", str(path), "--format", "json")
    _, clean, _ = run(capsys, *argv)
    for junk in ("{not json", json.dumps({"version": 99, "sections": {}})):
        path.write_text(junk)
        code, out, _ = run(capsys, *argv)
        assert code == 0 and out == clean
    doc = json.loads(path.read_text())
    doc["sections"] = {k: v[:1] for k, v in doc["sections"].items()}
    path.write_text(json.dumps(doc))  # checksum no longer matches
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == clean


def test_tampered_cache_entry_ignored(tmp_path):
    from voalab.algebras import bp_algebra
    from voalab.cache import ProductCache

    path = tmp_path / "c.json"
    alg = bp_algebra()
    alg["G+"].nth(alg["G-"], 0)
    c = ProductCache(path)
    c.absorb(alg)
    c.save()
    assert ProductCache(path).status == "loaded"
    doc = json.loads(path.read_text())
    doc["checksum"] = "0" * 64
    path.write_text(json.dumps(doc))
    c2 = ProductCache(path)
    assert c2.status == "checksum mismatch" and c2.warm(bp_algebra()) == 0


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "voalab.cli", "ope", "J", "J"], capture_output=True, text=True)
    assert r.returncode == 0 and "ok" in r.stdout
