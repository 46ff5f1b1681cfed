import json

import pytest

from mabisim.cli import main
from mabisim.corpus import entry


@pytest.fixture
def models(tmp_path):
    paths = {}
    for name in ("race", "visible_delay", "divergence", "split"):
        p = tmp_path / f"{name}.ma"
        p.write_text(entry(name).text)
        paths[name] = str(p)
    return paths


def test_validate(models, capsys):
    assert main(["validate", models["race"]]) == 0
    assert "time-convergent" in capsys.readouterr().out
    assert main(["validate", models["divergence"]]) == 0
    assert "time-divergent states: r" in capsys.readouterr().out


def test_validate_reports_syntax_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ma"
    bad.write_text("states: s\nptrans: s --a--> { 1/3: s }\n")
    assert main(["validate", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.ma")]) == 2


def test_check_exit_codes(models, capsys):
    base = ["check", "--model", models["race"], "--relation", "bisim"]
    assert main(base + ["--semantics", "late", "--lhs", "s", "--rhs", "r"]) == 0
    assert main(base + ["--semantics", "early", "--lhs", "t", "--rhs", "r"]) == 1
    assert main(base + ["--semantics", "early", "--lhs", "s", "--rhs", "t", "--budget", "1"]) == 3
    assert main(base + ["--lhs", "s", "--rhs", "{1/2:s"]) == 2
    assert main(base + ["--lhs", "s", "--rhs", "zz"]) == 2
    assert main(["check", "--model", models["race"], "--relation", "nope", "--lhs", "s", "--rhs", "t"]) == 2


def test_check_json(models, capsys):
    code = main(["check", "--model", models["split"], "--lhs", "{1/2:s1,1/2:s2}", "--rhs", "{1/2:s3,1/2:s4}",
                 "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 1 and doc["outcome"] == "distinguished"
    assert doc["counterexample"]["challenge"] == {"action": "tau", "rho": "1/2", "result": "{1:s1}",
                                                  "split": "{1/2:s1}"}
    main(["check", "--model", models["race"], "--lhs", "s", "--rhs", "t", "--budget", "1", "--json"])
    assert json.loads(capsys.readouterr().out)["outcome"] == "resource-limit"


def test_divergence_flag(models):
    args = ["check", "--model", models["divergence"], "--lhs", "s", "--rhs", "r"]
    assert main(args) == 0
    assert main(args + ["--divergence-sensitive"]) == 1


def test_explain_logs_to_stderr(models, capsys):
    main(["check", "--model", models["race"], "--lhs", "t", "--rhs", "r", "--explain"])
    assert "challenge" in capsys.readouterr().err


def test_semantics_listing_and_dot(models, tmp_path, capsys):
    assert main(["semantics", "--model", models["visible_delay"], "--kind", "early"]) == 0
    assert "s0 --rate(3)--> {1/3:s3,2/3:s4}" in capsys.readouterr().out
    out = tmp_path / "late.dot"
    assert main(["semantics", "--model", models["visible_delay"], "--kind", "late", "--dot", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("digraph") and "[s0,s3]" in text and "[s0,s4]" in text


def test_compose(models, tmp_path, capsys):
    out = tmp_path / "prod.ma"
    assert main(["compose", "--left", models["divergence"], "--right", models["divergence"], "--out", str(out)]) == 0
    assert "mtrans: t|t --2--> t|t" in out.read_text()
    assert main(["validate", str(out)]) == 0
    assert main(["compose", "--left", models["race"], "--right", models["race"], "--sync", "tau",
                 "--out", str(out)]) == 2


def test_corpus_run(capsys):
    assert main(["corpus", "run"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.strip().endswith("claims hold")
    assert main(["corpus", "run", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["failed"] == 0 and doc["passed"] == len(doc["claims"])


def test_corpus_list_and_dump(tmp_path, capsys):
    assert main(["corpus", "list"]) == 0
    assert "race:" in capsys.readouterr().out
    assert main(["corpus", "dump", "--dir", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "kernel.ma").exists()


def test_usage_errors():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["check", "--model", "x.ma", "--lhs", "s", "--rhs", "t", "--tau-depth", "0"]) == 2
