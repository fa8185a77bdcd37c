from __future__ import annotations

import json
from pathlib import Path

import pytest

from evipath.cli import main, sample_triples, toy_dir
from evipath.evaluation import read_trace, report_from_events
from evipath.kgstore import KnowledgeGraph, Triple

TRANSCRIPT = str(toy_dir() / "transcript.jsonl")
DATASET = str(toy_dir() / "dataset.jsonl")


def run(argv, capsys) -> tuple[int, str, str]:
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


class TestIngest:
    def test_two_kgs_and_docs(self, tmp_path, capsys):
        a = write(tmp_path / "a.tsv", "m.a\tAlpha\tr\tm.b\tBeta\nm.a\tAlpha\tr\tm.b\tBeta\n")
        b = write(tmp_path / "b.tsv", "Q1\tAlpha\ts\tQ2\tGamma\n")
        docs = write(tmp_path / "docs.jsonl", json.dumps({"entity": "m.a", "title": "Alpha", "body": "Text."}) + "\n")
        code, out, _ = run(["ingest", "--store", tmp_path / "s", "--kg", f"freebase={a}", "--kg", f"wikikg={b}",
                            "--docs", docs], capsys)
        assert code == 0
        manifest = json.loads((tmp_path / "s" / "manifest.json").read_text())
        assert manifest["sources"] == ["freebase", "wikikg", "docs"]
        assert manifest["kg"][0]["duplicates"] == 1 and manifest["kg"][0]["triples"] == 1
        assert "1 duplicate lines dropped" in out
        assert (tmp_path / "s" / "kg" / "wikikg.tsv").is_file()

    def test_bad_arity_reports_line(self, tmp_path, capsys):
        a = write(tmp_path / "a.tsv", "m.a\tAlpha\tr\tm.b\tBeta\n\nm.a\tr\n")
        code, _, err = run(["ingest", "--store", tmp_path / "s", "--kg", f"freebase={a}"], capsys)
        assert code == 1 and "a.tsv:3" in err

    def test_kg_flag_needs_name(self, tmp_path, capsys):
        code, _, err = run(["ingest", "--store", tmp_path / "s", "--kg", "file.tsv"], capsys)
        assert code == 2 and "NAME=PATH" in err

    def test_toy(self, tmp_path, capsys):
        code, out, _ = run(["ingest", "--toy", "--store", tmp_path / "s"], capsys)
        assert code == 0 and "sources: freebase, wikikg, docs, web" in out


class TestAskEval:
    def test_missing_store_is_usage_error(self, tmp_path, capsys):
        code, _, err = run(["ask", "q", "--store", tmp_path / "nowhere", "--transcript", TRANSCRIPT], capsys)
        assert code == 2 and "run 'evipath ingest' first" in err

    def test_no_llm_is_usage_error(self, store, capsys):
        code, _, err = run(["ask", "q", "--store", store], capsys)
        assert code == 2 and "no LLM configured" in err

    def test_ask_case_study(self, store, capsys):
        q = "What movie was Logan Lerman in that was decorated by Barry Greaves?"
        code, out, _ = run(["ask", q, "--store", store, "--transcript", TRANSCRIPT], capsys)
        assert code == 0
        assert "answer: Fury" in out and "verified_by: kg, wiki" in out

    def test_hydra_e_seed_rerun_identical(self, store, tmp_path, capsys):
        traces = []
        for i in range(2):
            t = tmp_path / f"t{i}.jsonl"
            code, _, _ = run(["eval", DATASET, "--store", store, "--transcript", TRANSCRIPT, "--mode", "hydra-e",
                              "--seed", 7, "--trace", t], capsys)
            assert code == 0
            traces.append(t.read_bytes())
        assert traces[0] == traces[1]
        assert b'"mode": "hydra-e"' in traces[0]

    def test_empty_dataset(self, tmp_path, capsys):
        ds = write(tmp_path / "empty.jsonl", "\n")
        code, out, _ = run(["eval", ds, "--store", tmp_path / "unused", "--json"], capsys)
        assert code == 0 and json.loads(out)["items"] == 0

    def test_report_recomputable_from_trace(self, store, tmp_path, capsys):
        trace, report = tmp_path / "trace.jsonl", tmp_path / "report.json"
        code, out, _ = run(["eval", DATASET, "--store", store, "--transcript", TRANSCRIPT, "--trace", trace,
                            "--report", report], capsys)
        assert code == 0 and "Hits@1: 1.000" in out
        saved = json.loads(report.read_text())
        assert report_from_events(read_trace(trace)).to_dict() == saved
        assert saved["items"] == 20 and saved["max_llm_calls"] <= 9

    def test_kg_completeness_zero(self, store, capsys):
        code, out, _ = run(["eval", DATASET, "--store", store, "--transcript", TRANSCRIPT, "--kg-completeness", 0,
                            "--json"], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["hits_at_1"] >= 0.8 and "kg" not in rep["composition"]


class TestConfigCommand:
    def test_init_and_show(self, tmp_path, capsys):
        p = tmp_path / "e.conf"
        assert run(["config", "init", p], capsys)[0] == 0
        code, _, err = run(["config", "init", p], capsys)
        assert code == 2 and "--force" in err
        code, out, _ = run(["config", "show", "--config", p, "--seed", 3], capsys)
        assert code == 0 and "seed = 3" in out


def test_sample_triples():
    g = KnowledgeGraph()
    for i in range(10):
        g.add_triple(Triple(f"a{i}", "r", f"b{i}"), f"A{i}", f"B{i}")
    g.entities["a0"].aliases.add("alias")
    half = sample_triples(g, 0.5, 1)
    assert len(half) == 5 and keys_subset(half, g)
    assert len(sample_triples(g, 0.0, 1)) == 0 and len(sample_triples(g, 1.0, 1)) == 10
    assert sample_triples(g, 1.0, 1).entities["a0"].aliases == {"alias"}
    with pytest.raises(ValueError):
        sample_triples(g, 1.5, 0)


def keys_subset(a: KnowledgeGraph, b: KnowledgeGraph) -> bool:
    return {t.key for t in a.triples()} <= {t.key for t in b.triples()}
