"""Helpers that run the engine over the bundled toy fixtures."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from evipath.cli import ingest, load_store, toy_dir
from evipath.config import EngineConfig
from evipath.engine import AnswerRecord, Engine, Trace
from evipath.evaluation import EvalReport, load_dataset, report_from_events
from evipath.providers.embedding import HashingEmbedder
from evipath.providers.llm import ScriptedLLM

CASE_STUDIES = {
    "cs-jillian": ("American", {"kg", "web"}),
    "cs-fury": ("Fury", {"kg", "wiki"}),
    "cs-vicksburg": ("Ulysses S. Grant", {"kg", "wiki", "web"}),
    "cs-mariner": ("Seattle Mariners", {"kg", "wiki", "web"}),
}


def toy_store(out: Path) -> Path:
    base = toy_dir()
    ingest(out, [("freebase", base / "freebase.tsv"), ("wikikg", base / "wikikg.tsv")],
           base / "docs.jsonl", base / "web.jsonl", base / "aliases.tsv")
    return out


def toy_items():
    return load_dataset(toy_dir() / "dataset.jsonl")


def toy_question(item_id: str) -> str:
    return next(i.question for i in toy_items() if i.id == item_id)


def toy_engine(store: Path, kg_completeness: float = 1.0, **cfg) -> Engine:
    config = EngineConfig(**cfg)
    stores = load_store(store, kg_completeness, config.seed)
    return Engine(stores, ScriptedLLM.from_file(toy_dir() / "transcript.jsonl"), HashingEmbedder(config.embed_dim),
                  config)


def ask(store: Path, item_id: str, **kw) -> tuple[AnswerRecord, Trace]:
    trace = Trace()
    return toy_engine(store, **kw).answer_question(toy_question(item_id), trace), trace


@dataclass
class ToyRun:
    report: EvalReport
    trace: Trace


def run_toy_eval(store: Path, kg_completeness: float = 1.0, **cfg) -> ToyRun:
    engine = toy_engine(store, kg_completeness, **cfg)
    trace = Trace()
    for item in toy_items():
        trace.emit("item", id=item.id, question=item.question, answers=item.answers)
        engine.answer_question(item.question, trace)
    return ToyRun(report_from_events(trace.events), trace)


def answer_events(trace: Trace) -> list[dict]:
    return [e for e in trace.events if e["event"] == "answer"]


def dumps(events) -> str:
    return "".join(json.dumps(e, sort_keys=True) + "\n" for e in events)
