"""Question-answering state machine.

``Engine.answer_question`` runs initialisation (source detection, question
analysis, source selection, question subgraph) and then up to four phases:

* initial: selected sources, structured search at the predicted depth;
* refined: a follow-up question and indicator, all available sources;
* predict: LLM-proposed answer entities appended to the topic list;
* final: union of earlier evidence, with a free-generation fallback.

Every phase prunes its paths and tries to answer; the first grounded ``{Yes}``
ends the run. All events go to a deterministic JSON-lines trace.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import IO

from .config import EngineConfig
from .kgstore import (
    KnowledgeGraph,
    Triple,
    cluster_and_reduce,
    detect_subgraph,
    fuse_graphs,
    normalize_label,
    sample_relation_per_edge,
)
from .pathfind import EvidencePath, enumerate_entity_paths
from .providers.embedding import Embedder
from .providers.llm import prompt_digest
from .providers.parsing import (
    QuestionAnalysis,
    order_topics,
    parse_evaluation,
    parse_generation,
    parse_predictions,
    parse_question_analysis,
    parse_refined,
    parse_skyline,
    parse_source_selection,
)
from .providers.prompts import PromptKind, format_path_list, render_prompt
from .scoring import PruneContext, make_path_scorer, prune
from .sources import (
    Document,
    EntityLinker,
    SearchProvider,
    SourceDetection,
    detect_available_sources,
    unstructured_retrieve,
    web_documents,
)

logger = logging.getLogger(__name__)

PHASES = ("initial", "refined", "predict", "final")
SOURCE_ORDER = ("kg", "wiki", "web")
_SOURCE_NAMES = {"kg": "KG", "wiki": "Wiki", "web": "Web"}
# weakest provenance first; a structured path is as trustworthy as its weakest step
_PROVENANCE_RANK = {"web": 0, "wiki": 1}

__all__ = ["AnswerRecord", "Engine", "PhaseState", "QuestionAnalysis", "Stores", "Trace"]


@dataclass
class Stores:
    graphs: dict[str, KnowledgeGraph] = field(default_factory=dict)
    docs: list[Document] = field(default_factory=list)
    search: SearchProvider | None = None


@dataclass
class PhaseState:
    phase: str
    paths: list[EvidencePath] = field(default_factory=list)
    sources_used: set[str] = field(default_factory=set)
    retrieved: int = 0
    new_question: str | None = None
    new_indicator: str | None = None
    predictions: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class AnswerRecord:
    answer: str
    supporting_paths: list[EvidencePath]
    verified_by: set[str]
    phase: str
    fallback: bool = False

    def to_dict(self) -> dict:
        return {
            "answer": self.answer,
            "phase": self.phase,
            "fallback": self.fallback,
            "verified_by": sorted(self.verified_by),
            "supporting_paths": [_path_dict(p) for p in self.supporting_paths],
        }


def _path_dict(p: EvidencePath) -> dict:
    out = {"text": p.text, "source": p.source}
    if p.scores is not None:
        s = p.scores
        out["scores"] = {"s_rel": round(s.s_rel, 6), "s_ver": round(s.s_ver, 6), "s_llm": round(s.s_llm, 6),
                         "cross": round(s.cross, 6), "f1": round(s.f1, 6), "f2": round(s.f2, 6),
                         "f3": round(s.f3, 6), "supp": sorted(s.supp)}
    return out


def verified_sources(paths: Iterable[EvidencePath]) -> set[str]:
    out: set[str] = set()
    for p in paths:
        out.add(p.source)
        if p.scores is not None:
            out |= set(p.scores.supp)
    return out


class Trace:
    """Ordered event log; optionally mirrored line by line to ``sink``."""

    def __init__(self, sink: IO[str] | None = None):
        self.events: list[dict] = []
        self.sink = sink

    def emit(self, event: str, **data) -> None:
        rec = {"event": event, **data}
        self.events.append(rec)
        if self.sink is not None:
            self.sink.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")

    def llm_calls(self) -> int:
        return sum(1 for e in self.events if e["event"] == "llm_call")

    def dumps(self) -> str:
        return "".join(json.dumps(e, sort_keys=True, ensure_ascii=False) + "\n" for e in self.events)


class _TracedLLM:
    def __init__(self, inner, trace: Trace):
        self.inner = inner
        self.trace = trace
        self.calls = 0

    def complete(self, prompt: str, *, kind: str, temperature: float, max_tokens: int) -> str:
        raw = self.inner.complete(prompt, kind=kind, temperature=temperature, max_tokens=max_tokens)
        self.calls += 1
        self.trace.emit("llm_call", kind=kind, digest=prompt_digest(prompt), prompt_chars=len(prompt),
                        response_chars=len(raw), temperature=temperature)
        return raw


@dataclass
class _Session:
    question: str
    llm: _TracedLLM
    detection: SourceDetection | None = None
    gq: KnowledgeGraph | None = None
    kg_entities: frozenset[str] = frozenset()
    canonical: dict[str, str] = field(default_factory=dict)
    topics: dict[str, str] = field(default_factory=dict)  # id -> label, detection order
    analysis: QuestionAnalysis | None = None
    available: set[str] = field(default_factory=set)
    selected: set[str] = field(default_factory=set)
    linker: EntityLinker | None = None
    gq_linker: EntityLinker | None = None
    web_cache: dict[str, list[Document]] = field(default_factory=dict)


class Engine:
    """Answers questions over a set of stores with pluggable providers.

    Args:
        stores: per-source knowledge graphs (in canonical-id priority order),
            documents and an optional search provider.
        llm: object with ``complete(prompt, kind=, temperature=, max_tokens=)``.
        embedder: embedding backend shared by linking and scoring.
        cfg: engine configuration.
    """

    def __init__(self, stores: Stores, llm, embedder: Embedder, cfg: EngineConfig | None = None):
        self.stores = stores
        self.llm = llm
        self.embedder = embedder
        self.cfg = cfg or EngineConfig()
        self.pcfg = self.cfg.prune_config()
        self.linkers = {name: EntityLinker.from_graph(g, embedder, self.cfg.entity_match)
                        for name, g in stores.graphs.items() if not g.is_empty()}

    # -- top level ---------------------------------------------------------
    def answer_question(self, question: str, trace: Trace | None = None) -> AnswerRecord:
        if not question.strip():
            raise ValueError("question must be nonempty")
        trace = trace if trace is not None else Trace()
        s = _Session(question, _TracedLLM(self.llm, trace))
        trace.emit("question", question=question, mode=self.cfg.mode, seed=self.cfg.seed)
        self.initialize(s, trace)
        history: list[EvidencePath] = []
        state: PhaseState | None = None
        for phase in PHASES[:-1]:
            state = self.run_phase(phase, s, trace, history, state)
            if isinstance(state, AnswerRecord):
                return self._finish(state, s, trace)
            history.extend(state.paths)
        return self._finish(self._final(s, trace, history), s, trace)

    def _finish(self, rec: AnswerRecord, s: _Session, trace: Trace) -> AnswerRecord:
        trace.emit("answer", **rec.to_dict(), llm_calls=s.llm.calls)
        return rec

    # -- initialisation ----------------------------------------------------
    def initialize(self, s: _Session, trace: Trace) -> None:
        cfg = self.cfg
        det = detect_available_sources(s.question, s.llm, self.embedder, self.linkers, self.stores.docs,
                                       threshold=cfg.entity_match, temperature=cfg.temperature_decide,
                                       max_tokens=cfg.max_tokens)
        s.detection = det
        trace.emit("detection", mentions=det.mentions, available=sorted(det.available),
                   topics={k: sorted(v) for k, v in sorted(det.topics.items())})
        self._build_subgraph(s, trace)
        s.available = set(det.available)
        if s.gq is None:
            s.available.discard("kg")

        labels = self._topic_labels(s)
        s.topics = labels
        s.linker = self._text_linker(s)
        qa_raw = s.llm.complete(
            render_prompt(PromptKind.QUESTION_ANALYSIS, {
                "Query": s.question,
                "Topic Entity": ", ".join("{" + v + "}" for v in labels.values()) or "(none)"}),
            kind=PromptKind.QUESTION_ANALYSIS.value, temperature=cfg.temperature_decide,
            max_tokens=cfg.max_tokens)
        s.analysis = parse_question_analysis(qa_raw, s.question, labels, cfg.d_max)
        a = s.analysis
        trace.emit("analysis", topics_ordered=a.topics_ordered, split_questions=a.split_questions,
                   skyline=a.indicator, d_predict=a.d_predict, fallback=a.fallback)

        provided = ", ".join(_SOURCE_NAMES[k] for k in SOURCE_ORDER if k in s.available)
        analysis_text = "\n".join([*a.split_questions, f"Skyline Indicator: {a.indicator}"])
        sel_raw = s.llm.complete(
            render_prompt(PromptKind.SOURCE_SELECT, {"Query": s.question, "Provided sources": provided,
                                                     "Question analysis": analysis_text}),
            kind=PromptKind.SOURCE_SELECT.value, temperature=cfg.temperature_decide, max_tokens=cfg.max_tokens)
        chosen = parse_source_selection(sel_raw)
        s.selected = chosen & s.available or set(s.available)
        trace.emit("sources", available=sorted(s.available), chosen=sorted(chosen), selected=sorted(s.selected))

    def _build_subgraph(self, s: _Session, trace: Trace) -> None:
        cfg = self.cfg
        parts = []
        for name, g in self.stores.graphs.items():
            ids = list(s.detection.topics.get(name, {}))
            if ids:
                sub = detect_subgraph(g, ids, cfg.d_max)
                if not sub.is_empty():
                    parts.append(sub)
        if not parts:
            trace.emit("subgraph", parts=[], entities=0, triples=0)
            return
        fused = fuse_graphs(parts, cfg.entity_match, self.embedder)
        s.canonical = dict(fused.canonical)
        topic_ids = list(dict.fromkeys(
            s.canonical.get(eid, eid) for name in self.stores.graphs
            for eid in s.detection.topics.get(name, {})))
        reduced = cluster_and_reduce(fused, topic_ids, cfg.d_max)
        if cfg.mode == "hydra-e":
            reduced = sample_relation_per_edge(reduced, cfg.seed)
        s.gq = reduced
        s.kg_entities = frozenset(reduced.entities)
        s.gq_linker = EntityLinker.from_graph(reduced, self.embedder, cfg.entity_match)
        trace.emit("subgraph", parts=[{"entities": len(p.entities), "triples": len(p)} for p in parts],
                   fused_entities=len(fused.entities), entities=len(reduced.entities), triples=len(reduced))

    def _topic_labels(self, s: _Session) -> dict[str, str]:
        """Topic(q): per mention, the KG match, else the document owner, else the mention itself."""
        det = s.detection
        out: dict[str, str] = {}
        for m in det.mentions:
            eid = label = None
            for name in self.stores.graphs:
                hit = det.links.get(name, {}).get(m)
                if hit is not None and s.gq is not None:
                    eid = s.canonical.get(hit, hit)
                    label = s.gq.label(eid)
                    break
            if eid is None and m in det.links.get("wiki", {}):
                hit = det.links["wiki"][m]
                eid = s.canonical.get(hit, hit)
                label = det.topics["wiki"][hit]
            if eid is None:
                eid, label = "~" + normalize_label(m), m
            out.setdefault(eid, label)
        return out

    def _text_linker(self, s: _Session) -> EntityLinker:
        entries: list[tuple[str, str, Iterable[str]]] = []
        if s.gq is not None:
            entries.extend((e.id, e.label, sorted(e.aliases)) for e in s.gq.entities.values())
        entries.extend((eid, lab, ()) for eid, lab in s.topics.items())
        for d in self.stores.docs:
            if d.entity:
                entries.append((s.canonical.get(d.entity, d.entity), d.title, ()))
        return EntityLinker(entries, self.embedder, self.cfg.entity_match)

    # -- retrieval helpers -------------------------------------------------
    def _docs_for(self, s: _Session, ids: Iterable[str], names: Iterable[str] = ()) -> list[Document]:
        wanted = set(ids)
        wanted_names = {normalize_label(n) for n in names}
        out = []
        for d in self.stores.docs:
            owner = s.canonical.get(d.entity, d.entity)
            if owner in wanted or normalize_label(d.title) in wanted_names:
                out.append(d)
        return out

    def _text_paths(self, s: _Session, sources: set[str], question: str, indicator: str,
                    topics: Mapping[str, str], doc_ids: Iterable[str], doc_names: Iterable[str] = ()
                    ) -> dict[str, list[EvidencePath]]:
        cfg = self.cfg
        a = s.analysis
        out: dict[str, list[EvidencePath]] = {"wiki": [], "web": []}
        if "wiki" in sources:
            docs = self._docs_for(s, doc_ids, doc_names)
            if docs:
                out["wiki"] = unstructured_retrieve(
                    docs, indicator, topics, cfg.w_max, self.embedder, s.llm, question=s.question,
                    linker=s.linker, temperature=cfg.temperature_explore, max_tokens=cfg.max_tokens)
        if "web" in sources and self.stores.search is not None:
            if question not in s.web_cache:
                s.web_cache[question] = web_documents(question, indicator, a.split_questions, cfg.w_max,
                                                      self.stores.search, s.llm, max_tokens=cfg.max_tokens)
            docs = s.web_cache[question]
            if docs:
                out["web"] = unstructured_retrieve(
                    docs, indicator, topics, cfg.w_max, self.embedder, s.llm, question=s.question,
                    linker=s.linker, temperature=cfg.temperature_explore, max_tokens=cfg.max_tokens)
        return out

    def _structured(self, s: _Session, ordered: Sequence[str], depth: int, indicator: str,
                    pool: Sequence[EvidencePath], trace: Trace, *, min_length: int = 0,
                    max_length: int | None = None) -> list[EvidencePath]:
        if s.gq is None:
            return []
        present = [t for t in dict.fromkeys(ordered) if t in s.gq.entities]
        if not present:
            return []
        scorer = make_path_scorer(indicator, set(s.topics), set(s.kg_entities), pool, self.pcfg, self.embedder)
        stats: dict = {}
        paths = enumerate_entity_paths(s.gq, present, depth, self.cfg.w1, scorer, min_length=min_length,
                                       max_length=max_length, stats=stats)
        trace.emit("structured", topics=present, depth=depth, min_length=min_length, max_length=max_length,
                   found=len(paths), peak=stats.get("peak", 0))
        return [self._retag(s.gq, p) for p in paths]

    @staticmethod
    def _retag(g: KnowledgeGraph, p: EvidencePath) -> EvidencePath:
        """Structured paths over injected text edges take their weakest step's source."""
        weakest = None
        for st in p.steps:
            t = g.find(st.head, st.relation, st.tail)
            if t is not None and t.source in _PROVENANCE_RANK:
                if weakest is None or _PROVENANCE_RANK[t.source] < _PROVENANCE_RANK[weakest]:
                    weakest = t.source
        if weakest is None:
            return p
        return EvidencePath(p.steps, weakest, p.labels)

    def _prune_and_answer(self, s: _Session, phase: str, paths: list[EvidencePath], trace: Trace
                          ) -> tuple[list[EvidencePath], AnswerRecord | None]:
        a = s.analysis
        ctx = PruneContext(s.question, a.indicator, a.split_questions, frozenset(s.topics), s.kg_entities)
        res = prune(paths, ctx, self.pcfg, self.embedder, s.llm, temperature=self.cfg.temperature_decide,
                    max_tokens=self.cfg.max_tokens)
        trace.emit("prune", phase=phase, candidates=len(paths), stage1=len(res.stage1), stage2=len(res.stage2),
                   degraded=res.degraded, selected=[_path_dict(p) for p in res.selected])
        self._inject(s, res.selected, trace)
        return res.selected, self.answer_attempt(res.selected, s, phase, trace)

    def _inject(self, s: _Session, paths: Sequence[EvidencePath], trace: Trace) -> None:
        if s.gq is None:
            return
        extra = []
        for p in paths:
            if p.source in ("wiki", "web") and p.scores is not None and p.scores.cross >= self.cfg.injection:
                for st in p.steps:
                    t = Triple(st.head, st.relation, st.tail, p.source)
                    if t not in s.gq:
                        extra.append((t, p.label(st.head), p.label(st.tail)))
        if extra:
            s.gq = s.gq.with_triples(extra)
            trace.emit("inject", triples=len(extra))

    def _merge(self, kg: list[EvidencePath], text: Mapping[str, list[EvidencePath]]) -> list[EvidencePath]:
        merged: dict[tuple, EvidencePath] = {}
        for p in [*kg, *text.get("wiki", ()), *text.get("web", ())]:
            merged.setdefault(p.identity(), p)
        return list(merged.values())

    # -- phases ------------------------------------------------------------
    def run_phase(self, phase: str, s: _Session, trace: Trace, history: list[EvidencePath],
                  previous: PhaseState | None = None) -> PhaseState | AnswerRecord:
        """Retrieve, prune and try to answer for one exploration phase.

        Returns the phase state (pruned paths included) or the accepted answer.
        """
        a = s.analysis
        cfg = self.cfg
        state = PhaseState(phase)
        if phase == "initial":
            state.sources_used = set(s.selected)
            text = self._text_paths(s, state.sources_used, s.question, a.indicator, s.topics, s.topics)
            kg: list[EvidencePath] = []
            if "kg" in state.sources_used:
                depth = min(a.d_predict, cfg.d_max)
                k = len([t for t in a.topics_ordered if s.gq is not None and t in s.gq.entities]) or 1
                kg = self._structured(s, a.topics_ordered, depth, a.indicator, text["wiki"] + text["web"], trace,
                                      min_length=k * (depth - 1), max_length=k * depth)
        elif phase == "refined":
            state.sources_used = set(s.available)
            raw = s.llm.complete(render_prompt(PromptKind.REFINED_EXPLORATION, self._explore_slots(s, history)),
                                 kind=PromptKind.REFINED_EXPLORATION.value, temperature=cfg.temperature_explore,
                                 max_tokens=cfg.max_tokens)
            rq = parse_refined(raw, s.question, a.indicator)
            state.new_question, state.new_indicator = rq.question, rq.indicator
            topics_new = dict(s.topics)
            sky = parse_skyline(rq.indicator)
            for name in sky.entities() if sky else ():
                eid = s.linker.link(name)
                if eid is not None:
                    topics_new.setdefault(eid, s.linker.labels[eid])
            trace.emit("refined", question=rq.question, indicator=rq.indicator, topics=list(topics_new))
            text = self._text_paths(s, state.sources_used, rq.question, rq.indicator, topics_new, topics_new)
            kg = []
            if "kg" in state.sources_used:
                k = len(s.topics)
                kg = self._structured(s, a.topics_ordered, cfg.d_max, rq.indicator, text["wiki"] + text["web"],
                                      trace, max_length=k * cfg.d_max)
        elif phase == "predict":
            state.sources_used = set(s.available)
            raw = s.llm.complete(render_prompt(PromptKind.PREDICT_EXPLORATION, self._explore_slots(s, history)),
                                 kind=PromptKind.PREDICT_EXPLORATION.value, temperature=cfg.temperature_explore,
                                 max_tokens=cfg.max_tokens)
            preds = parse_predictions(raw, a.indicator, cfg.predictions)
            state.predictions = [(p.entity, p.indicator) for p in preds]
            kg, text = [], {"wiki": [], "web": []}
            aligned = []
            for pred in preds:
                eid = s.gq_linker.link(pred.entity) if s.gq_linker is not None else None
                aligned.append(eid)
                list_p = dict(s.topics)
                if eid is not None:
                    list_p.setdefault(eid, s.gq.label(eid))
                ordered = order_topics(list_p, parse_skyline(pred.indicator))
                got = self._text_paths(s, state.sources_used, s.question, pred.indicator, list_p, list_p,
                                       [pred.entity])
                for key in text:
                    text[key].extend(got[key])
                if eid is not None and "kg" in state.sources_used:
                    kg.extend(self._structured(s, ordered, cfg.d_max, pred.indicator, got["wiki"] + got["web"],
                                               trace, max_length=len(s.topics) * cfg.d_max))
            trace.emit("predictions", items=[{"entity": p.entity, "indicator": p.indicator, "aligned": e}
                                             for p, e in zip(preds, aligned)])
        else:
            raise ValueError(f"unknown phase {phase!r}")

        paths = self._merge(kg, text)
        state.retrieved = len(paths)
        trace.emit("phase", phase=phase, sources=sorted(state.sources_used), retrieved=len(paths),
                   by_source={k: sum(1 for p in paths if p.source == k) for k in SOURCE_ORDER})
        if not paths:
            return state
        state.paths, rec = self._prune_and_answer(s, phase, paths, trace)
        return rec if rec is not None else state

    def _explore_slots(self, s: _Session, history: Sequence[EvidencePath]) -> dict[str, str]:
        a = s.analysis
        return {
            "Query": s.question,
            "Topic Entity": ", ".join("{" + v + "}" for v in s.topics.values()) or "(none)",
            "Skyline Indicator": a.indicator,
            "Split Question": "\n".join(a.split_questions),
            "Existing Knowledge Paths": format_path_list([p.text for p in history]),
        }

    def _final(self, s: _Session, trace: Trace, history: list[EvidencePath]) -> AnswerRecord:
        a = s.analysis
        trace.emit("phase", phase="final", sources=sorted(s.available), retrieved=len(history),
                   by_source={k: sum(1 for p in history if p.source == k) for k in SOURCE_ORDER})
        pruned: list[EvidencePath] = []
        if history:
            merged = list({p.identity(): p for p in history}.values())
            pruned, rec = self._prune_and_answer(s, "final", merged, trace)
            if rec is not None:
                return rec
        raw = s.llm.complete(
            render_prompt(PromptKind.COT_GENERATE, {
                "Query": s.question, "Skyline Indicator": a.indicator,
                "Split Question": "\n".join(a.split_questions),
                "Related Paths": format_path_list([p.text for p in pruned])}),
            kind=PromptKind.COT_GENERATE.value, temperature=self.cfg.temperature_decide,
            max_tokens=self.cfg.max_tokens)
        return AnswerRecord(parse_generation(raw), pruned, verified_sources(pruned), "final", fallback=True)

    # -- answering ---------------------------------------------------------
    def answer_attempt(self, paths: Sequence[EvidencePath], s: _Session, phase: str,
                       trace: Trace) -> AnswerRecord | None:
        """Summarise ``paths``, ask for a verdict and ground the answer in them."""
        if not paths:
            raise ValueError("paths must be nonempty")
        a = s.analysis
        cfg = self.cfg
        listing = format_path_list([p.text for p in paths])
        base = {"Query": s.question, "Skyline Indicator": a.indicator, "Split Question": "\n".join(a.split_questions)}
        summary = s.llm.complete(render_prompt(PromptKind.PATH_REFINE, {**base, "Related Paths": listing}),
                                 kind=PromptKind.PATH_REFINE.value, temperature=cfg.temperature_decide,
                                 max_tokens=cfg.max_tokens).strip()
        evidence = f"{summary}\n{listing}" if summary else listing
        raw = s.llm.complete(render_prompt(PromptKind.COT_EVALUATE, {**base, "Existing Knowledge Paths": evidence}),
                             kind=PromptKind.COT_EVALUATE.value, temperature=cfg.temperature_decide,
                             max_tokens=cfg.max_tokens)
        verdict = parse_evaluation(raw)
        trace.emit("evaluation", phase=phase, sufficient=verdict.sufficient, answer=verdict.answer,
                   malformed=verdict.malformed)
        if not verdict.sufficient or not verdict.answer:
            return None
        label = self._ground(verdict.answer, paths)
        if label is None:
            logger.warning("answer %r does not occur in the evidence paths; treating as {No}", verdict.answer)
            trace.emit("ungrounded", phase=phase, answer=verdict.answer)
            return None
        return AnswerRecord(label, list(paths), verified_sources(paths), phase, fallback=False)

    @staticmethod
    def _ground(answer: str, paths: Sequence[EvidencePath]) -> str | None:
        key = normalize_label(answer)
        for p in paths:
            for lab in p.node_labels():
                if normalize_label(lab) == key:
                    return lab
        return None
