"""Evidence sources beyond the knowledge graph.

Covers topic-entity detection across sources, document and web fixtures,
sentence selection and the conversion of selected text into bracketed
knowledge paths through the LLM.
"""

from __future__ import annotations

import json
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .kgstore import KnowledgeGraph, normalize_label
from .pathfind import EvidencePath, path_from_labels
from .providers.embedding import Embedder, ProviderError, similarity
from .providers.parsing import parse_paragraph_paths, parse_path_selection, parse_topic_mentions
from .providers.prompts import PromptKind, format_path_list, format_paragraphs, render_prompt

logger = logging.getLogger(__name__)

_SENTENCE_END_RE = re.compile(r"(?<=[.!?])\s+")
MIN_SENTENCE_CHARS = 20


@dataclass(frozen=True)
class Document:
    entity: str
    title: str
    body: str
    origin: str = "wiki"

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise ValueError(f"document {self.title!r} has an empty body")


@dataclass(frozen=True)
class WebResult:
    title: str
    snippet: str
    url: str


def load_documents(path: str | Path, origin: str = "wiki") -> list[Document]:
    """Read ``{entity, title, body}`` JSON lines."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(Document(obj.get("entity", ""), obj["title"], obj["body"], origin))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad document: {exc}") from None
    return docs


class SearchProvider(Protocol):
    def search(self, query: str) -> list[WebResult]: ...

    def fetch(self, url: str) -> str | None: ...


class WebFixture:
    """Offline search provider backed by ``{query, results, pages}`` JSON lines.

    Queries are matched after label normalisation; unknown queries return no
    results.
    """

    def __init__(self, records: Iterable[Mapping] = ()):
        self.results: dict[str, list[WebResult]] = {}
        self.pages: dict[str, str] = {}
        for rec in records:
            key = normalize_label(rec["query"])
            self.results.setdefault(key, []).extend(
                WebResult(r["title"], r.get("snippet", ""), r["url"]) for r in rec.get("results", ()))
            self.pages.update(rec.get("pages", {}))

    @classmethod
    def from_file(cls, path: str | Path) -> WebFixture:
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    obj["query"]
                except (json.JSONDecodeError, KeyError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad web fixture: {exc}") from None
                records.append(obj)
        return cls(records)

    def search(self, query: str) -> list[WebResult]:
        return list(self.results.get(normalize_label(query), ()))

    def fetch(self, url: str) -> str | None:
        return self.pages.get(url)


# -- entity linking ----------------------------------------------------------

class EntityLinker:
    """Maps surface names to entity ids.

    Exact normalised label or alias matches win (earliest entity first);
    otherwise the entity whose label embedding is most similar is returned when
    that similarity reaches ``threshold``.
    """

    def __init__(self, entries: Iterable[tuple[str, str, Iterable[str]]], embedder: Embedder | None,
                 threshold: float = 0.85):
        self.ids: list[str] = []
        self.labels: dict[str, str] = {}
        self._names: dict[str, str] = {}
        for eid, label, aliases in entries:
            if eid in self.labels:
                continue
            self.ids.append(eid)
            self.labels[eid] = label
            for name in (label, *aliases):
                self._names.setdefault(normalize_label(name), eid)
        self.embedder = embedder
        self.threshold = threshold
        self._matrix: np.ndarray | None = None

    @classmethod
    def from_graph(cls, g: KnowledgeGraph, embedder: Embedder | None, threshold: float = 0.85) -> EntityLinker:
        return cls(((e.id, e.label, sorted(e.aliases)) for e in g.entities.values()), embedder, threshold)

    def __len__(self) -> int:
        return len(self.ids)

    def _unit_matrix(self) -> np.ndarray:
        if self._matrix is None:
            mat = np.stack([self.embedder.embed(self.labels[e]) for e in self.ids])
            norms = np.linalg.norm(mat, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            self._matrix = mat / norms
        return self._matrix

    def link(self, name: str) -> str | None:
        key = normalize_label(name)
        if not key:
            return None
        if key in self._names:
            return self._names[key]
        if self.embedder is None or not self.ids:
            return None
        v = self.embedder.embed(name)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            return None
        sims = self._unit_matrix() @ (v / n)
        if not getattr(self.embedder, "nonnegative", False):
            sims = (sims + 1.0) / 2.0
        best = int(np.argmax(sims))
        return self.ids[best] if sims[best] >= self.threshold - 1e-12 else None


@dataclass
class SourceDetection:
    available: set[str]
    topics: dict[str, dict[str, str]] = field(default_factory=dict)  # source -> id -> label
    mentions: list[str] = field(default_factory=list)
    links: dict[str, dict[str, str]] = field(default_factory=dict)  # source -> mention -> id


def detect_available_sources(question: str, llm, embedder: Embedder, linkers: Mapping[str, EntityLinker],
                             docs: Sequence[Document], *, threshold: float = 0.85, temperature: float = 0.0,
                             max_tokens: int = 256) -> SourceDetection:
    """Topic entities per source and the set of usable source kinds.

    ``linkers`` maps each KG source name to a linker over that graph. A KG
    source with a matched topic adds ``kg``; a matched document owner or title
    adds ``wiki``; ``web`` is always available.
    """
    raw = llm.complete(render_prompt(PromptKind.TOPIC_EXTRACT, {"Query": question}),
                       kind=PromptKind.TOPIC_EXTRACT.value, temperature=temperature, max_tokens=max_tokens)
    mentions = parse_topic_mentions(raw)
    topics: dict[str, dict[str, str]] = {}
    links: dict[str, dict[str, str]] = {}
    all_linkers = dict(linkers)
    if docs:
        all_linkers["wiki"] = EntityLinker(((d.entity or d.title, d.title, ()) for d in docs), embedder,
                                           threshold)
    for source, linker in all_linkers.items():
        found: dict[str, str] = {}
        for m in mentions:
            eid = linker.link(m)
            if eid is not None:
                found.setdefault(eid, linker.labels[eid])
                links.setdefault(source, {})[m] = eid
        if found:
            topics[source] = found
    topics["web"] = {m: m for m in mentions}
    available = {"web"}
    if any(s not in ("wiki", "web") for s in topics):
        available.add("kg")
    if "wiki" in topics:
        available.add("wiki")
    return SourceDetection(available, topics, mentions, links)


# -- text to paths -----------------------------------------------------------

def split_sentences(text: str, min_chars: int = MIN_SENTENCE_CHARS) -> list[str]:
    """Split after ``.``/``!``/``?`` + whitespace; fragments under ``min_chars`` merge forward."""
    out: list[str] = []
    carry = ""
    for piece in _SENTENCE_END_RE.split(text.strip()):
        piece = piece.strip()
        if not piece:
            continue
        piece = f"{carry} {piece}" if carry else piece
        if len(piece) < min_chars:
            carry = piece
            continue
        out.append(piece)
        carry = ""
    if carry:
        if out:
            out[-1] = f"{out[-1]} {carry}"
        else:
            out.append(carry)
    return out


def select_sentences(docs: Sequence[Document], indicator: str, w_max: int,
                     embedder: Embedder) -> list[tuple[str, Document]]:
    """Top-``w_max`` sentences by similarity to ``indicator`` (ties: shorter, then lexical)."""
    scored = []
    seen: set[str] = set()
    for doc in docs:
        for sent in split_sentences(doc.body):
            if sent in seen:
                continue
            seen.add(sent)
            scored.append((-similarity(embedder, indicator, sent), len(sent), sent, doc))
    scored.sort(key=lambda x: x[:3])
    return [(s, d) for _, _, s, d in scored[:w_max]]


def _text_entity_id(label: str, linker: EntityLinker | None) -> str:
    eid = linker.link(label) if linker is not None else None
    return eid if eid is not None else "~" + normalize_label(label)


def unstructured_retrieve(docs: Sequence[Document], indicator: str, topics: Mapping[str, str], w_max: int,
                          embedder: Embedder, llm, *, question: str, linker: EntityLinker | None = None,
                          require_topic: bool = True, temperature: float = 0.4,
                          max_tokens: int = 256) -> list[EvidencePath]:
    """Distil the best-matching sentences of ``docs`` into evidence paths.

    Args:
        docs: candidate documents; each path inherits its paragraph's origin.
        indicator: text used to rank sentences.
        topics: topic entity id -> label.
        w_max: number of sentences forwarded to the LLM.
        linker: maps path entity names onto graph ids; unlinked names get
            ``~``-prefixed ids.
        require_topic: drop a paragraph's paths when none contains a topic.
    """
    if not docs:
        raise ValueError("docs must be nonempty")
    picked = select_sentences(docs, indicator, w_max, embedder)
    if not picked:
        return []
    topic_names = {normalize_label(v) for v in topics.values()}
    prompt = render_prompt(PromptKind.PARAGRAPH_TO_PATH, {
        "Query": question,
        "Topic Entity": ", ".join("{" + v + "}" for v in topics.values()),
        "Skyline Indicator": indicator,
        "Paragraphs": format_paragraphs([s for s, _ in picked]),
    })
    raw = llm.complete(prompt, kind=PromptKind.PARAGRAPH_TO_PATH.value, temperature=temperature,
                       max_tokens=max_tokens)
    out: list[EvidencePath] = []
    seen: set[tuple] = set()
    for group in parse_paragraph_paths(raw, len(picked)):
        if not group.paths:
            continue
        origin = picked[group.paragraph - 1][1].origin
        built = []
        for ents, rels in group.paths:
            ids = [_text_entity_id(e, linker) for e in ents]
            try:
                built.append(path_from_labels(ents, rels, origin, ids))
            except ValueError as exc:
                logger.warning("skipping text path %s: %s", ents, exc)
        has_topic = any(
            (p.entities() & set(topics)) or any(normalize_label(lab) in topic_names for lab in p.node_labels())
            for p in built)
        if require_topic and not has_topic:
            logger.warning("paragraph %d: no path contains a topic entity; dropping %d paths",
                           group.paragraph, len(built))
            continue
        for p in built:
            if p.identity() not in seen:
                seen.add(p.identity())
                out.append(p)
    return out


def web_documents(question: str, indicator: str, split_questions: Sequence[str], w_max: int,
                  search: SearchProvider, llm, *, max_tokens: int = 256) -> list[Document]:
    """Search, let the LLM choose ``w_max`` results, and fetch their bodies.

    Returns [] when the provider fails or finds nothing. Results missing a page
    body fall back to their snippet.
    """
    try:
        results = search.search(question)
    except ProviderError as exc:
        logger.warning("web search unavailable: %s", exc)
        return []
    unique: dict[str, WebResult] = {}
    for r in results:
        if r.url and r.url not in unique:
            unique[r.url] = r
    results = list(unique.values())
    if not results:
        return []
    listing = [f"{r.title} | {r.snippet} | {r.url}" for r in results]
    prompt = render_prompt(PromptKind.PATH_SELECT, {
        "Query": question,
        "Skyline Indicator": indicator,
        "Split Question": "\n".join(split_questions) or question,
        "Candidate Paths": format_path_list(listing, prefix="Result"),
    })
    raw = llm.complete(prompt, kind=PromptKind.PATH_SELECT.value, temperature=0.0, max_tokens=max_tokens)
    order = parse_path_selection(raw, listing)
    if not order:
        logger.warning("web result selection unparseable; taking the first %d results", w_max)
        order = list(range(len(results)))
    docs = []
    for idx in order[:w_max]:
        r = results[idx]
        try:
            body = search.fetch(r.url)
        except ProviderError as exc:
            logger.warning("fetch failed for %s: %s", r.url, exc)
            body = None
        body = body or r.snippet
        if body and body.strip():
            docs.append(Document("", r.title, body, "web"))
    return docs


def web_retrieve(question: str, indicator: str, w_max: int, search: SearchProvider, embedder: Embedder, llm,
                 *, topics: Mapping[str, str], split_questions: Sequence[str] = (),
                 linker: EntityLinker | None = None, temperature: float = 0.4,
                 max_tokens: int = 256) -> list[EvidencePath]:
    """Web search followed by the same distillation as documents (origin ``web``)."""
    docs = web_documents(question, indicator, split_questions, w_max, search, llm, max_tokens=max_tokens)
    if not docs:
        return []
    return unstructured_retrieve(docs, indicator, topics, w_max, embedder, llm, question=question,
                                 linker=linker, temperature=temperature, max_tokens=max_tokens)
