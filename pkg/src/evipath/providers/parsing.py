"""Parsers for LLM responses.

Every parser reads only the answer region (text after the last ``A:`` marker
when one is present) and returns either a well-formed value or its documented
fallback, never a partial value.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from ..kgstore import normalize_label
from ..pathfind import find_bracketed_paths, parse_path_text

logger = logging.getLogger(__name__)

ACTION_SOURCES = {"action1": "kg", "action2": "wiki", "action3": "web"}

_A_MARKER_RE = re.compile(r"(?:^|\n)\s*A:")
_DASH_SPLIT_RE = re.compile(r"\s+[-–—]+\s+|\s*(?:->|→|–|—)\s*")
_QUOTED_RE = re.compile(r'^\s*["“”\'‘’](.+?)["“”\'‘’]\s*$')
_ANSWER_RE = re.compile(r"^\s*answer\s*(?:\((.*)\))?\s*$", re.IGNORECASE)
_SPLIT_Q_RE = re.compile(r"split[_ ]?question\s*\d*\s*[:：]\s*(.+)", re.IGNORECASE)
_SKYLINE_RE = re.compile(r"(?:skyline(?:\s+indicator)?|indicator|chain)\s*\d*\s*[:：]\s*(.+)", re.IGNORECASE)
_BRACES_RE = re.compile(r"\{([^{}]+)\}")


def answer_region(raw: str) -> str:
    """Text after the last ``A:`` line marker, or all of ``raw``."""
    last = None
    for m in _A_MARKER_RE.finditer(raw):
        last = m
    return raw[last.end():].strip() if last else raw.strip()


# -- skyline indicator -------------------------------------------------------

@dataclass(frozen=True)
class SkylineSlot:
    kind: str  # "entity" | "relation" | "answer" | "placeholder"
    text: str


@dataclass(frozen=True)
class Skyline:
    slots: tuple[SkylineSlot, ...]
    raw: str = ""

    def nodes(self) -> list[SkylineSlot]:
        return list(self.slots[::2])

    def entities(self) -> list[str]:
        return [s.text for s in self.nodes() if s.kind == "entity"]

    def render(self) -> str:
        parts = []
        for s in self.slots:
            if s.kind == "entity":
                parts.append(f'"{s.text}"')
            elif s.kind == "answer":
                parts.append(f"answer({s.text})" if s.text else "answer")
            else:
                parts.append(s.text)
        return " – ".join(parts)

    def __str__(self) -> str:
        return self.raw or self.render()


def parse_skyline(text: str) -> Skyline | None:
    """Parse an alternating ``node – relation – node ...`` chain.

    Nodes are quoted entities, an ``answer(...)`` marker or unquoted
    placeholders. Returns None when the text has no relation at all.
    """
    text = text.strip().strip(".")
    tokens = [t.strip() for t in _DASH_SPLIT_RE.split(text)]
    tokens = [t for t in tokens if t]
    if len(tokens) < 3 or len(tokens) % 2 == 0:
        return None
    slots: list[SkylineSlot] = []
    for i, tok in enumerate(tokens):
        if i % 2:
            slots.append(SkylineSlot("relation", tok))
            continue
        q = _QUOTED_RE.match(tok)
        a = _ANSWER_RE.match(tok)
        if q:
            slots.append(SkylineSlot("entity", q.group(1).strip()))
        elif a:
            slots.append(SkylineSlot("answer", (a.group(1) or "").strip()))
        else:
            slots.append(SkylineSlot("placeholder", tok))
    return Skyline(tuple(slots), text)


def _matches(name: str, label: str) -> bool:
    a, b = normalize_label(name), normalize_label(label)
    return bool(a) and bool(b) and (a == b or a in b or b in a)


def skyline_depth(sky: Skyline, topic_labels: Sequence[str] = ()) -> int | None:
    """Largest hop distance between the answer node and a topic node.

    Topic nodes are quoted entities matching ``topic_labels``; when none match,
    every quoted entity counts, and with no quoted entity at all the remaining
    unquoted nodes do. Without an explicit answer marker the first
    unquoted placeholder is taken as the answer. Returns None when the chain
    has no answer or no topic node.
    """
    nodes = sky.nodes()
    answer = next((i for i, s in enumerate(nodes) if s.kind == "answer"), None)
    if answer is None:
        answer = next((i for i, s in enumerate(nodes) if s.kind == "placeholder"), None)
    if answer is None:
        return None
    ents = [i for i, s in enumerate(nodes) if s.kind == "entity"]
    topical = [i for i in ents if any(_matches(nodes[i].text, t) for t in topic_labels)]
    # bare chains such as ``E1 – r – answer`` name their topics without quotes
    others = [i for i, s in enumerate(nodes) if s.kind == "placeholder" and i != answer]
    pos = topical or ents or others
    if not pos:
        return None
    return max(1, max(abs(answer - i) for i in pos))


# -- question analysis -------------------------------------------------------

@dataclass
class QuestionAnalysis:
    question: str
    topics_ordered: list[str]
    split_questions: list[str]
    skyline: Skyline | None
    d_predict: int
    fallback: bool = False

    @property
    def indicator(self) -> str:
        return str(self.skyline) if self.skyline else self.question


def order_topics(topics: Mapping[str, str], sky: Skyline | None) -> list[str]:
    """Topic ids sorted by first appearance in the skyline; unmatched keep input order."""
    ids = list(topics)
    if sky is None:
        return ids
    ents = sky.entities()

    def pos(tid: str) -> int:
        for i, name in enumerate(ents):
            if _matches(name, topics[tid]):
                return i
        return len(ents)

    return sorted(ids, key=lambda t: (pos(t), ids.index(t)))


def parse_question_analysis(raw: str, question: str, topics: Mapping[str, str], d_max: int
                            ) -> QuestionAnalysis:
    """Extract split questions, skyline and D_predict (clamped to ``d_max``).

    Args:
        raw: LLM response.
        question: the question being analysed.
        topics: topic entity id -> label, in detection order.
        d_max: upper bound for the predicted depth.
    """
    region = answer_region(raw or "")
    splits = [m.group(1).strip() for m in _SPLIT_Q_RE.finditer(region)]
    sky = None
    for line in region.splitlines():
        if _SPLIT_Q_RE.search(line):
            continue
        m = _SKYLINE_RE.search(line)
        if m:
            sky = parse_skyline(m.group(1))
            if sky:
                break
    depth = skyline_depth(sky, list(topics.values())) if sky else None
    if sky is None or depth is None:
        logger.warning("question analysis unparseable; using fallback analysis")
        return QuestionAnalysis(question, list(topics), [question], None, d_max, fallback=True)
    return QuestionAnalysis(question, order_topics(topics, sky), splits or [question], sky,
                            min(depth, d_max))


# -- other responses ---------------------------------------------------------

def parse_topic_mentions(raw: str) -> list[str]:
    """Entity names from a topic-extraction reply: braced items, else comma list."""
    region = answer_region(raw or "")
    region = re.sub(r"^\s*topic entit(?:y|ies)\s*[:：]", "", region, flags=re.IGNORECASE)
    found = [m.strip() for m in _BRACES_RE.findall(region)]
    if not found:
        first = region.splitlines()[0] if region.strip() else ""
        found = [x.strip(" .\"'") for x in re.split(r"[,;]", first)]
    return list(dict.fromkeys(x for x in found if x))


def parse_source_selection(raw: str) -> set[str]:
    """Map action tokens to source kinds; ``{web}`` when none is present."""
    tokens = re.findall(r"action\s*([123])", answer_region(raw or ""), flags=re.IGNORECASE)
    if not tokens:
        logger.warning("source selection has no action token; defaulting to web")
        return {"web"}
    return {ACTION_SOURCES[f"action{t}"] for t in tokens}


def parse_path_selection(raw: str, candidates: Sequence[str]) -> list[int]:
    """Zero-based candidate indices in the order the reply ranks them.

    Accepts ``Path k`` / ``Result k`` / ``Candidate k`` references and copied
    bracketed path texts. Returns [] when nothing usable is found.
    """
    region = answer_region(raw or "")
    hits: list[tuple[int, int]] = []
    for m in re.finditer(r"(?:path|result|candidate)\s*#?\s*(\d+)", region, flags=re.IGNORECASE):
        k = int(m.group(1)) - 1
        if 0 <= k < len(candidates):
            hits.append((m.start(), k))
    by_text = {t: i for i, t in reversed(list(enumerate(candidates)))}
    for m in re.finditer(r"\[[^\[\]]+\]", region):
        if m.group(0) in by_text:
            hits.append((m.start(), by_text[m.group(0)]))
    hits.sort()
    return list(dict.fromkeys(k for _, k in hits))


@dataclass
class TextPathGroup:
    paragraph: int
    paths: list[tuple[list[str], list[str]]] = field(default_factory=list)


def parse_paragraph_paths(raw: str, n_paragraphs: int) -> list[TextPathGroup]:
    """Bracketed paths grouped by ``Paragraph k:`` headers.

    Paths before any header go to paragraph 1. Malformed brackets are skipped.
    """
    region = answer_region(raw or "")
    groups = {k: TextPathGroup(k) for k in range(1, max(n_paragraphs, 1) + 1)}
    current = 1
    pieces = re.split(r"(?i)paragraph\s*(\d+)\s*[:：]", region)
    # pieces: [pre, num, text, num, text, ...]
    chunks = [(current, pieces[0])]
    for num, text in zip(pieces[1::2], pieces[2::2]):
        chunks.append((int(num), text))
    for k, text in chunks:
        if k not in groups:
            logger.warning("paragraph_to_path: reply mentions paragraph %d of %d", k, n_paragraphs)
            continue
        for span in find_bracketed_paths(text):
            try:
                groups[k].paths.append(parse_path_text(span))
            except ValueError:
                logger.warning("paragraph_to_path: skipping malformed path %r", span)
    return [groups[k] for k in sorted(groups)]


@dataclass
class RefinedQuery:
    question: str
    indicator: str
    fallback: bool = False


def parse_refined(raw: str, question: str, indicator: str) -> RefinedQuery:
    region = answer_region(raw or "")
    q = re.search(r"(?:new|follow[- ]up)\s+question\s*[:：]\s*(.+)", region, flags=re.IGNORECASE)
    ind = None
    for line in region.splitlines():
        m = _SKYLINE_RE.search(line)
        if m and parse_skyline(m.group(1)):
            ind = m.group(1).strip()
    if not q:
        logger.warning("refined exploration unparseable; reusing the original question")
        return RefinedQuery(question, indicator, fallback=True)
    return RefinedQuery(q.group(1).strip(), ind or indicator)


@dataclass(frozen=True)
class Prediction:
    entity: str
    indicator: str


def parse_predictions(raw: str, fallback_indicator: str, limit: int = 3) -> list[Prediction]:
    """``Prediction k: {name}`` items paired with ``Indicator k: ...`` chains."""
    region = answer_region(raw or "")
    names: dict[int, str] = {}
    chains: dict[int, str] = {}
    for m in re.finditer(r"prediction\s*(\d+)\s*[:：]\s*(.+)", region, flags=re.IGNORECASE):
        body = m.group(2).strip()
        b = _BRACES_RE.search(body)
        names.setdefault(int(m.group(1)), (b.group(1) if b else body).strip())
    for m in re.finditer(r"(?:indicator|chain)\s*(\d+)\s*[:：]\s*(.+)", region, flags=re.IGNORECASE):
        chains.setdefault(int(m.group(1)), m.group(2).strip())
    if not names:
        for i, name in enumerate(dict.fromkeys(_BRACES_RE.findall(region)), 1):
            names[i] = name.strip()
    out = [Prediction(names[k], chains.get(k, fallback_indicator)) for k in sorted(names) if names[k]]
    return out[:limit]


@dataclass(frozen=True)
class Verdict:
    sufficient: bool
    answer: str | None
    malformed: bool = False


def _extract_answer(region: str) -> str | None:
    m = re.search(r"answer\s*[:：]\s*(.+)", region, flags=re.IGNORECASE)
    if m:
        b = _BRACES_RE.search(m.group(1))
        text = b.group(1) if b else m.group(1).split("\n")[0]
        text = text.strip().strip(".").strip()
        if text:
            return text
    for name in _BRACES_RE.findall(region):
        if name.strip() not in ("Yes", "No"):
            return name.strip()
    return None


def parse_evaluation(raw: str) -> Verdict:
    """First ``{Yes}`` / ``{No}`` token decides; neither means ``{No}`` (malformed)."""
    region = answer_region(raw or "")
    yes, no = region.find("{Yes}"), region.find("{No}")
    if yes < 0 and no < 0:
        logger.warning("evaluation reply has no {Yes}/{No} token; treating as {No}")
        return Verdict(False, None, malformed=True)
    if yes >= 0 and (no < 0 or yes < no):
        rest = region[yes + len("{Yes}"):]
        return Verdict(True, _extract_answer(rest))
    return Verdict(False, None)


def parse_generation(raw: str) -> str:
    """Answer from a free generation; first nonempty line when no marker is given."""
    region = answer_region(raw or "")
    ans = _extract_answer(region)
    if ans:
        return ans
    for line in region.splitlines():
        if line.strip():
            return line.strip()
    return ""
