"""Entity-path enumeration over a knowledge graph.

An entity path over ordered topics ``[t1, ..., tk]`` is the concatenation of
simple segments ``t1 -> t2``, ``t2 -> t3`` ... . Each segment is found by a
bidirectional search in which both endpoints grow trees of at most ``depth``
hops that are joined on shared entities, so a segment is at most
``2 * depth`` long. With a single topic the path simply grows outward for up to
``depth`` hops. Edges are traversed in either direction; the stored direction is
kept on every step.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

from .kgstore import KnowledgeGraph, Triple, expand_one_hop

if TYPE_CHECKING:
    from .scoring import ScoreRecord

BRUTE_FORCE_LIMIT = 1000


class SearchGuardError(RuntimeError):
    """Graph too large for exhaustive enumeration."""


@dataclass(frozen=True)
class PathStep:
    head: str
    relation: str
    tail: str
    forward: bool = True

    @property
    def start(self) -> str:
        return self.head if self.forward else self.tail

    @property
    def end(self) -> str:
        return self.tail if self.forward else self.head

    def reversed(self) -> PathStep:
        return PathStep(self.head, self.relation, self.tail, not self.forward)


@dataclass
class EvidencePath:
    steps: tuple[PathStep, ...]
    source: str = "kg"
    labels: Mapping[str, str] = field(default_factory=dict)
    scores: ScoreRecord | None = None
    text: str = ""

    def __post_init__(self) -> None:
        self.steps = tuple(self.steps)
        for a, b in zip(self.steps, self.steps[1:]):
            if a.end != b.start:
                raise ValueError(f"disconnected steps: {a} then {b}")
        if not self.text and self.steps:
            self.text = serialize_path(self)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def length(self) -> int:
        return len(self.steps)

    def nodes(self) -> list[str]:
        if not self.steps:
            return []
        return [self.steps[0].start, *(s.end for s in self.steps)]

    def entities(self) -> set[str]:
        return set(self.nodes())

    def label(self, entity_id: str) -> str:
        return self.labels.get(entity_id, entity_id)

    def node_labels(self) -> list[str]:
        return [self.label(n) for n in self.nodes()]

    def identity(self) -> tuple:
        return (self.source, tuple((s.head, s.relation, s.tail, s.forward) for s in self.steps))

    def with_scores(self, scores: ScoreRecord) -> EvidencePath:
        return replace(self, scores=scores)


def serialize_path(p: EvidencePath) -> str:
    """``[{e0} - r1 - {e1} - r2 - {e2}]`` over traversal order, using labels."""
    if not p.steps:
        raise ValueError("cannot serialize an empty path")
    parts = ["{" + p.label(p.steps[0].start) + "}"]
    for s in p.steps:
        parts.append(s.relation)
        parts.append("{" + p.label(s.end) + "}")
    return "[" + " - ".join(parts) + "]"


_BRACKET_RE = re.compile(r"\[\s*(\{[^{}]*\}(?:\s*-\s*[^{}\[\]]*?\s*-\s*\{[^{}]*\})+)\s*\]")
_ENTITY_RE = re.compile(r"\{([^{}]*)\}")


def find_bracketed_paths(text: str) -> list[str]:
    """Every well-formed ``[{a} - r - {b} ...]`` span in ``text``."""
    return [m.group(0) for m in _BRACKET_RE.finditer(text)]


def parse_path_text(text: str) -> tuple[list[str], list[str]]:
    """Split a bracketed path into entity labels and relation labels.

    Raises:
        ValueError: when ``text`` is not a bracketed path with at least one hop.
    """
    m = _BRACKET_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"not a bracketed path: {text!r}")
    body = m.group(1)
    ents = [e.strip() for e in _ENTITY_RE.findall(body)]
    rels: list[str] = []
    spans = [x.span() for x in _ENTITY_RE.finditer(body)]
    for (_, end), (start, _) in zip(spans, spans[1:]):
        rel = body[end:start].strip()
        rel = re.sub(r"^-\s*|\s*-$", "", rel).strip()
        rels.append(rel)
    if len(ents) < 2 or any(not r for r in rels) or any(not e for e in ents):
        raise ValueError(f"malformed path: {text!r}")
    return ents, rels


def path_from_labels(entities: Sequence[str], relations: Sequence[str], source: str,
                     ids: Sequence[str] | None = None) -> EvidencePath:
    """Build a forward-only path from parallel label/relation lists."""
    ids = list(ids) if ids is not None else list(entities)
    labels = {}
    for i, lab in zip(ids, entities):
        labels.setdefault(i, lab)
    steps = tuple(PathStep(ids[i], relations[i], ids[i + 1]) for i in range(len(relations)))
    return EvidencePath(steps, source, labels)


def path_rank_key(score: float, p: EvidencePath) -> tuple:
    """Global tie-break: score desc, length asc, text asc, then step identity."""
    return (-score, p.length, p.text, p.identity())


# -- search -----------------------------------------------------------------

_Partial = tuple[PathStep, ...]  # traversal-ordered steps
Scorer = Callable[[EvidencePath], float]


def _step_from(t: Triple, at: str) -> PathStep:
    return PathStep(t.head, t.relation, t.tail, forward=(t.head == at))


def _nodes_of(start: str, steps: _Partial) -> list[str]:
    return [start, *(s.end for s in steps)]


def _labels_for(g: KnowledgeGraph, steps: Iterable[PathStep]) -> dict[str, str]:
    out: dict[str, str] = {}
    for s in steps:
        out[s.head] = g.label(s.head)
        out[s.tail] = g.label(s.tail)
    return out


class _Budget:
    def __init__(self, g: KnowledgeGraph, width: float, scorer: Scorer | None, source: str,
                 stats: dict | None):
        self.g = g
        self.width = width
        self.scorer = scorer
        self.source = source
        self.stats = stats
        self._score_cache: dict[_Partial, float] = {}

    def as_path(self, steps: _Partial) -> EvidencePath:
        return EvidencePath(steps, self.source, _labels_for(self.g, steps))

    def cut(self, items: list, steps_of: Callable[[object], _Partial]) -> list:
        """Keep the top-``width`` items by scorer under the global tie-break."""
        if len(items) > self.width:
            ranked = []
            for it in items:
                steps = steps_of(it)
                p = self.as_path(steps)
                if steps not in self._score_cache:
                    self._score_cache[steps] = self.scorer(p) if self.scorer else 0.0
                ranked.append((path_rank_key(self._score_cache[steps], p), it))
            ranked.sort(key=lambda x: x[0])
            items = [it for _, it in ranked[: int(self.width)]]
        self.note(len(items))
        return items

    def note(self, size: int) -> None:
        if self.stats is not None:
            self.stats["peak"] = max(self.stats.get("peak", 0), size)


def _grow_tree(g: KnowledgeGraph, root: str, depth: int, budget: _Budget) -> list[_Partial]:
    """Simple paths from ``root`` of 0..depth hops.

    Levels are expanded breadth-first; after each level the whole retained set
    (all lengths) is cut back to the width budget and only surviving
    newest-level paths are expanded further.
    """
    retained: list[_Partial] = []
    frontier: list[_Partial] = [()]
    for level in range(1, depth + 1):
        nxt: list[_Partial] = []
        for steps in frontier:
            nodes = _nodes_of(root, steps)
            here = nodes[-1]
            seen = set(nodes)
            for t in expand_one_hop(g, here):
                step = _step_from(t, here)
                if step.end not in seen:
                    nxt.append(steps + (step,))
        if not nxt:
            break
        retained = budget.cut(retained + nxt, lambda s: s)
        frontier = [p for p in retained if len(p) == level]
        if not frontier:
            break
    return [(), *retained]


def _segments(g: KnowledgeGraph, u: str, v: str, depth: int, budget: _Budget) -> list[_Partial]:
    """Simple u->v paths of length 1..2*depth via a meet-in-the-middle join."""
    fwd = _grow_tree(g, u, depth, budget)
    bwd = _grow_tree(g, v, depth, budget)
    by_end: dict[str, list[_Partial]] = {}
    for b in bwd:
        by_end.setdefault(_nodes_of(v, b)[-1], []).append(b)
    found: dict[_Partial, None] = {}
    for f in fwd:
        fnodes = _nodes_of(u, f)
        meet = fnodes[-1]
        fset = set(fnodes)
        for b in by_end.get(meet, ()):
            bnodes = _nodes_of(v, b)
            if fset.intersection(bnodes[:-1]):
                continue
            joined = f + tuple(s.reversed() for s in reversed(b))
            if joined:
                found[joined] = None
    return budget.cut(list(found), lambda s: s)


def enumerate_entity_paths(g: KnowledgeGraph, ordered_topics: Sequence[str], depth: int,
                           width: float = math.inf, scorer: Scorer | None = None, *,
                           min_length: int = 0, max_length: int | None = None,
                           source: str = "kg", stats: dict | None = None) -> list[EvidencePath]:
    """Entity paths visiting ``ordered_topics`` in order.

    Args:
        g: graph to search.
        ordered_topics: topic entity ids in skyline order.
        depth: hops each search tree may grow from its topic.
        width: retained partial paths per level / join; ``math.inf`` disables cuts.
        scorer: ranks partial paths when a cut is needed (higher is better).
        min_length: keep only paths strictly longer than this.
        max_length: keep only paths no longer than this; also bounds joins.
        stats: optional dict receiving ``peak`` (largest retained set).

    Returns:
        Paths sorted by the global tie-break (score desc when a scorer is given).
    """
    topics = list(dict.fromkeys(ordered_topics))
    if not topics:
        raise ValueError("ordered_topics must be nonempty")
    if depth < 1 or width < 1:
        raise ValueError("depth and width must be >= 1")
    missing = [t for t in topics if t not in g.entities]
    if missing:
        raise KeyError(f"topics not in graph: {missing}")
    budget = _Budget(g, width, scorer, source, stats)
    cap = max_length if max_length is not None else math.inf

    if len(topics) == 1:
        partials = [p for p in _grow_tree(g, topics[0], depth, budget) if 0 < len(p) <= cap]
    else:
        partials = [()]
        last = len(topics) - 2
        for i, (u, v) in enumerate(zip(topics, topics[1:])):
            segs = _segments(g, u, v, depth, budget)
            if not segs:
                return []
            floor = min_length if i == last else -1
            combined = {p + s: None for p in partials for s in segs if floor < len(p) + len(s) <= cap}
            partials = budget.cut(list(combined), lambda s: s)
            if not partials:
                return []
    kept = [budget.as_path(p) for p in partials if len(p) > min_length]
    scores = {p.identity(): (scorer(p) if scorer else 0.0) for p in kept}
    kept.sort(key=lambda p: path_rank_key(scores[p.identity()], p))
    if len(kept) > width:
        kept = kept[: int(width)]
    return kept


def brute_force_entity_paths(g: KnowledgeGraph, ordered_topics: Sequence[str], depth: int, *,
                             min_length: int = 0, max_length: int | None = None,
                             source: str = "kg") -> list[EvidencePath]:
    """Exhaustive forward enumeration of the same path family (test oracle)."""
    if len(g) > BRUTE_FORCE_LIMIT:
        raise SearchGuardError(f"{len(g)} triples exceeds brute-force limit {BRUTE_FORCE_LIMIT}")
    topics = list(dict.fromkeys(ordered_topics))
    if not topics or any(t not in g.entities for t in topics):
        return []
    cap = max_length if max_length is not None else math.inf
    seg_cap = depth if len(topics) == 1 else 2 * depth
    out: list[_Partial] = []

    def walk(here: str, steps: _Partial, nxt: int, seg_nodes: set[str], seg_len: int) -> None:
        if len(topics) == 1 and steps:
            out.append(steps)
        if seg_len == seg_cap or len(steps) == cap:
            return
        for t in g.triples():
            if here not in (t.head, t.tail):
                continue
            step = _step_from(t, here)
            there = step.end
            if there in seg_nodes:
                continue
            new = steps + (step,)
            if len(topics) > 1 and there == topics[nxt]:
                if nxt == len(topics) - 1:
                    out.append(new)
                else:
                    walk(there, new, nxt + 1, {there}, 0)
                continue
            walk(there, new, nxt, seg_nodes | {there}, seg_len + 1)

    walk(topics[0], (), 1, {topics[0]}, 0)
    unique = dict.fromkeys(p for p in out if min_length < len(p) <= cap)
    return [EvidencePath(p, source, _labels_for(g, p)) for p in unique]
