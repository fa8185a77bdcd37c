"""Provenance-tagged triple store.

Holds the per-source knowledge graphs and the per-question subgraph: neighbourhood
expansion, subgraph detection, cross-source entity fusion, relation clustering,
graph reduction and the single-relation sampling used by the ``hydra-e`` mode.
"""

from __future__ import annotations

import logging
import random
import re
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

class TripleFileError(ValueError):
    """Malformed line in a triple file."""


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str
    source: str = "kg"

    def __post_init__(self) -> None:
        if not self.head or not self.tail or not self.relation:
            raise ValueError(f"triple fields must be nonempty: {self!r}")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.head, self.relation, self.tail)


@dataclass
class Entity:
    id: str
    label: str
    aliases: set[str] = field(default_factory=set)
    sources: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        if not self.label:
            self.label = self.id


def normalize_label(text: str) -> str:
    """Case-fold, trim and collapse internal whitespace."""
    return re.sub(r"\s+", " ", text.casefold()).strip()


class KnowledgeGraph:
    """Triples indexed by head and tail.

    Triples are unique on ``(head, relation, tail)``; the first source that
    contributes a fact keeps its provenance tag. Iteration order is insertion
    order everywhere.
    """

    def __init__(self) -> None:
        self.entities: dict[str, Entity] = {}
        self.by_head: dict[str, list[Triple]] = {}
        self.by_tail: dict[str, list[Triple]] = {}
        self.edge_groups: dict[tuple[str, str], set[str]] = {}
        self._order: dict[tuple[str, str, str], int] = {}
        self._triples: dict[tuple[str, str, str], Triple] = {}
        # old id -> canonical id, filled by fuse_graphs
        self.canonical: dict[str, str] = {}

    # -- construction -----------------------------------------------------
    def add_entity(self, entity_id: str, label: str | None = None, source: str | None = None,
                   aliases: Iterable[str] = ()) -> Entity:
        ent = self.entities.get(entity_id)
        if ent is None:
            ent = Entity(entity_id, label or entity_id)
            self.entities[entity_id] = ent
        elif label and ent.label == ent.id:
            ent.label = label
        if source:
            ent.sources.add(source)
        for alias in aliases:
            if alias and alias != ent.label:
                ent.aliases.add(alias)
        return ent

    def add_triple(self, triple: Triple, head_label: str | None = None,
                   tail_label: str | None = None) -> bool:
        """Insert ``triple``; returns False when an equal fact is already stored."""
        self.add_entity(triple.head, head_label, triple.source)
        self.add_entity(triple.tail, tail_label, triple.source)
        if triple.key in self._triples:
            return False
        self._order[triple.key] = len(self._order)
        self._triples[triple.key] = triple
        self.by_head.setdefault(triple.head, []).append(triple)
        self.by_tail.setdefault(triple.tail, []).append(triple)
        return True

    # -- queries ----------------------------------------------------------
    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: object) -> bool:
        return isinstance(triple, Triple) and triple.key in self._triples

    def find(self, head: str, relation: str, tail: str) -> Triple | None:
        return self._triples.get((head, relation, tail))

    def triples(self) -> list[Triple]:
        return list(self._triples.values())

    def is_empty(self) -> bool:
        return not self._triples

    def label(self, entity_id: str) -> str:
        ent = self.entities.get(entity_id)
        return ent.label if ent else entity_id

    def neighbors(self, entity_id: str) -> set[str]:
        out = {t.tail for t in self.by_head.get(entity_id, ())}
        out.update(t.head for t in self.by_tail.get(entity_id, ()))
        return out

    def check_indexes(self) -> None:
        """Raise AssertionError if the head/tail indexes disagree with storage."""
        heads = sum(len(v) for v in self.by_head.values())
        tails = sum(len(v) for v in self.by_tail.values())
        assert heads == tails == len(self._triples), (heads, tails, len(self._triples))
        for t in self._triples.values():
            assert t in self.by_head[t.head] and t in self.by_tail[t.tail], t
        if self.edge_groups:
            grouped: dict[tuple[str, str], set[str]] = {}
            for t in self._triples.values():
                grouped.setdefault((t.head, t.tail), set()).add(t.relation)
            assert grouped == self.edge_groups

    def copy(self) -> KnowledgeGraph:
        g = KnowledgeGraph()
        for ent in self.entities.values():
            g.entities[ent.id] = Entity(ent.id, ent.label, set(ent.aliases), set(ent.sources))
        for t in self.triples():
            g.add_triple(t)
        g.edge_groups = {k: set(v) for k, v in self.edge_groups.items()}
        g.canonical = dict(self.canonical)
        return g

    def with_triples(self, extra: Iterable[tuple[Triple, str, str]]) -> KnowledgeGraph:
        """New graph holding this graph's facts plus ``(triple, head_label, tail_label)`` items."""
        g = self.copy()
        for triple, hl, tl in extra:
            g.add_triple(triple, hl, tl)
        if g.edge_groups:
            g.edge_groups = _group_edges(g)
        return g


def expand_one_hop(g: KnowledgeGraph, entity_id: str) -> list[Triple]:
    """All triples touching ``entity_id``, once each, in insertion order."""
    if entity_id not in g.entities:
        logger.warning("expand_one_hop: unknown entity %r", entity_id)
        return []
    seen: dict[tuple[str, str, str], Triple] = {}
    for t in g.by_head.get(entity_id, ()):
        seen[t.key] = t
    for t in g.by_tail.get(entity_id, ()):
        seen.setdefault(t.key, t)
    return sorted(seen.values(), key=lambda t: g._order[t.key])


def hop_distances(g: KnowledgeGraph, starts: Iterable[str], limit: int | None = None) -> dict[str, int]:
    """Undirected BFS distances from the nearest of ``starts`` (absent ids skipped)."""
    dist: dict[str, int] = {}
    queue: deque[str] = deque()
    for s in starts:
        if s in g.entities and s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for v in sorted(g.neighbors(u), key=str):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _subgraph_from(g: KnowledgeGraph, keep: Iterable[Triple], entities: Iterable[str]) -> KnowledgeGraph:
    sub = KnowledgeGraph()
    for eid in entities:
        ent = g.entities[eid]
        sub.entities[eid] = Entity(ent.id, ent.label, set(ent.aliases), set(ent.sources))
    for t in sorted(keep, key=lambda t: g._order[t.key]):
        for eid in (t.head, t.tail):
            if eid not in sub.entities:
                ent = g.entities[eid]
                sub.entities[eid] = Entity(ent.id, ent.label, set(ent.aliases), set(ent.sources))
        sub.add_triple(t)
    sub.canonical = dict(g.canonical)
    return sub


def detect_subgraph(g: KnowledgeGraph, topics: Sequence[str], d_max: int) -> KnowledgeGraph:
    """Triples reachable within ``d_max`` undirected hops of any topic entity.

    A triple qualifies when one of its endpoints is at most ``d_max - 1`` hops
    from a topic. An empty result means no topic entity exists in ``g``.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if not topics:
        raise ValueError("topics must be nonempty")
    present = [t for t in topics if t in g.entities]
    if not present:
        logger.warning("detect_subgraph: none of %s found", list(topics))
        return KnowledgeGraph()
    dist = hop_distances(g, present, limit=d_max - 1)
    keep: dict[tuple[str, str, str], Triple] = {}
    for eid, d in dist.items():
        if d <= d_max - 1:
            for t in expand_one_hop(g, eid):
                keep[t.key] = t
    return _subgraph_from(g, keep.values(), present)


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}
        self.rank = {x: i for i, x in enumerate(self.parent)}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # earliest-seen root wins so canonical ids follow source order
        if self.rank[rb] < self.rank[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra


def fuse_graphs(parts: Sequence[KnowledgeGraph], match_threshold: float = 0.85,
                embedder=None) -> KnowledgeGraph:
    """Merge per-source graphs into one, unifying co-referent entities.

    Entities from *different* parts are merged when their normalised labels are
    equal, when one's label or alias equals one of the other's aliases, or when
    the embedding cosine of their labels reaches ``match_threshold``. Ids shared
    verbatim across parts always denote the same entity. The first-seen id
    (by part order) becomes canonical.
    """
    if not parts:
        raise ValueError("parts must be nonempty")
    order: list[str] = []
    owner: dict[str, int] = {}
    info: dict[str, Entity] = {}
    for i, part in enumerate(parts):
        for ent in part.entities.values():
            if ent.id not in info:
                order.append(ent.id)
                owner[ent.id] = i
                info[ent.id] = Entity(ent.id, ent.label, set(ent.aliases), set(ent.sources))
            else:
                merged = info[ent.id]
                merged.aliases |= ent.aliases | ({ent.label} - {merged.label})
                merged.sources |= ent.sources
    uf = _UnionFind(order)

    names: dict[str, set[str]] = {
        eid: {normalize_label(info[eid].label)} | {normalize_label(a) for a in info[eid].aliases}
        for eid in order
    }
    by_name: dict[str, list[str]] = {}
    for eid in order:
        for name in names[eid]:
            by_name.setdefault(name, []).append(eid)
    for ids in by_name.values():
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if owner[a] != owner[b]:
                    uf.union(a, b)

    if embedder is not None and len(parts) > 1 and len(order) > 1:
        mat = np.stack([embedder.embed(info[eid].label) for eid in order])
        norms = np.linalg.norm(mat, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        unit = mat / norms
        sims = unit @ unit.T
        if not getattr(embedder, "nonnegative", False):
            sims = (sims + 1.0) / 2.0
        owners = np.array([owner[eid] for eid in order])
        ii, jj = np.nonzero(np.triu(sims >= match_threshold - 1e-12, k=1) & (owners[:, None] != owners[None, :]))
        for i, j in zip(ii.tolist(), jj.tolist()):
            uf.union(order[i], order[j])

    fused = KnowledgeGraph()
    for eid in order:
        root = uf.find(eid)
        fused.canonical[eid] = root
        src = info[eid]
        if root not in fused.entities:
            fused.entities[root] = Entity(root, info[root].label, set(), set())
        ent = fused.entities[root]
        ent.sources |= src.sources
        ent.aliases |= ({src.label} | src.aliases) - {ent.label}
    for part in parts:
        for old, new in part.canonical.items():
            fused.canonical.setdefault(old, fused.canonical.get(new, new))
        for t in part.triples():
            fused.add_triple(Triple(fused.canonical[t.head], t.relation, fused.canonical[t.tail], t.source))
    return fused


def _group_edges(g: KnowledgeGraph) -> dict[tuple[str, str], set[str]]:
    groups: dict[tuple[str, str], set[str]] = {}
    for t in g.triples():
        groups.setdefault((t.head, t.tail), set()).add(t.relation)
    return groups


def cluster_and_reduce(g: KnowledgeGraph, topics: Sequence[str], d_max: int) -> KnowledgeGraph:
    """Group parallel relations per ordered (head, tail) pair and drop far-away entities.

    An entity survives when it lies within ``d_max`` hops of some topic entity,
    or on an undirected walk of at most ``len(topics) * d_max`` hops between
    two distinct topic entities. Every entity of an entity path whose
    inter-topic segments have halves of at most ``d_max`` hops satisfies the
    first rule, so reduction never breaks such a path.
    """
    if not topics:
        raise ValueError("topics must be nonempty")
    present = list(dict.fromkeys(t for t in topics if t in g.entities))
    per_topic = {t: hop_distances(g, [t]) for t in present}
    budget = len(topics) * d_max
    keep_entities: set[str] = set(present)
    for eid in g.entities:
        ds = sorted(per_topic[t][eid] for t in present if eid in per_topic[t])
        if not ds:
            continue
        if ds[0] <= d_max or (len(ds) >= 2 and ds[0] + ds[1] <= budget):
            keep_entities.add(eid)
    keep = [t for t in g.triples() if t.head in keep_entities and t.tail in keep_entities]
    out = _subgraph_from(g, keep, [e for e in g.entities if e in keep_entities])
    out.edge_groups = _group_edges(out)
    return out


def sample_relation_per_edge(g: KnowledgeGraph, seed: int) -> KnowledgeGraph:
    """Keep one uniformly drawn relation per clustered edge (deterministic under ``seed``)."""
    if not g.edge_groups and not g.is_empty():
        raise ValueError("graph has no edge groups; run cluster_and_reduce first")
    rng = random.Random(seed)
    chosen: dict[tuple[str, str], str] = {}
    for pair in sorted(g.edge_groups):
        chosen[pair] = rng.choice(sorted(g.edge_groups[pair]))
    keep = [t for t in g.triples() if chosen.get((t.head, t.tail)) == t.relation]
    out = _subgraph_from(g, keep, list(g.entities))
    out.edge_groups = _group_edges(out)
    return out


def load_triple_file(path: str | Path, source: str, graph: KnowledgeGraph | None = None
                     ) -> tuple[KnowledgeGraph, int]:
    """Parse a tab-separated triple file into ``graph``.

    Format per line: ``head_id, head_label, relation, tail_id, tail_label``.
    Blank lines and lines starting with ``#`` are skipped.

    Returns:
        The graph and the number of duplicate lines that were dropped.
    """
    g = graph if graph is not None else KnowledgeGraph()
    dupes = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise TripleFileError(f"{path}:{lineno}: expected 5 tab-separated fields, got {len(cols)}")
            hid, hlabel, rel, tid, tlabel = (c.strip() for c in cols)
            try:
                triple = Triple(hid, rel, tid, source)
            except ValueError as exc:
                raise TripleFileError(f"{path}:{lineno}: {exc}") from None
            if not g.add_triple(triple, hlabel, tlabel):
                dupes += 1
    return g, dupes


def load_alias_file(path: str | Path, graph: KnowledgeGraph) -> int:
    """Attach aliases from ``entity_id<TAB>alias[<TAB>alias...]`` lines; returns count added."""
    added = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            eid, *aliases = line.split("\t")
            if not aliases:
                raise TripleFileError(f"{path}:{lineno}: alias line needs an entity id and >= 1 alias")
            ent = graph.entities.get(eid.strip())
            if ent is None:
                continue
            for a in aliases:
                a = a.strip()
                if a and a != ent.label and a not in ent.aliases:
                    ent.aliases.add(a)
                    added += 1
    return added

