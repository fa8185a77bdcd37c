"""Evidence pruning.

Step 1 ranks candidates by hybrid relevance (embedding similarity to the
skyline indicator blended with topic-entity Jaccard). Step 2 re-ranks the
survivors by a cross-score that mixes relevance with a three-feature
verification score: source prior, corroboration by other source kinds, and
alignment of the path's entities with the question subgraph. Step 3 lets the LLM
pick the final paths.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .pathfind import EvidencePath, path_rank_key
from .providers.embedding import Embedder, similarity

logger = logging.getLogger(__name__)

SOURCE_KINDS = ("kg", "wiki", "web")


@dataclass(frozen=True)
class ScoreRecord:
    s_rel: float = 0.0
    s_ver: float = 0.0
    s_llm: float = 0.0
    cross: float = 0.0
    f1: float = 0.0
    f2: float = 0.0
    f3: float = 0.0
    supp: frozenset[str] = frozenset()


@dataclass
class PruneConfig:
    lambda_sem: float = 0.7
    lambda_ent: float = 0.3
    alpha: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    alpha_cross: float = 0.7
    gamma: float = 0.80
    rho_kg: float = 1.0
    rho_wiki: float = 0.8
    rho_web: float = 0.7
    w1: int = 100
    w2: int = 20
    w_max: int = 3
    # False reproduces relevance-only pruning (cross-score := s_rel)
    verification: bool = True

    def __post_init__(self) -> None:
        weights = [self.lambda_sem, self.lambda_ent, *self.alpha, self.alpha_cross, self.gamma,
                   self.rho_kg, self.rho_wiki, self.rho_web]
        if any(not 0.0 <= w <= 1.0 for w in weights):
            raise ValueError("weights, priors and gamma must lie in [0, 1]")
        if abs(self.lambda_sem + self.lambda_ent - 1.0) > 1e-9:
            raise ValueError("lambda_sem + lambda_ent must equal 1")
        if len(self.alpha) != 3 or abs(sum(self.alpha) - 1.0) > 1e-9:
            raise ValueError("alpha weights must be three values summing to 1")
        if not self.rho_kg > self.rho_wiki > self.rho_web:
            raise ValueError("source priors must satisfy rho_kg > rho_wiki > rho_web")
        if min(self.w1, self.w2, self.w_max) < 1:
            raise ValueError("widths must be >= 1")

    def prior(self, source: str) -> float:
        try:
            return {"kg": self.rho_kg, "wiki": self.rho_wiki, "web": self.rho_web}[source]
        except KeyError:
            raise ValueError(f"unknown source kind {source!r}") from None


def jaccard(a: set, b: set) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def relevance_score(indicator: str, p: EvidencePath, topics: set[str], cfg: PruneConfig,
                    embedder: Embedder) -> float:
    if not indicator:
        raise ValueError("indicator must be nonempty")
    sem = similarity(embedder, indicator, p.text)
    return cfg.lambda_sem * sem + cfg.lambda_ent * jaccard(set(topics), p.entities())


def supporting_sources(p: EvidencePath, pool: Sequence[EvidencePath], gamma: float,
                       embedder: Embedder) -> set[str]:
    """Source kinds other than ``p.source`` holding a path at least ``gamma``-similar to ``p``."""
    out: set[str] = set()
    for q in pool:
        if q.source == p.source or q.source in out:
            continue
        if similarity(embedder, p.text, q.text) >= gamma:
            out.add(q.source)
    return out


def verification_score(p: EvidencePath, pool: Sequence[EvidencePath], kg_entities: set[str],
                       cfg: PruneConfig, embedder: Embedder) -> ScoreRecord:
    f1 = cfg.prior(p.source)
    supp = supporting_sources(p, pool, cfg.gamma, embedder)
    f2 = min(len(supp), cfg.w_max) / cfg.w_max
    ents = p.entities()
    f3 = len(ents & kg_entities) / len(ents) if ents else 0.0
    a1, a2, a3 = cfg.alpha
    return ScoreRecord(s_ver=a1 * f1 + a2 * f2 + a3 * f3, f1=f1, f2=f2, f3=f3, supp=frozenset(supp))


def cross_score(s_rel: float, s_ver: float, cfg: PruneConfig) -> float:
    return cfg.alpha_cross * s_rel + (1.0 - cfg.alpha_cross) * s_ver


def make_path_scorer(indicator: str, topics: set[str], kg_entities: set[str],
                     pool: Sequence[EvidencePath], cfg: PruneConfig,
                     embedder: Embedder) -> Callable[[EvidencePath], float]:
    """Cross-score of a (partial) path against ``pool``; used for search-time width cuts."""

    def score(p: EvidencePath) -> float:
        rel = relevance_score(indicator, p, topics, cfg, embedder)
        if not cfg.verification:
            return rel
        ver = verification_score(p, pool, kg_entities, cfg, embedder).s_ver
        return cross_score(rel, ver, cfg)

    return score


@dataclass
class PruneContext:
    question: str
    indicator: str
    split_questions: Sequence[str] = ()
    topics: frozenset[str] = frozenset()
    kg_entities: frozenset[str] = frozenset()


@dataclass
class PruneResult:
    stage1: list[EvidencePath] = field(default_factory=list)
    stage2: list[EvidencePath] = field(default_factory=list)
    selected: list[EvidencePath] = field(default_factory=list)
    llm_order: list[int] | None = None
    degraded: bool = False


def score_candidates(candidates: Sequence[EvidencePath], ctx: PruneContext, cfg: PruneConfig,
                     embedder: Embedder) -> tuple[list[EvidencePath], list[EvidencePath]]:
    """Steps 1 and 2: top-W1 by relevance, then top-W2 by cross-score."""
    topics = set(ctx.topics)
    rel = {id(p): relevance_score(ctx.indicator, p, topics, cfg, embedder) for p in candidates}
    stage1 = sorted(candidates, key=lambda p: path_rank_key(rel[id(p)], p))[: cfg.w1]
    scored: list[EvidencePath] = []
    for p in stage1:
        if cfg.verification:
            ver = verification_score(p, stage1, set(ctx.kg_entities), cfg, embedder)
            cross = cross_score(rel[id(p)], ver.s_ver, cfg)
        else:
            ver = ScoreRecord()
            cross = rel[id(p)]
        scored.append(p.with_scores(ScoreRecord(
            s_rel=rel[id(p)], s_ver=ver.s_ver, cross=cross,
            f1=ver.f1, f2=ver.f2, f3=ver.f3, supp=ver.supp)))
    stage1 = scored
    stage2 = sorted(stage1, key=lambda p: path_rank_key(p.scores.cross, p))[: cfg.w2]
    return stage1, stage2


def prune(candidates: Sequence[EvidencePath], ctx: PruneContext, cfg: PruneConfig,
          embedder: Embedder, llm, *, temperature: float = 0.0, max_tokens: int = 256) -> PruneResult:
    """Three-step pruning down to at most ``cfg.w_max`` paths.

    The LLM sees the stage-2 paths numbered in cross-score order. Its ranking
    fixes the output order and ``s_llm = (w_max - rank + 1) / w_max``. When
    nothing usable comes back the cross-score order is kept.
    """
    from .providers.parsing import parse_path_selection
    from .providers.prompts import PromptKind, format_path_list, render_prompt

    if not candidates:
        raise ValueError("candidates must be nonempty")
    stage1, stage2 = score_candidates(candidates, ctx, cfg, embedder)
    prompt = render_prompt(PromptKind.PATH_SELECT, {
        "Query": ctx.question,
        "Skyline Indicator": ctx.indicator,
        "Split Question": "\n".join(ctx.split_questions) or ctx.question,
        "Candidate Paths": format_path_list([p.text for p in stage2], prefix="Path"),
    })
    raw = llm.complete(prompt, kind=PromptKind.PATH_SELECT.value, temperature=temperature,
                       max_tokens=max_tokens)
    order = parse_path_selection(raw, [p.text for p in stage2])
    degraded = not order
    if degraded:
        logger.warning("path selection unparseable; keeping cross-score order")
        order = list(range(len(stage2)))
    order = order[: cfg.w_max]
    selected = []
    for rank, idx in enumerate(order, 1):
        p = stage2[idx]
        s_llm = (cfg.w_max - rank + 1) / cfg.w_max
        rec = p.scores
        selected.append(p.with_scores(ScoreRecord(rec.s_rel, rec.s_ver, s_llm, rec.cross,
                                                  rec.f1, rec.f2, rec.f3, rec.supp)))
    return PruneResult(stage1, stage2, selected, None if degraded else order, degraded)
