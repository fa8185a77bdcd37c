"""Hand-built embedders, LLM stubs and candidate sets for the pruning tests."""

from __future__ import annotations

import math
import random

import numpy as np

from evipath.pathfind import EvidencePath, path_from_labels
from evipath.scoring import PruneContext


class VectorEmbedder:
    """Returns preassigned nonnegative vectors so cosines are exact."""

    nonnegative = True

    def __init__(self, table: dict[str, np.ndarray]):
        self.table = table

    def embed(self, text: str) -> np.ndarray:
        return self.table[text]


class EchoLLM:
    """Always picks the first three listed paths; records prompts."""

    def __init__(self, response: str = "Path 1, Path 2, Path 3"):
        self.response = response
        self.prompts: list[str] = []

    def complete(self, prompt: str, *, kind: str, temperature: float = 0.0, max_tokens: int = 256) -> str:
        self.prompts.append(prompt)
        return self.response


def mixed(cos_to_axis: float, own_axis: int, dim: int) -> np.ndarray:
    """Unit vector whose cosine with axis 0 is ``cos_to_axis``."""
    v = np.zeros(dim)
    v[0] = cos_to_axis
    v[own_axis] = math.sqrt(1.0 - cos_to_axis**2)
    return v


def two_hop(prefix: str, source: str) -> EvidencePath:
    return path_from_labels([f"{prefix} start", f"{prefix} middle", f"{prefix} end"], ["rel a", "rel b"], source,
                            ids=[f"{prefix}0", f"{prefix}1", f"{prefix}2"])


def adversarial_fixture() -> tuple[list[EvidencePath], PruneContext, VectorEmbedder]:
    """Three highly relevant but uncorroborated web paths against three
    slightly less relevant KG paths that wiki twins corroborate.

    Relevance alone keeps the web paths; the cross-score keeps the KG paths.
    """
    dim = 16
    indicator = "indicator"
    table = {indicator: np.eye(dim)[0]}
    cands: list[EvidencePath] = []
    kg_ids: set[str] = set()
    for i in range(3):
        web = two_hop(f"w{i}", "web")
        table[web.text] = mixed(0.9, 1 + i, dim)
        cands.append(web)
    for i in range(3):
        kg = two_hop(f"k{i}", "kg")
        twin = path_from_labels(kg.node_labels(), ["rel a", "rel b"], "wiki", ids=kg.nodes())
        vec = mixed(0.75, 4 + i, dim)
        table[kg.text] = vec
        kg_ids |= kg.entities()
        cands.extend([kg, twin])
    ctx = PruneContext("question", indicator, ("question",), frozenset(), frozenset(kg_ids))
    return cands, ctx, VectorEmbedder(table)


def planted_fixture(n: int = 150, seed: int = 0) -> tuple[list[EvidencePath], EvidencePath, PruneContext]:
    """``n`` random candidates, one of which matches the indicator verbatim,
    covers both topics and is corroborated by wiki and web twins."""
    rng = random.Random(seed)
    words = ["river", "castle", "opera", "glacier", "harbor", "violin", "senate", "comet", "orchard",
             "lantern", "meadow", "quarry", "falcon", "ledger", "saddle", "beacon"]
    topics = {"t0", "t1"}
    planted = path_from_labels(["Topic Alpha", "Bridge Node", "Topic Beta"], ["links to", "leads to"], "kg",
                               ids=["t0", "mid", "t1"])
    indicator = planted.text
    cands = [planted]
    for src in ("wiki", "web"):
        twin = path_from_labels(planted.node_labels(), ["links to", "leads to"], src, ids=planted.nodes())
        cands.append(twin)
    kg_ids = {"t0", "mid", "t1"}
    while len(cands) < n:
        k = rng.randint(1, 3)
        labels = [" ".join(rng.sample(words, 2)) for _ in range(k + 1)]
        ids = [f"x{len(cands)}_{j}" for j in range(k + 1)]
        if rng.random() < 0.3:
            ids[0], labels[0] = "t0", "Topic Alpha"
        src = rng.choice(["kg", "wiki", "web"])
        if src == "kg":
            kg_ids.update(ids)
        cands.append(path_from_labels(labels, [rng.choice(words) for _ in range(k)], src, ids=ids))
    rng.shuffle(cands)
    ctx = PruneContext("planted question", indicator, ("planted question",), frozenset(topics), frozenset(kg_ids))
    return cands, planted, ctx
