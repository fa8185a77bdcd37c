from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evipath.pathfind import path_from_labels
from evipath.providers.embedding import HashingEmbedder
from evipath.scoring import (
    PruneConfig,
    PruneContext,
    cross_score,
    jaccard,
    prune,
    relevance_score,
    score_candidates,
    supporting_sources,
    verification_score,
)
from scoring_fixtures import EchoLLM, VectorEmbedder, adversarial_fixture, planted_fixture

CFG = PruneConfig()


def path(labels, source="kg", ids=None):
    return path_from_labels(labels, [f"r{i}" for i in range(len(labels) - 1)], source, ids=ids)


class TestConfig:
    def test_defaults(self):
        assert (CFG.lambda_sem, CFG.alpha_cross, CFG.gamma, CFG.w1, CFG.w2, CFG.w_max) == (0.7, 0.7, 0.8, 100, 20, 3)
        assert sum(CFG.alpha) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("kw", [
        {"lambda_sem": 1.2, "lambda_ent": -0.2}, {"lambda_sem": 0.5},
        {"alpha": (0.5, 0.5, 0.5)}, {"rho_wiki": 1.0}, {"w_max": 0}, {"gamma": 1.5},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            PruneConfig(**kw)

    def test_unknown_source_prior(self):
        with pytest.raises(ValueError, match="unknown source"):
            CFG.prior("carrier pigeon")


class TestRelevance:
    def setup_method(self):
        dim = 4
        self.emb = VectorEmbedder({})
        self.p = path(["A", "C"], ids=["A", "C"])
        v = np.zeros(dim)
        v[0], v[1] = 0.8, 0.6
        self.emb.table.update({"ind": np.eye(dim)[0], self.p.text: v})

    def test_worked_value(self):
        assert relevance_score("ind", self.p, {"A", "B"}, CFG, self.emb) == pytest.approx(0.66, abs=1e-9)

    def test_maximal_agreement(self):
        emb = VectorEmbedder({"ind": np.eye(3)[0], self.p.text: np.eye(3)[0]})
        assert relevance_score("ind", self.p, {"A", "C"}, CFG, emb) == pytest.approx(1.0, abs=1e-12)

    def test_null_case(self):
        emb = VectorEmbedder({"ind": np.eye(3)[0], self.p.text: np.eye(3)[1]})
        assert relevance_score("ind", self.p, {"X"}, CFG, emb) == 0.0

    def test_empty_indicator_rejected(self):
        with pytest.raises(ValueError):
            relevance_score("", self.p, set(), CFG, self.emb)

    def test_jaccard_empty(self):
        assert jaccard(set(), {"a"}) == 0.0


class TestVerification:
    def twins(self):
        kg = path(["A", "B", "C"])
        return kg, path(["A", "B", "C"], "wiki"), path(["A", "B", "C"], "web")

    def test_supp_and_f2(self):
        kg, wiki, web = self.twins()
        emb = HashingEmbedder()
        assert supporting_sources(kg, [kg, wiki, web], CFG.gamma, emb) == {"wiki", "web"}
        rec = verification_score(kg, [kg, wiki, web], kg.entities(), CFG, emb)
        assert rec.f2 == pytest.approx(2 / 3, abs=1e-12)
        assert rec.s_ver == pytest.approx(8 / 9, abs=1e-9)

    def test_empty_pool(self):
        kg, _, _ = self.twins()
        rec = verification_score(kg, [], set(), CFG, HashingEmbedder())
        assert rec.f2 == 0.0 and rec.supp == frozenset()

    def test_unsupported_web(self):
        web = path(["X", "Y"], "web")
        rec = verification_score(web, [web], set(), CFG, HashingEmbedder())
        assert rec.s_ver == pytest.approx(0.7 / 3, abs=1e-9)

    def test_triplicate_each_sees_two(self):
        pool = list(self.twins())
        for p in pool:
            assert verification_score(p, pool, set(), CFG, HashingEmbedder()).f2 == pytest.approx(2 / 3)

    def test_f2_capped(self):
        cfg = PruneConfig(w_max=1)
        kg, wiki, web = self.twins()
        assert verification_score(kg, [wiki, web], set(), cfg, HashingEmbedder()).f2 == 1.0

    def test_f2_nondecreasing_in_support(self):
        kg, wiki, web = self.twins()
        emb = HashingEmbedder()
        f = [verification_score(kg, pool, set(), CFG, emb).f2 for pool in ([], [wiki], [wiki, web])]
        assert f == sorted(f)

    def test_same_source_does_not_corroborate(self):
        a = path(["A", "B"], "kg", ids=["a", "b"])
        b = path(["A", "B"], "kg", ids=["c", "d"])
        assert supporting_sources(a, [a, b], CFG.gamma, HashingEmbedder()) == set()


class TestCross:
    @pytest.mark.parametrize("rel,ver,want", [(1, 1, 1.0), (0.66, 0.889, 0.7287), (0, 0, 0.0)])
    def test_values(self, rel, ver, want):
        assert cross_score(rel, ver, CFG) == pytest.approx(want, abs=1e-9)

    @settings(max_examples=100)
    @given(st.lists(st.tuples(st.floats(0, 0.5), st.floats(0, 1)), min_size=2, max_size=20), st.floats(0, 0.5))
    def test_shift_preserves_order(self, pairs, shift):
        base = sorted(range(len(pairs)), key=lambda i: (-cross_score(*pairs[i], CFG), i))
        moved = sorted(range(len(pairs)), key=lambda i: (-cross_score(pairs[i][0] + shift, pairs[i][1], CFG), i))
        scores = [cross_score(*p, CFG) for p in pairs]
        # ties within float noise may legitimately swap
        for a, b in zip(base, moved):
            assert a == b or abs(scores[a] - scores[b]) < 1e-9


class TestPrune:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            prune([], PruneContext("q", "i"), CFG, HashingEmbedder(), EchoLLM())

    def test_under_budget_returns_all(self):
        cands = [path(["A", "B"]), path(["C", "D"], "wiki")]
        res = prune(cands, PruneContext("q", "A B"), CFG, HashingEmbedder(), EchoLLM("Path 2, Path 1"))
        assert {p.identity() for p in res.selected} == {p.identity() for p in cands}
        assert res.llm_order == [1, 0]
        assert [p.scores.s_llm for p in res.selected] == [1.0, pytest.approx(2 / 3)]

    def test_unparseable_falls_back(self, caplog):
        cands = [path(["A", "B"]), path(["C", "D"], "wiki")]
        res = prune(cands, PruneContext("q", "A B"), CFG, HashingEmbedder(), EchoLLM("no idea"))
        assert res.degraded and res.llm_order is None
        assert [p.identity() for p in res.selected] == [p.identity() for p in res.stage2]
        assert "unparseable" in caplog.text

    def test_planted_survives(self):
        cands, planted, ctx = planted_fixture()
        res = prune(cands, ctx, CFG, HashingEmbedder(), EchoLLM())
        assert (len(res.stage1), len(res.stage2), len(res.selected)) == (100, 20, 3)
        assert planted.identity() in {p.identity() for p in res.selected}

    def test_relevance_only_changes_survivors(self):
        cands, ctx, emb = adversarial_fixture()
        full = prune(cands, ctx, CFG, emb, EchoLLM())
        rel_only = prune(cands, ctx, PruneConfig(verification=False), emb, EchoLLM())
        assert {p.source for p in full.selected} == {"kg"}
        assert {p.source for p in rel_only.selected} == {"web"}

    def test_relevance_only_ranks_by_relevance(self):
        cands, planted, ctx = planted_fixture(60, seed=3)
        _, stage2 = score_candidates(cands, ctx, PruneConfig(verification=False), HashingEmbedder())
        rels = [p.scores.s_rel for p in stage2]
        assert rels == sorted(rels, reverse=True)
        assert all(p.scores.cross == p.scores.s_rel for p in stage2)


@st.composite
def candidate_sets(draw):
    n = draw(st.integers(1, 40))
    words = st.sampled_from(["alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma"])
    out = []
    for i in range(n):
        k = draw(st.integers(1, 3))
        labels = [" ".join(draw(st.lists(words, min_size=1, max_size=3))) for _ in range(k + 1)]
        src = draw(st.sampled_from(["kg", "wiki", "web"]))
        out.append(path_from_labels(labels, ["rel"] * k, src, ids=[f"{i}_{j}" for j in range(k + 1)]))
    return out


class TestPruneProperties:
    @settings(max_examples=60, deadline=None)
    @given(candidate_sets(), st.integers(1, 10), st.integers(1, 5), st.integers(1, 4))
    def test_narrowing_and_bounds(self, cands, w1, w2, w_max):
        cfg = PruneConfig(w1=w1, w2=w2, w_max=w_max)
        topics = frozenset(p.nodes()[0] for p in cands[:2])
        ctx = PruneContext("q", "alpha beta", ("q",), topics, frozenset(cands[0].entities()))
        res = prune(cands, ctx, cfg, HashingEmbedder(), EchoLLM("Path 3, Path 1"))
        assert len(res.stage1) <= w1 and len(res.stage2) <= w2 and len(res.selected) <= w_max
        ids1 = {p.identity() for p in res.stage1}
        assert ids1 <= {p.identity() for p in cands}
        assert {p.identity() for p in res.stage2} <= ids1
        assert {p.identity() for p in res.selected} <= {p.identity() for p in res.stage2}
        for p in res.stage1 + res.selected:
            r = p.scores
            for v in (r.s_rel, r.s_ver, r.s_llm, r.cross, r.f1, r.f2, r.f3):
                assert 0.0 <= v <= 1.0
            assert r.cross == pytest.approx(cfg.alpha_cross * r.s_rel + (1 - cfg.alpha_cross) * r.s_ver, abs=1e-9)
