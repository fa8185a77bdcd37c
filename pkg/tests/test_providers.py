from __future__ import annotations

import json
import os
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evipath.providers.embedding import HashingEmbedder, HttpEmbedder, ProviderError, cosine, similarity
from evipath.providers.llm import ChatCompletionLLM, ScriptedLLM, TranscriptEntry, TranscriptMiss, load_transcript
from evipath.providers.prompts import (
    SLOTS,
    MissingSlotError,
    PromptKind,
    format_path_list,
    load_template,
    render_prompt,
    template_slots,
)

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("EVIPATH_REGEN_GOLDEN") == "1"


def sample_slots(kind: PromptKind) -> dict[str, str]:
    return {name: f"<{name.lower().replace(' ', '_')}>" for name in SLOTS[kind]}


class TestHashingEmbedder:
    def test_deterministic_and_normalised(self):
        emb = HashingEmbedder()
        a, b = emb.embed("Jillian Hall"), HashingEmbedder().embed("Jillian Hall")
        assert a.tobytes() == b.tobytes()
        assert a.shape == (256,) and np.all(a >= 0)
        assert np.linalg.norm(a) == pytest.approx(1.0)
        assert similarity(emb, "Jillian Hall", "Jillian Hall") == pytest.approx(1.0, abs=1e-9)

    def test_related_beats_unrelated(self):
        emb = HashingEmbedder()
        near = similarity(emb, "Jillian Hall wrestler", "Jillian Hall WWE")
        far = similarity(emb, "Jillian Hall wrestler", "orbital mechanics")
        assert near > far

    def test_punctuation_only_text_nonzero(self):
        assert np.linalg.norm(HashingEmbedder().embed("?!")) > 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            HashingEmbedder().embed("")

    @settings(max_examples=80)
    @given(st.text(min_size=1, max_size=40), st.text(min_size=1, max_size=40))
    def test_cosine_symmetric_and_bounded(self, a, b):
        emb = HashingEmbedder()
        s1, s2 = similarity(emb, a, b), similarity(emb, b, a)
        assert s1 == pytest.approx(s2, abs=1e-12)
        assert 0.0 <= s1 <= 1.0

    def test_zero_vector_cosine(self):
        assert cosine(np.zeros(3), np.ones(3)) == 0.0


class TestPrompts:
    def test_every_kind_has_template(self):
        for kind in PromptKind:
            text = load_template(kind)
            assert set(SLOTS[kind]) == template_slots(text)
            assert text.rstrip().endswith("A:")

    @pytest.mark.parametrize("kind", list(PromptKind), ids=lambda k: k.value)
    def test_golden(self, kind):
        rendered = render_prompt(kind, sample_slots(kind))
        path = GOLDEN / f"{kind.value}.txt"
        if REGEN:
            path.write_text(rendered, encoding="utf-8")
        assert rendered == path.read_text(encoding="utf-8")

    def test_question_analysis_contents(self):
        out = render_prompt(PromptKind.QUESTION_ANALYSIS, {"Query": "Who won?", "Topic Entity": "{Cup}"})
        assert "Q: Who won?" in out and "Topic Entity: {Cup}" in out
        assert out.rstrip().endswith("A:")

    def test_unknown_slot_warns(self, caplog):
        slots = {**sample_slots(PromptKind.TOPIC_EXTRACT), "Bogus": "x"}
        assert render_prompt("topic_extract", slots) == render_prompt("topic_extract",
                                                                      sample_slots(PromptKind.TOPIC_EXTRACT))
        assert "Bogus" in caplog.text

    def test_missing_slot_named(self):
        with pytest.raises(MissingSlotError, match="Topic Entity") as info:
            render_prompt(PromptKind.QUESTION_ANALYSIS, {"Query": "q"})
        assert info.value.slot == "Topic Entity"

    def test_slot_values_are_not_rescanned(self):
        out = render_prompt(PromptKind.TOPIC_EXTRACT, {"Query": "mentions {Query} literally"})
        assert "mentions {Query} literally" in out

    def test_path_list(self):
        assert format_path_list([]) == "(none)"
        assert format_path_list(["[a]", "[b]"], "Result") == "Result 1: [a]\nResult 2: [b]"


class TestScriptedLLM:
    def entries(self):
        return [TranscriptEntry("cot_evaluate", "Fury", "{Yes} answer: {Fury}"),
                TranscriptEntry("cot_evaluate", "Fury", "{No}"),
                TranscriptEntry("path_refine", "", "summary", repeat=True)]

    def test_fifo_and_kind(self):
        llm = ScriptedLLM(self.entries())
        assert llm.complete("Q about Fury", kind="cot_evaluate") == "{Yes} answer: {Fury}"
        assert llm.complete("Q about Fury", kind="cot_evaluate") == "{No}"
        with pytest.raises(TranscriptMiss) as info:
            llm.complete("Q about Fury", kind="cot_evaluate")
        assert info.value.kind == "cot_evaluate" and len(info.value.digest) == 12
        assert isinstance(info.value, LookupError)

    def test_repeat_and_reset(self):
        llm = ScriptedLLM(self.entries())
        for _ in range(3):
            assert llm.complete("anything", kind="path_refine") == "summary"
        llm.complete("Fury", kind="cot_evaluate")
        assert llm.consumed == [2, 2, 2, 0]
        llm.reset()
        assert llm.consumed == []
        assert llm.complete("Fury", kind="cot_evaluate") == "{Yes} answer: {Fury}"

    def test_concurrent_calls_consume_each_once(self):
        entries = [TranscriptEntry("k", "", str(i)) for i in range(50)]
        llm = ScriptedLLM(entries)
        out: list[str] = []
        lock = threading.Lock()

        def work():
            for _ in range(10):
                r = llm.complete("p", kind="k")
                with lock:
                    out.append(r)

        threads = [threading.Thread(target=work) for _ in range(5)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(out, key=int) == [str(i) for i in range(50)]

    def test_load_errors(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text('{"kind": "x", "response": "y"}\n{"kind": "x"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match=":2"):
            load_transcript(p)


class _Handler(BaseHTTPRequestHandler):
    replies: list[tuple[int, dict]] = []
    seen: list[dict] = []

    def do_POST(self):  # noqa: N802
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append({"path": self.path, "body": body, "auth": self.headers.get("Authorization")})
        code, payload = type(self).replies.pop(0)
        data = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.replies, _Handler.seen = [], []
    srv = HTTPServer(("127.0.0.1", 0), _Handler)
    th = threading.Thread(target=srv.serve_forever, daemon=True)
    th.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}", _Handler
    srv.shutdown()


class TestHttpProviders:
    def test_chat_completion(self, server, monkeypatch):
        url, handler = server
        monkeypatch.setenv("TEST_KEY", "secret")
        handler.replies = [(200, {"choices": [{"message": {"content": "A: hi"}}]})]
        llm = ChatCompletionLLM(url, "m", api_key_env="TEST_KEY", retries=0)
        assert llm.complete("prompt", kind="path_select", temperature=0.4, max_tokens=12) == "A: hi"
        seen = handler.seen[0]
        assert seen["path"] == "/chat/completions" and seen["auth"] == "Bearer secret"
        assert seen["body"]["temperature"] == 0.4 and seen["body"]["max_tokens"] == 12

    def test_chat_retries_then_fails(self, server):
        url, handler = server
        handler.replies = [(500, {}), (500, {})]
        llm = ChatCompletionLLM(url, "m", retries=1, backoff=0.0)
        with pytest.raises(ProviderError) as info:
            llm.complete("p", kind="k")
        assert info.value.attempts == 2

    def test_http_embedder(self, server):
        url, handler = server
        handler.replies = [(200, {"data": [{"embedding": [0.6, 0.8]}]})]
        emb = HttpEmbedder(url, "e", retries=0)
        v = emb.embed("text")
        assert v.tolist() == [0.6, 0.8]
        assert emb.embed("text") is v  # cached, no second request
        assert len(handler.seen) == 1 and handler.seen[0]["path"] == "/embeddings"
