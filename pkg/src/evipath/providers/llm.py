"""LLM backends: a scripted transcript player and a chat-completion HTTP client."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .embedding import ProviderError

logger = logging.getLogger(__name__)


class LLM(Protocol):
    def complete(self, prompt: str, *, kind: str, temperature: float, max_tokens: int) -> str: ...


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


class TranscriptMiss(LookupError):
    """No transcript entry matches a call."""

    def __init__(self, kind: str, prompt: str):
        self.kind = kind
        self.digest = prompt_digest(prompt)
        tail = prompt[-200:].replace("\n", " | ")
        super().__init__(f"no scripted response for kind={kind!r} digest={self.digest}; prompt tail: {tail}")


@dataclass
class TranscriptEntry:
    kind: str
    match: str
    response: str
    repeat: bool = False


def load_transcript(path: str | Path) -> list[TranscriptEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entries.append(TranscriptEntry(obj["kind"], obj.get("match", ""), obj["response"],
                                               bool(obj.get("repeat", False))))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad transcript entry: {exc}") from None
    return entries


class ScriptedLLM:
    """Replays a transcript.

    A call receives the first unconsumed entry of the same kind whose ``match``
    substring occurs in the prompt. Entries flagged ``repeat`` answer any number
    of calls and are never consumed. ``consumed`` lists entry indices in call
    order so a run can be audited and replayed after :meth:`reset`.
    """

    def __init__(self, entries: list[TranscriptEntry]):
        self.entries = list(entries)
        self.consumed: list[int] = []
        self._used: set[int] = set()
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> ScriptedLLM:
        return cls(load_transcript(path))

    def reset(self) -> None:
        with self._lock:
            self.consumed.clear()
            self._used.clear()

    def complete(self, prompt: str, *, kind: str, temperature: float = 0.0, max_tokens: int = 256) -> str:
        with self._lock:
            for i, e in enumerate(self.entries):
                if e.kind != kind or i in self._used or e.match not in prompt:
                    continue
                if not e.repeat:
                    self._used.add(i)
                self.consumed.append(i)
                return e.response
        raise TranscriptMiss(kind, prompt)


class ChatCompletionLLM:
    """OpenAI-compatible ``/chat/completions`` client.

    Request: ``{"model", "messages": [{"role": "user", "content": prompt}],
    "temperature", "max_tokens"}``. The reply text is
    ``choices[0].message.content``. The API key is read from the environment
    variable named by ``api_key_env``.
    """

    def __init__(self, base_url: str, model: str, api_key_env: str = "EVIPATH_API_KEY",
                 timeout: float = 60.0, retries: int = 2, backoff: float = 2.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = os.environ.get(api_key_env)
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff

    def complete(self, prompt: str, *, kind: str, temperature: float = 0.0, max_tokens: int = 256) -> str:
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}],
                "temperature": temperature, "max_tokens": max_tokens}
        last: Exception | None = None
        retry_after = None
        for attempt in range(1, self.retries + 2):
            try:
                resp = httpx.post(f"{self.base_url}/chat/completions", json=body, headers=headers,
                                  timeout=self.timeout)
                if resp.status_code == 429:
                    retry_after = float(resp.headers.get("retry-after", self.backoff))
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last = exc
                logger.warning("%s call failed (attempt %d): %s", kind, attempt, exc)
                if attempt <= self.retries:
                    time.sleep(retry_after or self.backoff * attempt)
        raise ProviderError(f"llm backend unreachable: {last}", attempts=self.retries + 1,
                            retry_after=retry_after)
