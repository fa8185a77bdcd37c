"""Embedding backends.

Every backend exposes ``embed(text) -> np.ndarray`` and a ``nonnegative``
flag telling scorers whether cosine values can drop below zero.
"""

from __future__ import annotations

import hashlib
import logging
import re
import time
from functools import lru_cache
from typing import Protocol

import numpy as np

logger = logging.getLogger(__name__)

_WORD_RE = re.compile(r"[0-9a-z]+")


class ProviderError(RuntimeError):
    """Transport-level failure of a remote provider."""

    def __init__(self, message: str, *, attempts: int = 1, retry_after: float | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.retry_after = retry_after


class Embedder(Protocol):
    nonnegative: bool

    def embed(self, text: str) -> np.ndarray: ...


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def similarity(embedder: Embedder, a: str, b: str) -> float:
    """Cosine between two texts mapped into [0, 1].

    Nonnegative embedders are only clipped against rounding; others are
    remapped with (x + 1) / 2.
    """
    c = cosine(embedder.embed(a), embedder.embed(b))
    if getattr(embedder, "nonnegative", False):
        return min(1.0, max(0.0, c))
    return (c + 1.0) / 2.0


def _bucket(feature: str, dim: int) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % dim


class HashingEmbedder:
    """Deterministic offline embedder.

    Character n-grams (3..5) of the case-folded text plus whole word tokens are
    hashed into ``dim`` buckets; the count vector is L2-normalised. All
    components are nonnegative, so cosine lies in [0, 1].
    """

    nonnegative = True

    def __init__(self, dim: int = 256, ngram_range: tuple[int, int] = (3, 5), word_weight: float = 2.0):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.ngram_range = ngram_range
        self.word_weight = word_weight
        self._cached = lru_cache(maxsize=65536)(self._embed)

    def _embed(self, text: str) -> bytes:
        vec = np.zeros(self.dim, dtype=np.float64)
        folded = " ".join(_WORD_RE.findall(text.casefold()))
        padded = f" {folded} "
        lo, hi = self.ngram_range
        for n in range(lo, hi + 1):
            for i in range(len(padded) - n + 1):
                vec[_bucket("c:" + padded[i : i + n], self.dim)] += 1.0
        for word in folded.split():
            vec[_bucket("w:" + word, self.dim)] += self.word_weight
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            # no alphanumerics at all; fall back to raw characters
            for ch in text:
                vec[_bucket("r:" + ch, self.dim)] += 1.0
            norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec.tobytes()

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        return np.frombuffer(self._cached(text), dtype=np.float64)


class HttpEmbedder:
    """OpenAI-compatible ``/embeddings`` client.

    Raises :class:`ProviderError` carrying the attempt count once retries are
    exhausted.
    """

    nonnegative = False

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 timeout: float = 30.0, retries: int = 2, backoff: float = 1.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        if text in self._cache:
            return self._cache[text]
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last: Exception | None = None
        for attempt in range(1, self.retries + 2):
            try:
                resp = httpx.post(f"{self.base_url}/embeddings", headers=headers, timeout=self.timeout,
                                  json={"model": self.model, "input": text})
                resp.raise_for_status()
                vec = np.asarray(resp.json()["data"][0]["embedding"], dtype=np.float64)
                self._cache[text] = vec
                return vec
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last = exc
                logger.warning("embedding request failed (attempt %d): %s", attempt, exc)
                if attempt <= self.retries:
                    time.sleep(self.backoff * attempt)
        raise ProviderError(f"embedding backend unreachable: {last}", attempts=self.retries + 1,
                            retry_after=self.backoff)
