"""Embedding and LLM backends, prompt rendering and response parsing."""

from .embedding import Embedder, HashingEmbedder, HttpEmbedder, ProviderError, cosine, similarity
from .llm import LLM, ChatCompletionLLM, ScriptedLLM, TranscriptMiss, load_transcript
from .prompts import PromptKind, render_prompt

__all__ = [
    "ChatCompletionLLM",
    "Embedder",
    "HashingEmbedder",
    "HttpEmbedder",
    "LLM",
    "PromptKind",
    "ProviderError",
    "ScriptedLLM",
    "TranscriptMiss",
    "cosine",
    "load_transcript",
    "render_prompt",
    "similarity",
]
