"""Hits@1 scoring and reports recomputed from trace streams."""

from __future__ import annotations

import json
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

_ARTICLE_RE = re.compile(r"\b(?:a|an|the)\b")


def normalize_answer(text: str) -> str:
    """Case-fold, drop the articles a/an/the, collapse whitespace and trim."""
    text = _ARTICLE_RE.sub(" ", text.casefold())
    return " ".join(text.split())


def is_hit(prediction: str, answers: Iterable[str]) -> bool:
    pred = normalize_answer(prediction)
    return bool(pred) and pred in {normalize_answer(a) for a in answers}


@dataclass
class EvalItem:
    question: str
    answers: list[str]
    id: str = ""

    def __post_init__(self) -> None:
        if not self.answers:
            raise ValueError(f"item {self.question!r} has no acceptable answers")


def load_dataset(path: str | Path) -> list[EvalItem]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                items.append(EvalItem(obj["question"], list(obj["answers"]), str(obj.get("id", lineno))))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad dataset item: {exc}") from None
    return items


def composition_key(verified_by: Sequence[str], fallback: bool) -> str:
    """Answer-source bucket: ``llm`` for fallbacks, else e.g. ``kg+web``."""
    if fallback:
        return "llm"
    order = {"kg": 0, "wiki": 1, "web": 2}
    return "+".join(sorted(verified_by, key=lambda s: (order.get(s, 9), s))) or "none"


@dataclass
class EvalReport:
    items: int = 0
    hits: int = 0
    grounded_hits: int = 0
    errors: int = 0
    composition: dict[str, int] = field(default_factory=dict)
    phases: dict[str, int] = field(default_factory=dict)
    llm_calls: int = 0
    max_llm_calls: int = 0
    prompt_chars: int = 0
    per_item: list[dict] = field(default_factory=list)

    @property
    def hits_at_1(self) -> float:
        return self.hits / self.items if self.items else 0.0

    @property
    def grounded_hits_at_1(self) -> float:
        return self.grounded_hits / self.items if self.items else 0.0

    @property
    def token_proxy(self) -> int:
        """Prompt characters / 4, a backend-neutral stand-in for input tokens."""
        return self.prompt_chars // 4

    def to_dict(self) -> dict:
        return {
            "items": self.items,
            "hits": self.hits,
            "hits_at_1": round(self.hits_at_1, 6),
            "grounded_hits_at_1": round(self.grounded_hits_at_1, 6),
            "errors": self.errors,
            "composition": dict(sorted(self.composition.items())),
            "phases": dict(sorted(self.phases.items())),
            "llm_calls": self.llm_calls,
            "mean_llm_calls": round(self.llm_calls / self.items, 6) if self.items else 0.0,
            "max_llm_calls": self.max_llm_calls,
            "token_proxy": self.token_proxy,
            "per_item": self.per_item,
        }


def report_from_events(events: Iterable[dict]) -> EvalReport:
    """Rebuild an evaluation report from a trace stream.

    Items are delimited by ``item`` events carrying the gold answers. The
    engine's ``llm_call`` and ``answer`` events (or an ``item_error``) follow.
    """
    rep = EvalReport()
    comp: Counter[str] = Counter()
    phases: Counter[str] = Counter()
    current: dict | None = None

    def close() -> None:
        if current is None:
            return
        rep.items += 1
        rep.llm_calls += current["calls"]
        rep.max_llm_calls = max(rep.max_llm_calls, current["calls"])
        rep.prompt_chars += current["chars"]
        ans = current.get("answer")
        row = {"id": current["id"], "question": current["question"], "llm_calls": current["calls"]}
        if ans is None:
            rep.errors += 1
            row.update(hit=False, error=current.get("error", "no answer"))
        else:
            hit = is_hit(ans["answer"], current["answers"])
            rep.hits += hit
            rep.grounded_hits += hit and not ans["fallback"]
            key = composition_key(ans["verified_by"], ans["fallback"])
            comp[key] += 1
            phases[ans["phase"]] += 1
            row.update(answer=ans["answer"], hit=hit, phase=ans["phase"], fallback=ans["fallback"],
                       source=key)
        rep.per_item.append(row)

    for ev in events:
        kind = ev.get("event")
        if kind == "item":
            close()
            current = {"id": ev.get("id", ""), "question": ev["question"], "answers": ev["answers"],
                       "calls": 0, "chars": 0}
        elif current is None:
            continue
        elif kind == "llm_call":
            current["calls"] += 1
            current["chars"] += ev.get("prompt_chars", 0)
        elif kind == "answer":
            current["answer"] = ev
        elif kind == "item_error":
            current["error"] = ev.get("error", "")
    close()
    rep.composition = dict(comp)
    rep.phases = dict(phases)
    return rep


def read_trace(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
