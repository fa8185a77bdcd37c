"""Prompt pack loading and rendering.

Each prompt kind binds to one template file under ``templates/`` holding
``{Slot Name}`` placeholders. Only known slot names are substituted, so literal
braces in the few-shot block (``{Yes}``, ``{Fury}``) are left alone.
"""

from __future__ import annotations

import enum
import logging
import re
from collections.abc import Mapping, Sequence
from functools import lru_cache
from importlib import resources

logger = logging.getLogger(__name__)


class PromptKind(str, enum.Enum):
    QUESTION_ANALYSIS = "question_analysis"
    SOURCE_SELECT = "source_select"
    PARAGRAPH_TO_PATH = "paragraph_to_path"
    REFINED_EXPLORATION = "refined_exploration"
    PREDICT_EXPLORATION = "predict_exploration"
    PATH_SELECT = "path_select"
    PATH_REFINE = "path_refine"
    COT_EVALUATE = "cot_evaluate"
    COT_GENERATE = "cot_generate"
    # topic-entity extraction used by source detection
    TOPIC_EXTRACT = "topic_extract"


SLOTS: dict[PromptKind, tuple[str, ...]] = {
    PromptKind.TOPIC_EXTRACT: ("Query",),
    PromptKind.QUESTION_ANALYSIS: ("Query", "Topic Entity"),
    PromptKind.SOURCE_SELECT: ("Query", "Provided sources", "Question analysis"),
    PromptKind.PARAGRAPH_TO_PATH: ("Query", "Topic Entity", "Skyline Indicator", "Paragraphs"),
    PromptKind.REFINED_EXPLORATION: ("Query", "Topic Entity", "Skyline Indicator", "Split Question",
                                     "Existing Knowledge Paths"),
    PromptKind.PREDICT_EXPLORATION: ("Query", "Topic Entity", "Skyline Indicator", "Split Question",
                                     "Existing Knowledge Paths"),
    PromptKind.PATH_SELECT: ("Query", "Skyline Indicator", "Split Question", "Candidate Paths"),
    PromptKind.PATH_REFINE: ("Query", "Skyline Indicator", "Split Question", "Related Paths"),
    PromptKind.COT_EVALUATE: ("Query", "Skyline Indicator", "Split Question", "Existing Knowledge Paths"),
    PromptKind.COT_GENERATE: ("Query", "Skyline Indicator", "Split Question", "Related Paths"),
}

_PLACEHOLDER_RE = re.compile(r"\{([A-Z][A-Za-z ]*)\}")


class MissingSlotError(KeyError):
    """A required template slot was not supplied."""

    def __init__(self, kind: PromptKind, slot: str):
        super().__init__(f"prompt {kind.value!r} requires slot {slot!r}")
        self.kind = kind
        self.slot = slot

    def __str__(self) -> str:
        return self.args[0]


@lru_cache(maxsize=None)
def load_template(kind: PromptKind) -> str:
    return resources.files(__package__).joinpath("templates", f"{kind.value}.txt").read_text(encoding="utf-8")


def template_slots(text: str) -> set[str]:
    """Placeholder names in ``text`` that belong to some prompt kind."""
    known = {s for slots in SLOTS.values() for s in slots}
    return {m.group(1) for m in _PLACEHOLDER_RE.finditer(text) if m.group(1) in known}


def render_prompt(kind: PromptKind | str, slots: Mapping[str, str]) -> str:
    """Fill the template for ``kind`` with ``slots`` verbatim.

    Raises:
        MissingSlotError: when a required slot is absent.
    """
    kind = PromptKind(kind)
    required = SLOTS[kind]
    for name in required:
        if name not in slots:
            raise MissingSlotError(kind, name)
    extra = sorted(set(slots) - set(required))
    if extra:
        logger.warning("render_prompt(%s): ignoring unknown slots %s", kind.value, extra)
    wanted = set(required)

    def fill(m: re.Match) -> str:
        name = m.group(1)
        return str(slots[name]) if name in wanted else m.group(0)

    return _PLACEHOLDER_RE.sub(fill, load_template(kind))


def format_path_list(texts: Sequence[str], prefix: str = "Path") -> str:
    """Numbered listing, one item per line: ``Path 1: [...]``."""
    if not texts:
        return "(none)"
    return "\n".join(f"{prefix} {i}: {t}" for i, t in enumerate(texts, 1))


def format_paragraphs(paragraphs: Sequence[str]) -> str:
    return "\n".join(f"Paragraph {i}: {p}" for i, p in enumerate(paragraphs, 1))
