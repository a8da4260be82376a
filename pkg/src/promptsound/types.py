"""Core domain types shared by the caption, generation and dataset layers."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum


class CaptionStrategy(Enum):
    """The three prompt strategies used to caption clip slots."""

    BSC = "BSC"  # fixed template, no LLM involved
    STR = "STR"  # attribute-guided LLM sentences
    EXE = "EXE"  # few-shot from human-annotated exemplar captions

    @property
    def path_label(self) -> str:
        return self.value.lower()

    @classmethod
    def parse(cls, text: str) -> "CaptionStrategy":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown caption strategy: {text!r}") from None


@dataclass(frozen=True)
class SoundClass:
    """One sound category of a benchmark dataset."""

    dataset_id: str
    class_index: int
    display_name: str

    def __post_init__(self) -> None:
        if self.class_index < 0:
            raise ValueError("class_index must be >= 0")
        if not self.display_name:
            raise ValueError("display_name must be non-empty")


# The five sound attributes driving the Structured strategy.
DEFAULT_ATTRIBUTES = (
    "pitch",
    "pattern",
    "intensity",
    "acoustic characteristics",
    "location",
)


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered list of sound attributes used by the Structured strategy."""

    attributes: tuple[str, ...]
    provenance: str  # "fixed-from-paper" | "llm-derived"

    def __post_init__(self) -> None:
        if not self.attributes:
            raise ValueError("attribute schema must be non-empty")
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("attribute names must be unique")

    @classmethod
    def fixed_default(cls) -> "AttributeSchema":
        return cls(attributes=DEFAULT_ATTRIBUTES, provenance="fixed-from-paper")


@dataclass(frozen=True)
class CaptionRecord:
    """One generated caption bound to a (dataset, class, slot, copy, strategy) tuple."""

    dataset_id: str
    sound_class: SoundClass
    slot_id: str
    copy_index: int
    strategy: CaptionStrategy
    text: str
    llm_model: str
    created_at: str  # ISO-8601

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("caption text must be non-empty")
        if self.copy_index < 1:
            raise ValueError("copy_index must be >= 1")

    @property
    def key(self) -> tuple[str, str, int, str]:
        """Identity of the slot this caption fills within a caption set."""
        return (self.dataset_id, self.slot_id, self.copy_index, self.strategy.value)


@dataclass(frozen=True)
class FewShotRequest:
    """One few-shot captioning request sent to the language model."""

    instruction: str
    examples: tuple[str, ...]
    target_class: SoundClass
    batch_size: int

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


_WHITESPACE = re.compile(r"\s+")


def normalize_caption(text: str) -> str:
    """Canonical form used for duplicate detection: case-folded, whitespace-collapsed."""
    return _WHITESPACE.sub(" ", unicodedata.normalize("NFC", text).casefold()).strip()
