"""Human-annotated exemplar caption corpus (Clotho-format table).

Only the caption text is used; the audio the captions describe is never
touched. The sampling pool is the flattened caption list, so every clip
contributes its five captions as independent candidates.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusFormatError

CAPTIONS_PER_CLIP = 5
_EXPECTED_HEADER = ["file_name"] + [f"caption_{i}" for i in range(1, CAPTIONS_PER_CLIP + 1)]


@dataclass(frozen=True)
class ExemplarEntry:
    clip_name: str
    captions: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.captions) != CAPTIONS_PER_CLIP:
            raise CorpusFormatError(
                f"{self.clip_name}: expected {CAPTIONS_PER_CLIP} captions, got {len(self.captions)}"
            )
        if any(not c for c in self.captions):
            raise CorpusFormatError(f"{self.clip_name}: empty caption")


class ExemplarCorpus:
    """Immutable corpus handle; safe to sample from concurrently."""

    def __init__(self, entries: list[ExemplarEntry]):
        self.entries = tuple(entries)
        self._pool = tuple(c for entry in self.entries for c in entry.captions)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def caption_pool_size(self) -> int:
        return len(self._pool)

    def sample_exemplars(self, k: int, rng_seed: int) -> list[str]:
        """Sample k captions without replacement; reproducible for equal seeds."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k > len(self._pool):
            raise ValueError(
                f"cannot sample {k} exemplars from a pool of {len(self._pool)}"
            )
        rng = random.Random(rng_seed)
        return rng.sample(self._pool, k)


def load_corpus(path: str | Path) -> ExemplarCorpus:
    """Load a caption table with header file_name,caption_1,...,caption_5."""
    path = Path(path)
    entries: list[ExemplarEntry] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError(f"{path}: empty corpus file") from None
        if [h.strip() for h in header] != _EXPECTED_HEADER:
            raise CorpusFormatError(
                f"{path}: expected header {','.join(_EXPECTED_HEADER)}, got {','.join(header)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(_EXPECTED_HEADER):
                raise CorpusFormatError(
                    f"{path}:{line_no}: expected {len(_EXPECTED_HEADER)} columns, got {len(row)}"
                )
            try:
                entries.append(
                    ExemplarEntry(
                        clip_name=row[0].strip(),
                        captions=tuple(cell.strip() for cell in row[1:]),
                    )
                )
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path}:{line_no}: {exc}") from None
    return ExemplarCorpus(entries)


def sample_exemplars(corpus: ExemplarCorpus, k: int, rng_seed: int) -> list[str]:
    return corpus.sample_exemplars(k, rng_seed)
