"""Manifest types: the bookkeeping unit for real and synthetic datasets."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import CompositionError
from ..types import CaptionStrategy, SoundClass

SOURCE_REAL = "real"
SOURCE_SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class DatasetSpec:
    dataset_id: str
    n_classes: int
    n_folds: int
    expected_total: int
    clip_duration: float

    def __post_init__(self) -> None:
        if self.n_classes < 1 or self.n_folds < 1 or self.expected_total < 1:
            raise ValueError("dataset spec fields must be positive")
        if self.clip_duration <= 0:
            raise ValueError("clip_duration must be positive")


# The two benchmark datasets have fixed published structure; fixture
# datasets register their own specs.
BENCHMARK_SPECS = {
    "esc50": DatasetSpec("esc50", n_classes=50, n_folds=5, expected_total=2000, clip_duration=5.0),
    "us8k": DatasetSpec("us8k", n_classes=10, n_folds=10, expected_total=8732, clip_duration=4.0),
}


def spec_for(dataset_id: str) -> DatasetSpec:
    try:
        return BENCHMARK_SPECS[dataset_id]
    except KeyError:
        raise KeyError(
            f"no built-in spec for dataset {dataset_id!r}; pass an explicit DatasetSpec"
        ) from None


@dataclass(frozen=True)
class Provenance:
    """Where a manifest entry's audio comes from."""

    kind: str  # SOURCE_REAL | SOURCE_SYNTHETIC
    backend_id: str = ""
    strategy: CaptionStrategy | None = None
    copy_index: int = 0

    @classmethod
    def real(cls) -> "Provenance":
        return cls(kind=SOURCE_REAL)

    @classmethod
    def synthetic(cls, backend_id: str, strategy: CaptionStrategy, copy_index: int) -> "Provenance":
        if not backend_id or copy_index < 1:
            raise ValueError("synthetic provenance needs backend_id and copy_index >= 1")
        return cls(
            kind=SOURCE_SYNTHETIC,
            backend_id=backend_id,
            strategy=strategy,
            copy_index=copy_index,
        )

    @property
    def is_real(self) -> bool:
        return self.kind == SOURCE_REAL

    def label(self) -> str:
        if self.is_real:
            return "Real"
        return f"Synthetic({self.backend_id},{self.strategy.value})"


def synthetic_clip_id(
    backend_id: str, strategy: CaptionStrategy, copy_index: int, slot_id: str
) -> str:
    """Provenance-prefixed clip id; the shadowed slot stays recoverable."""
    return f"{backend_id}:{strategy.path_label}:c{copy_index}:{slot_id}"


def slot_of_clip_id(clip_id: str, kind: str) -> str:
    if kind == SOURCE_REAL:
        return clip_id
    parts = clip_id.split(":", 3)
    if len(parts) != 4:
        raise ValueError(f"synthetic clip_id {clip_id!r} does not carry a slot")
    return parts[3]


@dataclass(frozen=True)
class ManifestEntry:
    clip_id: str
    path: Path
    sound_class: SoundClass
    fold: int
    source: Provenance

    def __post_init__(self) -> None:
        if self.fold < 1:
            raise ValueError("fold is 1-based")

    @property
    def slot_id(self) -> str:
        """The real clip position this entry occupies or shadows."""
        return slot_of_clip_id(self.clip_id, self.source.kind)


@dataclass(frozen=True)
class DatasetManifest:
    spec: DatasetSpec
    entries: tuple[ManifestEntry, ...]
    lineage: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        ids = [e.clip_id for e in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})[:5]
            raise CompositionError(f"duplicate clip_id(s) in manifest: {dupes}")
        bad_folds = sorted({e.fold for e in self.entries if not 1 <= e.fold <= self.spec.n_folds})
        if bad_folds:
            raise CompositionError(
                f"fold(s) {bad_folds} outside 1..{self.spec.n_folds} for {self.spec.dataset_id}"
            )

    def __len__(self) -> int:
        return len(self.entries)

    def real_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.source.is_real]

    def synthetic_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if not e.source.is_real]

    def classes(self) -> list[SoundClass]:
        seen: dict[int, SoundClass] = {}
        for entry in self.entries:
            seen.setdefault(entry.sound_class.class_index, entry.sound_class)
        return [seen[i] for i in sorted(seen)]

    def with_lineage(self, note: str) -> "DatasetManifest":
        return replace(self, lineage=self.lineage + (note,))

    def provenance_histogram(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.entries:
            key = entry.source.label()
            counts[key] = counts.get(key, 0) + 1
        return counts


def class_fold_histogram(
    entries: list[ManifestEntry] | tuple[ManifestEntry, ...],
) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for entry in entries:
        key = (entry.sound_class.class_index, entry.fold)
        counts[key] = counts.get(key, 0) + 1
    return counts
