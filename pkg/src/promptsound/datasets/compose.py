"""Composition operators over manifests.

All operators are pure functions over immutable manifests. The hard rule
encoded here: evaluation is always on real audio. Synthetic clips inherit
the fold of the real clip they shadow, which keeps fold-wise class balance
and makes cross-validation leak-free by construction.
"""

from __future__ import annotations

from pathlib import Path

from ..audio.generate import output_path
from ..errors import CompletenessError, CompositionError, ProtocolError
from ..types import CaptionRecord, CaptionStrategy
from .types import (
    DatasetManifest,
    ManifestEntry,
    Provenance,
    synthetic_clip_id,
)


def synthesize_manifest(
    real: DatasetManifest,
    strategy: CaptionStrategy,
    backend_id: str,
    multiplier: int,
    caption_set: set[CaptionRecord] | list[CaptionRecord] | None = None,
    generated_root: str | Path = "generated",
    verify_files: bool = False,
) -> DatasetManifest:
    """Mirror the real manifest into synthetic entries, one per (slot, copy).

    Every synthetic entry inherits the class and fold of the real clip it
    shadows, so the per-(class, fold) histogram is exactly the real one
    scaled by ``multiplier``. When a caption set is supplied its coverage is
    checked; when ``verify_files`` is on, the generated WAVs must exist.
    """
    if multiplier < 1:
        raise ValueError("multiplier must be >= 1")
    if caption_set is not None:
        covered = {(r.slot_id, r.copy_index) for r in caption_set if r.strategy == strategy}
        gaps = [
            f"{entry.clip_id}#c{copy}"
            for entry in real.real_entries()
            for copy in range(1, multiplier + 1)
            if (entry.clip_id, copy) not in covered
        ]
        if gaps:
            raise CompletenessError(
                f"caption set misses {len(gaps)} (slot, copy) pair(s) for "
                f"{strategy.value} x{multiplier}",
                gaps=gaps[:50],
            )
    entries = []
    missing_files = []
    for entry in real.real_entries():
        for copy in range(1, multiplier + 1):
            path = output_path(
                generated_root,
                real.spec.dataset_id,
                strategy,
                backend_id,
                entry.fold,
                entry.clip_id,
                copy,
            )
            if verify_files and not path.exists():
                missing_files.append(str(path))
                continue
            entries.append(
                ManifestEntry(
                    clip_id=synthetic_clip_id(backend_id, strategy, copy, entry.clip_id),
                    path=path,
                    sound_class=entry.sound_class,
                    fold=entry.fold,
                    source=Provenance.synthetic(backend_id, strategy, copy),
                )
            )
    if missing_files:
        raise CompletenessError(
            f"{len(missing_files)} generated file(s) missing for "
            f"{backend_id}/{strategy.value} x{multiplier}",
            gaps=missing_files[:50],
        )
    return DatasetManifest(
        spec=real.spec,
        entries=tuple(entries),
        lineage=real.lineage
        + (f"synthesized {backend_id}/{strategy.value} x{multiplier} mirroring real manifest",),
    )


def merge_manifests(manifests: list[DatasetManifest]) -> DatasetManifest:
    """Entry union of same-spec manifests; sizes add, lineages concatenate."""
    if not manifests:
        raise CompositionError("nothing to merge")
    if len(manifests) == 1:
        return manifests[0]
    spec = manifests[0].spec
    for m in manifests[1:]:
        if m.spec != spec:
            raise CompositionError(
                f"cannot merge {m.spec.dataset_id!r} into {spec.dataset_id!r} "
                "(dataset specs differ)"
            )
    entries: list[ManifestEntry] = []
    for m in manifests:
        entries.extend(m.entries)
    lineage = tuple(note for m in manifests for note in m.lineage) + (
        f"merged {len(manifests)} manifests",
    )
    return DatasetManifest(spec=spec, entries=tuple(entries), lineage=lineage)


def augment_with_real(synthetic: DatasetManifest, real: DatasetManifest) -> DatasetManifest:
    """The "w/ ORG" composition: real entries join the training pool as Real."""
    if not synthetic.entries:
        return real
    merged = merge_manifests([synthetic, real])
    return merged.with_lineage("augmented with real entries (w/ ORG)")


def split_for_fold(
    manifest: DatasetManifest,
    test_fold: int,
    train_on_synthetic_only: bool = False,
) -> tuple[list[ManifestEntry], list[ManifestEntry]]:
    """Fold split under the evaluation protocol.

    The test side is always the real clips of ``test_fold``; synthetic clips
    are never evaluated on. The training side is everything outside the test
    fold, restricted to synthetic entries when the experiment trains on
    synthetic data only (real clips are then present solely for evaluation).
    """
    if not 1 <= test_fold <= manifest.spec.n_folds:
        raise ValueError(
            f"test_fold {test_fold} outside 1..{manifest.spec.n_folds}"
        )
    test = [e for e in manifest.entries if e.fold == test_fold and e.source.is_real]
    if not test:
        raise ProtocolError(
            f"fold {test_fold} has no real clips to evaluate on; merge the real "
            "manifest in before splitting"
        )
    train = [
        e
        for e in manifest.entries
        if e.fold != test_fold and (not train_on_synthetic_only or not e.source.is_real)
    ]
    return train, test


def leak_violations(
    train: list[ManifestEntry], test: list[ManifestEntry]
) -> list[str]:
    """Training entries whose slot lineage touches the test fold (must be none)."""
    test_slots = {e.slot_id for e in test}
    return [
        f"{entry.clip_id} shadows test slot {entry.slot_id}"
        for entry in train
        if entry.slot_id in test_slots
    ]
