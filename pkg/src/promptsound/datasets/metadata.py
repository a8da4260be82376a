"""Loaders for the published metadata formats of the benchmark datasets.

Folds always come from the metadata and are never recomputed; the loaders
verify the published structure (totals, class counts, fold range) and fail
loudly on any discrepancy.
"""

from __future__ import annotations

import csv
from pathlib import Path

from ..errors import IntegrityError
from ..types import SoundClass
from .types import DatasetManifest, DatasetSpec, ManifestEntry, Provenance, spec_for

ESC50_HEADER = ["filename", "fold", "target", "category", "esc10", "src_file", "take"]
US8K_HEADER = ["slice_file_name", "fsID", "start", "end", "salience", "fold", "classID", "class"]


def _read_rows(path: Path, expected_header: list[str]) -> list[dict[str, str]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != expected_header:
            raise IntegrityError(
                f"{path}: expected header {','.join(expected_header)}, "
                f"got {','.join(reader.fieldnames or [])}"
            )
        return [row for row in reader if any(v.strip() for v in row.values())]


def _validate(manifest: DatasetManifest, metadata_path: Path) -> DatasetManifest:
    spec = manifest.spec
    if len(manifest) != spec.expected_total:
        raise IntegrityError(
            f"{metadata_path}: {len(manifest)} entries, expected {spec.expected_total} "
            f"for {spec.dataset_id}"
        )
    by_class: dict[int, set[str]] = {}
    names: dict[int, str] = {}
    for entry in manifest.entries:
        idx = entry.sound_class.class_index
        by_class.setdefault(idx, set()).add(entry.clip_id)
        prior = names.setdefault(idx, entry.sound_class.display_name)
        if prior != entry.sound_class.display_name:
            raise IntegrityError(
                f"{metadata_path}: class {idx} named both {prior!r} and "
                f"{entry.sound_class.display_name!r}"
            )
    if len(by_class) != spec.n_classes:
        raise IntegrityError(
            f"{metadata_path}: {len(by_class)} classes, expected {spec.n_classes}"
        )
    out_of_range = sorted(i for i in by_class if not 0 <= i < spec.n_classes)
    if out_of_range:
        raise IntegrityError(f"{metadata_path}: class index(es) out of range: {out_of_range}")
    if spec.dataset_id == "esc50":
        per_class = spec.expected_total // spec.n_classes  # 40
        uneven = {i: len(v) for i, v in by_class.items() if len(v) != per_class}
        if uneven:
            raise IntegrityError(
                f"{metadata_path}: classes with count != {per_class}: {uneven}"
            )
    folds = {e.fold for e in manifest.entries}
    if folds != set(range(1, spec.n_folds + 1)):
        raise IntegrityError(
            f"{metadata_path}: folds {sorted(folds)}, expected 1..{spec.n_folds}"
        )
    return manifest


def _load_esc50_format(
    spec: DatasetSpec, metadata_path: Path, audio_root: Path
) -> DatasetManifest:
    entries = []
    for row in _read_rows(metadata_path, ESC50_HEADER):
        try:
            filename = row["filename"].strip()
            entries.append(
                ManifestEntry(
                    clip_id=Path(filename).stem,
                    path=audio_root / filename,
                    sound_class=SoundClass(
                        dataset_id=spec.dataset_id,
                        class_index=int(row["target"]),
                        display_name=row["category"].strip().replace("_", " "),
                    ),
                    fold=int(row["fold"]),
                    source=Provenance.real(),
                )
            )
        except (KeyError, ValueError) as exc:
            raise IntegrityError(f"{metadata_path}: bad row {row}: {exc}") from None
    return DatasetManifest(
        spec=spec,
        entries=tuple(entries),
        lineage=(f"loaded real {spec.dataset_id} metadata from {metadata_path}",),
    )


def _load_us8k_format(
    spec: DatasetSpec, metadata_path: Path, audio_root: Path
) -> DatasetManifest:
    entries = []
    for row in _read_rows(metadata_path, US8K_HEADER):
        try:
            filename = row["slice_file_name"].strip()
            fold = int(row["fold"])
            entries.append(
                ManifestEntry(
                    clip_id=Path(filename).stem,
                    path=audio_root / f"fold{fold}" / filename,
                    sound_class=SoundClass(
                        dataset_id=spec.dataset_id,
                        class_index=int(row["classID"]),
                        display_name=row["class"].strip().replace("_", " "),
                    ),
                    fold=fold,
                    source=Provenance.real(),
                )
            )
        except (KeyError, ValueError) as exc:
            raise IntegrityError(f"{metadata_path}: bad row {row}: {exc}") from None
    return DatasetManifest(
        spec=spec,
        entries=tuple(entries),
        lineage=(f"loaded real {spec.dataset_id} metadata from {metadata_path}",),
    )


def load_real_manifest(
    dataset_id: str,
    metadata_path: str | Path,
    audio_root: str | Path,
    spec: DatasetSpec | None = None,
    metadata_format: str | None = None,
) -> DatasetManifest:
    """Load and verify real dataset metadata.

    The two benchmarks resolve their spec and format automatically; fixture
    datasets pass an explicit spec (they use the esc50 table format unless
    told otherwise).
    """
    metadata_path = Path(metadata_path)
    audio_root = Path(audio_root)
    if spec is None:
        spec = spec_for(dataset_id)
    if spec.dataset_id != dataset_id:
        raise IntegrityError(f"spec is for {spec.dataset_id!r}, not {dataset_id!r}")
    fmt = metadata_format or ("us8k" if dataset_id == "us8k" else "esc50")
    if fmt == "esc50":
        manifest = _load_esc50_format(spec, metadata_path, audio_root)
    elif fmt == "us8k":
        manifest = _load_us8k_format(spec, metadata_path, audio_root)
    else:
        raise ValueError(f"unknown metadata format {fmt!r}")
    return _validate(manifest, metadata_path)
