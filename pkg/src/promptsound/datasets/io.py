"""Manifest persistence: a flat delimited table plus a small meta sidecar.

The CSV carries the entries in the documented column layout. Spec and
lineage live in ``<name>.csv.meta.json`` next to it so a manifest round-trips
losslessly while the table stays diff-able.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import CompositionError
from ..types import CaptionStrategy, SoundClass
from .types import (
    SOURCE_REAL,
    SOURCE_SYNTHETIC,
    DatasetManifest,
    DatasetSpec,
    ManifestEntry,
    Provenance,
)

MANIFEST_HEADER = [
    "clip_id",
    "path",
    "class_index",
    "class_name",
    "fold",
    "source_kind",
    "backend_id",
    "strategy",
    "copy_index",
]


def _meta_path(path: Path) -> Path:
    return Path(str(path) + ".meta.json")


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for entry in manifest.entries:
            source = entry.source
            writer.writerow(
                [
                    entry.clip_id,
                    str(entry.path),
                    entry.sound_class.class_index,
                    entry.sound_class.display_name,
                    entry.fold,
                    source.kind,
                    source.backend_id if not source.is_real else "",
                    source.strategy.value if source.strategy else "",
                    source.copy_index if not source.is_real else "",
                ]
            )
    meta = {
        "spec": {
            "dataset_id": manifest.spec.dataset_id,
            "n_classes": manifest.spec.n_classes,
            "n_folds": manifest.spec.n_folds,
            "expected_total": manifest.spec.expected_total,
            "clip_duration": manifest.spec.clip_duration,
        },
        "lineage": list(manifest.lineage),
    }
    _meta_path(path).write_text(json.dumps(meta, indent=2), encoding="utf-8")


def read_manifest(path: str | Path, spec: DatasetSpec | None = None) -> DatasetManifest:
    path = Path(path)
    lineage: tuple[str, ...] = ()
    meta_path = _meta_path(path)
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        spec = DatasetSpec(**meta["spec"])
        lineage = tuple(meta["lineage"])
    if spec is None:
        raise CompositionError(
            f"{path}: no meta sidecar found; pass the DatasetSpec explicitly"
        )
    entries = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != MANIFEST_HEADER:
            raise CompositionError(
                f"{path}: expected header {','.join(MANIFEST_HEADER)}, "
                f"got {','.join(reader.fieldnames or [])}"
            )
        for line_no, row in enumerate(reader, start=2):
            try:
                kind = row["source_kind"].strip()
                if kind == SOURCE_REAL:
                    source = Provenance.real()
                elif kind == SOURCE_SYNTHETIC:
                    source = Provenance.synthetic(
                        backend_id=row["backend_id"].strip(),
                        strategy=CaptionStrategy.parse(row["strategy"]),
                        copy_index=int(row["copy_index"]),
                    )
                else:
                    raise ValueError(f"unknown source_kind {kind!r}")
                entries.append(
                    ManifestEntry(
                        clip_id=row["clip_id"],
                        path=Path(row["path"]),
                        sound_class=SoundClass(
                            dataset_id=spec.dataset_id,
                            class_index=int(row["class_index"]),
                            display_name=row["class_name"],
                        ),
                        fold=int(row["fold"]),
                        source=source,
                    )
                )
            except (KeyError, ValueError) as exc:
                raise CompositionError(f"{path}:{line_no}: {exc}") from None
    return DatasetManifest(spec=spec, entries=tuple(entries), lineage=lineage)
