from .compose import (
    augment_with_real,
    leak_violations,
    merge_manifests,
    split_for_fold,
    synthesize_manifest,
)
from .io import MANIFEST_HEADER, read_manifest, write_manifest
from .metadata import load_real_manifest
from .types import (
    BENCHMARK_SPECS,
    SOURCE_REAL,
    SOURCE_SYNTHETIC,
    DatasetManifest,
    DatasetSpec,
    ManifestEntry,
    Provenance,
    class_fold_histogram,
    spec_for,
    synthetic_clip_id,
)

__all__ = [
    "augment_with_real",
    "leak_violations",
    "merge_manifests",
    "split_for_fold",
    "synthesize_manifest",
    "MANIFEST_HEADER",
    "read_manifest",
    "write_manifest",
    "load_real_manifest",
    "BENCHMARK_SPECS",
    "SOURCE_REAL",
    "SOURCE_SYNTHETIC",
    "DatasetManifest",
    "DatasetSpec",
    "ManifestEntry",
    "Provenance",
    "class_fold_histogram",
    "spec_for",
    "synthetic_clip_id",
]
