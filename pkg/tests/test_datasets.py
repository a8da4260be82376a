from __future__ import annotations

import csv

import pytest

from promptsound.datasets import (
    DatasetSpec,
    augment_with_real,
    class_fold_histogram,
    leak_violations,
    load_real_manifest,
    merge_manifests,
    read_manifest,
    split_for_fold,
    spec_for,
    synthesize_manifest,
    write_manifest,
)
from promptsound.errors import (
    CompletenessError,
    CompositionError,
    IntegrityError,
    ProtocolError,
)
from promptsound.fixtures import write_esc50_style_metadata
from promptsound.types import CaptionRecord, CaptionStrategy

SA = "stable-audio-open"
AG = "audiogen"


class TestLoaders:
    def test_esc50_structure(self, esc50_manifest):
        assert len(esc50_manifest) == 2000
        per_class = {}
        for entry in esc50_manifest.entries:
            per_class[entry.sound_class.class_index] = (
                per_class.get(entry.sound_class.class_index, 0) + 1
            )
        assert len(per_class) == 50
        assert set(per_class.values()) == {40}
        assert {e.fold for e in esc50_manifest.entries} == {1, 2, 3, 4, 5}

    def test_us8k_structure(self, us8k_manifest):
        assert len(us8k_manifest) == 8732
        assert {e.fold for e in us8k_manifest.entries} == set(range(1, 11))
        assert len({e.sound_class.class_index for e in us8k_manifest.entries}) == 10

    def test_us8k_paths_follow_fold_layout(self, us8k_manifest):
        entry = us8k_manifest.entries[0]
        assert entry.path.parent.name == f"fold{entry.fold}"

    def test_truncated_metadata_is_an_integrity_error(self, tmp_path):
        full = write_esc50_style_metadata(tmp_path / "esc50.csv")
        lines = full.read_text().splitlines()
        truncated = tmp_path / "truncated.csv"
        truncated.write_text("\n".join(lines[:1500]) + "\n")
        with pytest.raises(IntegrityError, match="entries"):
            load_real_manifest("esc50", truncated, tmp_path / "audio")

    def test_wrong_header_is_an_integrity_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["file", "fold", "target", "category", "esc10", "src_file", "take"])
        with pytest.raises(IntegrityError, match="header"):
            load_real_manifest("esc50", path, tmp_path / "audio")

    def test_unknown_dataset_needs_explicit_spec(self, tmp_path):
        with pytest.raises(KeyError):
            spec_for("mystery")


class TestSynthesizeManifest:
    def test_esc50_x2_has_4000_entries(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 2)
        assert len(synth) == 4000  # 2000 x 2, counted directly

    def test_us8k_x4_has_34928_entries(self, us8k_manifest):
        synth = synthesize_manifest(us8k_manifest, CaptionStrategy.STR, AG, 4)
        assert len(synth) == 34928  # 8732 x 4

    def test_x1_mirrors_class_fold_histogram_exactly(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.BSC, SA, 1)
        assert class_fold_histogram(synth.entries) == class_fold_histogram(
            esc50_manifest.entries
        )

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_mirroring_at_every_multiplier(self, us8k_manifest, k):
        synth = synthesize_manifest(us8k_manifest, CaptionStrategy.EXE, SA, k)
        real_hist = class_fold_histogram(us8k_manifest.entries)
        synth_hist = class_fold_histogram(synth.entries)
        assert synth_hist == {key: count * k for key, count in real_hist.items()}

    def test_entries_inherit_class_and_fold_and_carry_provenance(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 2)
        by_slot = {e.clip_id: e for e in esc50_manifest.entries}
        for entry in synth.entries[:100]:
            real = by_slot[entry.slot_id]
            assert entry.fold == real.fold
            assert entry.sound_class == real.sound_class
            assert entry.source.backend_id == SA
            assert entry.source.strategy == CaptionStrategy.EXE
            assert 1 <= entry.source.copy_index <= 2

    def test_caption_coverage_gap_is_a_completeness_error(self, toy_manifest):
        records = [
            CaptionRecord(
                dataset_id="toy",
                sound_class=e.sound_class,
                slot_id=e.clip_id,
                copy_index=1,
                strategy=CaptionStrategy.EXE,
                text=f"caption for {e.clip_id}",
                llm_model="mock",
                created_at="2026-01-01T00:00:00+00:00",
            )
            for e in toy_manifest.entries[:-2]  # leave two slots uncovered
        ]
        with pytest.raises(CompletenessError) as excinfo:
            synthesize_manifest(
                toy_manifest, CaptionStrategy.EXE, SA, 1, caption_set=records
            )
        assert len(excinfo.value.gaps) == 2

    def test_missing_generated_files_are_a_completeness_error(self, toy_manifest, tmp_path):
        with pytest.raises(CompletenessError):
            synthesize_manifest(
                toy_manifest, CaptionStrategy.EXE, SA, 1,
                generated_root=tmp_path, verify_files=True,
            )


class TestMergeAndAugment:
    def test_three_strategies_sum_to_6000(self, esc50_manifest):
        pieces = [
            synthesize_manifest(esc50_manifest, strategy, SA, 1)
            for strategy in (CaptionStrategy.BSC, CaptionStrategy.EXE, CaptionStrategy.STR)
        ]
        merged = merge_manifests(pieces)
        assert len(merged) == 6000  # 3 x 2000

    def test_two_backends_sum_to_17464(self, us8k_manifest):
        pieces = [
            synthesize_manifest(us8k_manifest, CaptionStrategy.EXE, backend, 1)
            for backend in (SA, AG)
        ]
        assert len(merge_manifests(pieces)) == 17464  # 2 x 8732

    def test_merge_of_one_is_identity(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        assert merge_manifests([synth]) is synth

    def test_spec_mismatch_is_a_composition_error(self, esc50_manifest, us8k_manifest):
        with pytest.raises(CompositionError):
            merge_manifests([esc50_manifest, us8k_manifest])

    def test_clip_id_collision_is_a_composition_error(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        with pytest.raises(CompositionError):
            merge_manifests([synth, synth])

    def test_augment_counts_by_provenance(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        combined = augment_with_real(synth, esc50_manifest)
        assert len(combined) == 4000
        histogram = combined.provenance_histogram()
        assert histogram == {"Real": 2000, "Synthetic(stable-audio-open,EXE)": 2000}

    def test_augmenting_empty_synthetic_returns_real(self, esc50_manifest):
        empty = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        empty = type(empty)(spec=empty.spec, entries=(), lineage=empty.lineage)
        assert augment_with_real(empty, esc50_manifest) is esc50_manifest


class TestSplit:
    def test_esc50_fold1_is_400_test_1600_train(self, esc50_manifest):
        train, test = split_for_fold(esc50_manifest, 1)
        assert len(test) == 400  # 2000 / 5 folds
        assert len(train) == 1600

    def test_synthetic_only_training_with_real_eval(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        combined = merge_manifests([synth, esc50_manifest])
        train, test = split_for_fold(combined, 2, train_on_synthetic_only=True)
        assert len(train) == 1600
        assert all(not e.source.is_real for e in train)
        assert len(test) == 400
        assert all(e.source.is_real for e in test)

    def test_augmented_training_keeps_real_out_of_fold(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        combined = augment_with_real(synth, esc50_manifest)
        train, test = split_for_fold(combined, 3)
        assert len(train) == 3200  # 1600 synthetic + 1600 real
        assert len(test) == 400

    def test_no_leak_between_train_and_test(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 2)
        combined = augment_with_real(synth, esc50_manifest)
        for fold in range(1, 6):
            train, test = split_for_fold(combined, fold)
            assert set(e.clip_id for e in train).isdisjoint(e.clip_id for e in test)
            assert leak_violations(train, test) == []

    def test_synthetic_only_manifest_cannot_be_evaluated(self, esc50_manifest):
        synth = synthesize_manifest(esc50_manifest, CaptionStrategy.EXE, SA, 1)
        with pytest.raises(ProtocolError, match="real"):
            split_for_fold(synth, 1)

    def test_fold_out_of_range(self, esc50_manifest):
        with pytest.raises(ValueError):
            split_for_fold(esc50_manifest, 6)


class TestManifestIo:
    def test_round_trip_losslessly(self, toy_manifest, tmp_path):
        synth = synthesize_manifest(toy_manifest, CaptionStrategy.STR, AG, 2)
        combined = augment_with_real(synth, toy_manifest)
        path = tmp_path / "manifest.csv"
        write_manifest(combined, path)
        loaded = read_manifest(path)
        assert loaded.spec == combined.spec
        assert loaded.lineage == combined.lineage
        assert loaded.entries == combined.entries

    def test_slot_recovered_from_synthetic_clip_id(self, toy_manifest, tmp_path):
        synth = synthesize_manifest(toy_manifest, CaptionStrategy.STR, AG, 1)
        path = tmp_path / "synth.csv"
        write_manifest(synth, path)
        loaded = read_manifest(path)
        real_ids = {e.clip_id for e in toy_manifest.entries}
        assert all(e.slot_id in real_ids for e in loaded.entries)

    def test_missing_sidecar_requires_spec(self, toy_manifest, tmp_path):
        path = tmp_path / "manifest.csv"
        write_manifest(toy_manifest, path)
        (tmp_path / "manifest.csv.meta.json").unlink()
        with pytest.raises(CompositionError, match="sidecar"):
            read_manifest(path)
        loaded = read_manifest(path, spec=toy_manifest.spec)
        assert loaded.entries == toy_manifest.entries

    def test_header_matches_documented_format(self, toy_manifest, tmp_path):
        path = tmp_path / "manifest.csv"
        write_manifest(toy_manifest, path)
        header = path.read_text().splitlines()[0]
        assert header == "clip_id,path,class_index,class_name,fold,source_kind,backend_id,strategy,copy_index"

    def test_real_rows_have_empty_provenance_fields(self, toy_manifest, tmp_path):
        path = tmp_path / "manifest.csv"
        write_manifest(toy_manifest, path)
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        assert all(
            row["backend_id"] == "" and row["strategy"] == "" and row["copy_index"] == ""
            for row in rows
        )


def test_benchmark_specs_are_pinned():
    esc50 = spec_for("esc50")
    assert (esc50.n_classes, esc50.n_folds, esc50.expected_total, esc50.clip_duration) == (
        50, 5, 2000, 5.0,
    )
    us8k = spec_for("us8k")
    assert (us8k.n_classes, us8k.n_folds, us8k.expected_total, us8k.clip_duration) == (
        10, 10, 8732, 4.0,
    )


def test_dataset_spec_validates_fields():
    with pytest.raises(ValueError):
        DatasetSpec("x", n_classes=0, n_folds=1, expected_total=1, clip_duration=1.0)
