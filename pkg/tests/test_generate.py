from __future__ import annotations

import numpy as np
import pytest

from promptsound.audio import (
    GenerationJob,
    MockToneBackend,
    Waveform,
    generate,
    job_for_caption,
    job_seed,
    output_path,
    read_wav,
    run_generation_batch,
    verify_audio_tree,
    write_wav,
)
from promptsound.errors import GenerationError
from promptsound.types import CaptionRecord, CaptionStrategy

from .conftest import make_class


def caption(slot: str, copy: int = 1, class_index: int = 0) -> CaptionRecord:
    return CaptionRecord(
        dataset_id="toy",
        sound_class=make_class(class_index, f"class{class_index}"),
        slot_id=slot,
        copy_index=copy,
        strategy=CaptionStrategy.EXE,
        text=f"sound of class{class_index} at {slot}",
        llm_model="mock",
        created_at="2026-01-01T00:00:00+00:00",
    )


def make_jobs(root, n: int, duration: float = 0.5) -> list[GenerationJob]:
    return [
        job_for_caption(caption(f"slot{i}", class_index=i % 3), "mock-tone", fold=1,
                        duration=duration, generated_root=root)
        for i in range(n)
    ]


class FailingBackend(MockToneBackend):
    def __init__(self, fail_slots: set[str]):
        super().__init__()
        self.fail_slots = fail_slots

    def synthesize(self, record, duration, seed):
        if record.slot_id in self.fail_slots:
            raise GenerationError(f"{self.backend_id}: synthetic failure for {record.slot_id}")
        return super().synthesize(record, duration, seed)


class TestBatch:
    def test_failures_are_reported_not_fatal(self, tmp_path):
        jobs = make_jobs(tmp_path, 10)
        report = run_generation_batch(jobs, FailingBackend({"slot4"}))
        assert len(report.produced) == 9
        assert len(report.failures) == 1
        assert report.failures[0][0].caption.slot_id == "slot4"
        assert "slot4" in report.failures[0][1]

    def test_rerun_skips_everything(self, tmp_path):
        jobs = make_jobs(tmp_path, 6)
        backend = MockToneBackend()
        first = run_generation_batch(jobs, backend)
        assert len(first.produced) == 6
        second = run_generation_batch(jobs, backend)
        assert len(second.skipped) == 6
        assert not second.produced

    def test_changed_caption_text_invalidates_stamp(self, tmp_path):
        jobs = make_jobs(tmp_path, 1)
        run_generation_batch(jobs, MockToneBackend())
        altered = GenerationJob(
            caption=caption("slot0", class_index=0),
            backend_id="mock-tone",
            duration=0.75,  # different duration -> different stamp
            seed=jobs[0].seed,
            out_path=jobs[0].out_path,
        )
        report = run_generation_batch([altered], MockToneBackend())
        assert len(report.produced) == 1

    def test_parallelism_yields_identical_files(self, tmp_path):
        jobs_a = make_jobs(tmp_path / "a", 8)
        jobs_b = make_jobs(tmp_path / "b", 8)
        run_generation_batch(jobs_a, MockToneBackend(), parallelism=1)
        run_generation_batch(jobs_b, MockToneBackend(), parallelism=4)
        for ja, jb in zip(jobs_a, jobs_b):
            assert ja.out_path.read_bytes() == jb.out_path.read_bytes()

    def test_duplicate_out_paths_rejected(self, tmp_path):
        job = make_jobs(tmp_path, 1)[0]
        with pytest.raises(GenerationError, match="duplicate out_path"):
            run_generation_batch([job, job], MockToneBackend())

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            run_generation_batch([], MockToneBackend())


class TestGenerate:
    def test_output_satisfies_waveform_invariants(self, tmp_path):
        job = make_jobs(tmp_path, 1, duration=1.0)[0]
        out = generate(job, MockToneBackend())
        assert out.is_post_processed(1.0)
        loaded = read_wav(job.out_path)
        assert loaded.channels == 1
        assert loaded.sample_rate == 16000
        assert loaded.n_samples == 16000

    def test_backend_mismatch_is_an_error(self, tmp_path):
        job = make_jobs(tmp_path, 1)[0]
        with pytest.raises(GenerationError, match="backend"):
            generate(job, MockToneBackend(backend_id="audiogen"))

    def test_job_seed_is_stable_and_field_sensitive(self):
        base = job_seed("slot1", 1, CaptionStrategy.EXE, "audiogen")
        assert base == job_seed("slot1", 1, CaptionStrategy.EXE, "audiogen")
        assert base != job_seed("slot1", 2, CaptionStrategy.EXE, "audiogen")
        assert base != job_seed("slot1", 1, CaptionStrategy.STR, "audiogen")
        assert base != job_seed("slot1", 1, CaptionStrategy.EXE, "stable-audio-open")

    def test_output_layout(self, tmp_path):
        path = output_path(tmp_path, "esc50", CaptionStrategy.EXE, "audiogen", 3, "1-100-A-0", 2)
        assert path == tmp_path / "esc50" / "exe" / "audiogen" / "3" / "1-100-A-0__c2.wav"


class TestVerifyTree:
    def test_clean_tree_has_no_violations(self, tmp_path):
        jobs = make_jobs(tmp_path, 4, duration=0.5)
        run_generation_batch(jobs, MockToneBackend())
        assert verify_audio_tree(tmp_path, duration=0.5) == []

    def test_bad_file_is_flagged(self, tmp_path):
        jobs = make_jobs(tmp_path, 2, duration=0.5)
        run_generation_batch(jobs, MockToneBackend())
        rogue = Waveform(samples=np.zeros(123), sample_rate=16000)
        write_wav(tmp_path / "toy" / "exe" / "mock-tone" / "1" / "rogue.wav", rogue)
        violations = verify_audio_tree(tmp_path, duration=0.5)
        assert len(violations) == 1
        assert "rogue.wav" in violations[0]
