"""Generation jobs: caption in, post-processed WAV file out.

Batches are idempotent: every finished file carries a stamp derived from the
job's content, and jobs whose output already matches are skipped on re-run.
Failures never abort the batch; they are collected into a report.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..errors import GenerationError
from ..types import CaptionRecord, CaptionStrategy
from .backends import TtaBackend
from .dsp import post_process
from .waveform import TARGET_SAMPLE_RATE, Waveform, read_wav, write_wav

logger = logging.getLogger("promptsound.audio")

_POSTPROC_VERSION = "mono16k-v1"


@dataclass(frozen=True)
class GenerationJob:
    caption: CaptionRecord
    backend_id: str
    duration: float
    seed: int
    out_path: Path

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be positive")

    @property
    def stamp_path(self) -> Path:
        return Path(str(self.out_path) + ".stamp")

    def content_stamp(self) -> str:
        payload = json.dumps(
            {
                "text": self.caption.text,
                "strategy": self.caption.strategy.value,
                "backend": self.backend_id,
                "duration": self.duration,
                "seed": self.seed,
                "postproc": _POSTPROC_VERSION,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class BatchReport:
    produced: list[GenerationJob]
    skipped: list[GenerationJob]
    failures: list[tuple[GenerationJob, str]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return (
            f"{len(self.produced)} generated, {len(self.skipped)} skipped, "
            f"{len(self.failures)} failed"
        )


def job_seed(slot_id: str, copy_index: int, strategy: CaptionStrategy, backend_id: str) -> int:
    """Stable per-job seed so regeneration reproduces files without stored state."""
    digest = hashlib.sha256(
        f"{slot_id}|{copy_index}|{strategy.value}|{backend_id}".encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big") >> 1  # keep it positive


def output_path(
    generated_root: str | Path,
    dataset_id: str,
    strategy: CaptionStrategy,
    backend_id: str,
    fold: int,
    slot_id: str,
    copy_index: int,
) -> Path:
    return (
        Path(generated_root)
        / dataset_id
        / strategy.path_label
        / backend_id
        / str(fold)
        / f"{slot_id}__c{copy_index}.wav"
    )


def job_for_caption(
    caption: CaptionRecord,
    backend_id: str,
    fold: int,
    duration: float,
    generated_root: str | Path,
) -> GenerationJob:
    return GenerationJob(
        caption=caption,
        backend_id=backend_id,
        duration=duration,
        seed=job_seed(caption.slot_id, caption.copy_index, caption.strategy, backend_id),
        out_path=output_path(
            generated_root,
            caption.dataset_id,
            caption.strategy,
            backend_id,
            fold,
            caption.slot_id,
            caption.copy_index,
        ),
    )


def generate(job: GenerationJob, backend: TtaBackend) -> Waveform:
    """Run one job end to end and write the post-processed file atomically."""
    if backend.backend_id != job.backend_id:
        raise GenerationError(
            f"job wants backend {job.backend_id!r} but got {backend.backend_id!r}"
        )
    try:
        raw = backend.synthesize(job.caption, job.duration, job.seed)
        processed = post_process(raw, job.duration)
    except GenerationError:
        raise
    except Exception as exc:
        raise GenerationError(f"{job.backend_id}: {job.out_path.name}: {exc}") from exc
    write_wav(job.out_path, processed)
    job.stamp_path.write_text(job.content_stamp(), encoding="utf-8")
    return processed


def _is_done(job: GenerationJob) -> bool:
    if not job.out_path.exists() or not job.stamp_path.exists():
        return False
    try:
        return job.stamp_path.read_text(encoding="utf-8").strip() == job.content_stamp()
    except OSError:
        return False


def run_generation_batch(
    jobs: list[GenerationJob],
    backend: TtaBackend,
    parallelism: int = 1,
) -> BatchReport:
    """All-or-report execution: a job either yields a valid file or a failure entry."""
    if not jobs:
        raise ValueError("jobs must be non-empty")
    paths = [j.out_path for j in jobs]
    if len(set(paths)) != len(paths):
        raise GenerationError("duplicate out_path within one batch")

    report = BatchReport(produced=[], skipped=[], failures=[])

    def run_one(job: GenerationJob) -> tuple[GenerationJob, str | None, bool]:
        if _is_done(job):
            return job, None, True
        try:
            generate(job, backend)
            return job, None, False
        except GenerationError as exc:
            return job, str(exc), False

    if parallelism <= 1:
        outcomes = [run_one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(run_one, jobs))

    for job, error, skipped in outcomes:
        if skipped:
            report.skipped.append(job)
        elif error is None:
            report.produced.append(job)
        else:
            report.failures.append((job, error))
    logger.info("generation batch: %s", report.summary())
    return report


def verify_audio_tree(
    root: str | Path, duration: float, sample_rate: int = TARGET_SAMPLE_RATE
) -> list[str]:
    """Scan a directory of produced WAVs; return a violation per bad file."""
    violations = []
    expected = round(duration * sample_rate)
    for path in sorted(Path(root).rglob("*.wav")):
        wave = read_wav(path)
        if wave.channels != 1:
            violations.append(f"{path}: {wave.channels} channels")
        if wave.sample_rate != sample_rate:
            violations.append(f"{path}: sample rate {wave.sample_rate}")
        if wave.n_samples != expected:
            violations.append(f"{path}: {wave.n_samples} samples, expected {expected}")
    return violations
