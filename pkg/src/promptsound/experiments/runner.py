"""Experiment orchestration: captions -> generation -> assembly -> evaluation.

Every stage is idempotent and resumable. Captions persist to caption files,
the LLM gateway caches responses on disk, generation skips stamped outputs,
and fold results are cached per fold, so re-running a finished experiment
performs zero LLM calls, zero generations and zero training runs.
"""

from __future__ import annotations

import logging
from pathlib import Path

from ..audio.backends import MOCK_TONE, MockToneBackend, TtaBackend, make_backend
from ..audio.generate import job_for_caption, run_generation_batch
from ..captions.engine import (
    derive_attribute_schema,
    generate_basic_captions,
    generate_exemplar_captions,
    generate_structured_captions,
)
from ..captions.io import read_caption_file, write_caption_file
from ..classifier.evaluate import EvalReport, cross_validate
from ..corpus import load_corpus
from ..datasets.compose import augment_with_real, merge_manifests, synthesize_manifest
from ..datasets.io import write_manifest
from ..datasets.metadata import load_real_manifest
from ..datasets.types import DatasetManifest
from ..errors import GenerationError, PromptSoundError
from ..llm import HttpChatBackend, LlmGateway, MockChatBackend
from ..types import CaptionRecord, CaptionStrategy, SoundClass
from .config import ExperimentConfig
from .report import ResultsRow

logger = logging.getLogger("promptsound.experiments")


class StageError(PromptSoundError):
    """Error annotated with the pipeline stage it came from."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class ExperimentRunner:
    def __init__(
        self,
        cfg: ExperimentConfig,
        mock_llm: bool = False,
        mock_tta: bool = False,
        fixed_attributes: bool = False,
    ):
        self.cfg = cfg
        self.mock_llm = mock_llm
        self.mock_tta = mock_tta
        self.fixed_attributes = fixed_attributes
        self._gateway: LlmGateway | None = None
        self._real: DatasetManifest | None = None

    # ------------------------------------------------------------------ setup

    @property
    def gateway(self) -> LlmGateway:
        if self._gateway is None:
            cache_dir = self.cfg.cache_dir or self.cfg.out_dir / "llm_cache"
            backend = (
                MockChatBackend()
                if self.mock_llm
                else HttpChatBackend(endpoint=self.cfg.llm.endpoint)
            )
            self._gateway = LlmGateway(
                backend,
                cache_dir=cache_dir,
                requests_per_minute=self.cfg.llm.requests_per_minute,
            )
        return self._gateway

    @property
    def real_manifest(self) -> DatasetManifest:
        if self._real is None:
            self._real = load_real_manifest(
                self.cfg.dataset_id,
                self.cfg.metadata_path,
                self.cfg.audio_root,
                spec=self.cfg.dataset_spec,
            )
        return self._real

    def _tta_backend(self, backend_id: str) -> TtaBackend:
        if self.mock_tta or backend_id == MOCK_TONE:
            return MockToneBackend(backend_id=backend_id)
        return make_backend(
            backend_id,
            endpoint=self.cfg.tta.endpoints.get(backend_id),
            checkpoint=self.cfg.tta.checkpoints.get(backend_id),
        )

    def _slots_by_class(self) -> dict[SoundClass, list[str]]:
        slots: dict[SoundClass, list[str]] = {}
        for entry in self.real_manifest.real_entries():
            slots.setdefault(entry.sound_class, []).append(entry.clip_id)
        return slots

    def _caption_path(self, strategy: CaptionStrategy) -> Path:
        return (
            self.cfg.out_dir
            / "captions"
            / f"{self.cfg.dataset_id}_{strategy.path_label}_x{self.cfg.multiplier}.jsonl"
        )

    # ----------------------------------------------------------------- stages

    def caption_stage(self) -> dict[CaptionStrategy, list[CaptionRecord]]:
        """Produce (or reload) one caption set per configured strategy."""
        out: dict[CaptionStrategy, list[CaptionRecord]] = {}
        slots = self._slots_by_class()
        classes = sorted(slots, key=lambda c: c.class_index)
        for strategy in self.cfg.strategies:
            path = self._caption_path(strategy)
            if path.exists():
                records = sorted(read_caption_file(path), key=lambda r: r.key)
                expected = sum(len(v) for v in slots.values()) * self.cfg.multiplier
                if len(records) == expected:
                    logger.info("captions: reusing %s (%d records)", path.name, len(records))
                    out[strategy] = records
                    continue
                logger.info(
                    "captions: %s has %d records, need %d; regenerating",
                    path.name,
                    len(records),
                    expected,
                )
            records = self._generate_captions(strategy, classes, slots)
            write_caption_file(records, path)
            out[strategy] = records
            logger.info("captions: wrote %d %s records", len(records), strategy.value)
        return out

    def _generate_captions(
        self,
        strategy: CaptionStrategy,
        classes: list[SoundClass],
        slots: dict[SoundClass, list[str]],
    ) -> list[CaptionRecord]:
        cfg = self.cfg
        if strategy == CaptionStrategy.BSC:
            return generate_basic_captions(classes, slots, cfg.multiplier)
        if strategy == CaptionStrategy.STR:
            schema = derive_attribute_schema(
                self.gateway, fixed=self.fixed_attributes, model_id=cfg.llm.model_id
            )
            return generate_structured_captions(
                classes,
                slots,
                cfg.multiplier,
                schema,
                self.gateway,
                rng_seed=cfg.rng_seed,
                model_id=cfg.llm.model_id,
                temperature=cfg.llm.temperature,
                k_examples=cfg.llm.k_examples,
                batch_size=cfg.llm.batch_size,
                max_rounds=cfg.llm.max_rounds,
            )
        corpus = load_corpus(cfg.corpus_path)
        return generate_exemplar_captions(
            classes,
            slots,
            cfg.multiplier,
            corpus,
            self.gateway,
            rng_seed=cfg.rng_seed,
            k_examples=cfg.llm.k_examples,
            model_id=cfg.llm.model_id,
            temperature=cfg.llm.temperature,
            batch_size=cfg.llm.batch_size,
            max_rounds=cfg.llm.max_rounds,
        )

    def generation_stage(
        self, captions: dict[CaptionStrategy, list[CaptionRecord]]
    ) -> None:
        """Generate audio for every (caption, backend) pair; skip stamped files."""
        fold_of_slot = {e.clip_id: e.fold for e in self.real_manifest.real_entries()}
        duration = self.cfg.spec.clip_duration
        for backend_id in self.cfg.backends:
            backend = self._tta_backend(backend_id)
            for strategy, records in captions.items():
                jobs = [
                    job_for_caption(
                        record,
                        backend_id,
                        fold=fold_of_slot[record.slot_id],
                        duration=duration,
                        generated_root=self.cfg.generated_root,
                    )
                    for record in records
                ]
                report = run_generation_batch(jobs, backend, self.cfg.tta.parallelism)
                if not report.ok:
                    details = "; ".join(msg for _, msg in report.failures[:3])
                    raise GenerationError(
                        f"{backend_id}/{strategy.value}: {len(report.failures)} job(s) "
                        f"failed ({report.summary()}): {details}"
                    )
                logger.info(
                    "generation %s/%s: %s", backend_id, strategy.value, report.summary()
                )

    def assemble_stage(
        self, captions: dict[CaptionStrategy, list[CaptionRecord]]
    ) -> DatasetManifest:
        """Compose the training manifest for the configured mode."""
        cfg = self.cfg
        real = self.real_manifest
        if cfg.mode == "baseline":
            assembled = real
        else:
            pieces = [
                synthesize_manifest(
                    real,
                    strategy,
                    backend_id,
                    cfg.multiplier,
                    caption_set=captions[strategy],
                    generated_root=cfg.generated_root,
                    verify_files=True,
                )
                for backend_id in cfg.backends
                for strategy in cfg.strategies
            ]
            merged = merge_manifests(pieces)
            assembled = augment_with_real(merged, real) if cfg.uses_real_in_training else merged
        assembled = assembled.with_lineage(
            f"experiment {cfg.name} (config fingerprint {cfg.fingerprint()})"
        )
        manifest_dir = cfg.out_dir / "manifests"
        write_manifest(assembled, manifest_dir / "assembled.csv")
        write_manifest(real, manifest_dir / "real.csv")
        logger.info(
            "assembled manifest: %d entries (%s)",
            len(assembled),
            assembled.provenance_histogram(),
        )
        return assembled

    def evaluate_stage(
        self,
        assembled: DatasetManifest,
        folds: list[int] | None = None,
    ) -> EvalReport:
        cfg = self.cfg
        report = cross_validate(
            assembled,
            self.real_manifest,
            cfg.train,
            cfg.features,
            train_on_synthetic_only=cfg.trains_on_synthetic_only,
            folds=folds,
            resume_dir=cfg.out_dir / "folds",
            config_fingerprint=cfg.fingerprint(),
            label=cfg.label(),
        )
        report.save(cfg.out_dir / "report.json")
        return report

    # -------------------------------------------------------------- top level

    def run(self, folds: list[int] | None = None) -> tuple[EvalReport, ResultsRow]:
        try:
            stage = "captions"
            captions = self.caption_stage() if self.cfg.mode != "baseline" else {}
            stage = "generation"
            if captions:
                self.generation_stage(captions)
            stage = "assembly"
            assembled = self.assemble_stage(captions)
            stage = "evaluation"
            report = self.evaluate_stage(assembled, folds)
        except PromptSoundError as exc:
            raise StageError(stage=stage, cause=exc) from exc
        row = ResultsRow.from_report(self.cfg, report)
        row.save(self.cfg.out_dir / "row.json")
        return report, row
