"""K-fold evaluation under the official fold protocol.

Test clips are always real audio from the held-out fold. Reports carry both
the pooled accuracy (total correct over total test clips) and the mean of
per-fold accuracies; on balanced folds the two coincide.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..datasets.compose import leak_violations, merge_manifests, split_for_fold
from ..datasets.types import DatasetManifest, DatasetSpec, ManifestEntry
from ..errors import ProtocolError
from .features import FeatureConfig
from .training import TrainConfig, TrainingLog, load_dataset_tensors, train_fold

logger = logging.getLogger("promptsound.classifier")


@dataclass
class FoldResult:
    fold: int
    n_test: int
    n_correct: int
    accuracy: float
    confusion: np.ndarray  # (n_classes, n_classes) counts; rows = true class
    epochs_run: int

    def __post_init__(self) -> None:
        if self.n_test <= 0:
            raise ValueError("n_test must be positive")
        if abs(self.accuracy - self.n_correct / self.n_test) > 1e-12:
            raise ValueError("accuracy must equal n_correct / n_test")

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "n_test": self.n_test,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FoldResult":
        return cls(
            fold=payload["fold"],
            n_test=payload["n_test"],
            n_correct=payload["n_correct"],
            accuracy=payload["accuracy"],
            confusion=np.asarray(payload["confusion"], dtype=np.int64),
            epochs_run=payload["epochs_run"],
        )


@dataclass
class EvalReport:
    dataset_id: str
    n_classes: int
    fold_results: list[FoldResult]
    config_fingerprint: str = ""
    label: str = ""
    training_logs: list[TrainingLog] = field(default_factory=list)

    @property
    def pooled_accuracy(self) -> float:
        total = sum(r.n_test for r in self.fold_results)
        correct = sum(r.n_correct for r in self.fold_results)
        return correct / total if total else 0.0

    @property
    def mean_fold_accuracy(self) -> float:
        if not self.fold_results:
            return 0.0
        return float(np.mean([r.accuracy for r in self.fold_results]))

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "n_classes": self.n_classes,
            "label": self.label,
            "config_fingerprint": self.config_fingerprint,
            "pooled_accuracy": self.pooled_accuracy,
            "mean_fold_accuracy": self.mean_fold_accuracy,
            "folds": [r.to_dict() for r in self.fold_results],
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")


def write_confusion_table(confusion: np.ndarray, path: str | Path) -> None:
    """Confusion counts as a delimited table; rows are true classes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = confusion.shape[0]
    with path.open("w", encoding="utf-8") as fh:
        fh.write("true\\pred," + ",".join(str(i) for i in range(n)) + "\n")
        for i in range(n):
            fh.write(f"{i}," + ",".join(str(int(c)) for c in confusion[i]) + "\n")


def predict_entries(
    model,
    entries: list[ManifestEntry],
    spec: DatasetSpec,
    feature_cfg: FeatureConfig,
    batch_size: int = 32,
) -> np.ndarray:
    """Predicted class index per entry; stubs can bypass the audio path."""
    if hasattr(model, "predict_entries"):
        return np.asarray(model.predict_entries(entries), dtype=np.int64)
    x, _ = load_dataset_tensors(entries, spec, feature_cfg)
    model.eval()
    preds = []
    with torch.no_grad():
        for start in range(0, len(x), batch_size):
            logits = model(x[start : start + batch_size])
            preds.append(logits.argmax(dim=1).numpy())
    return np.concatenate(preds)


def evaluate_fold(
    model,
    test_entries: list[ManifestEntry],
    spec: DatasetSpec,
    feature_cfg: FeatureConfig,
    fold: int,
    epochs_run: int = 0,
) -> FoldResult:
    predictions = predict_entries(model, test_entries, spec, feature_cfg)
    truth = np.array([e.sound_class.class_index for e in test_entries], dtype=np.int64)
    confusion = np.zeros((spec.n_classes, spec.n_classes), dtype=np.int64)
    for t, p in zip(truth, predictions):
        confusion[t, p] += 1
    n_correct = int(np.trace(confusion))
    return FoldResult(
        fold=fold,
        n_test=len(test_entries),
        n_correct=n_correct,
        accuracy=n_correct / len(test_entries),
        confusion=confusion,
        epochs_run=epochs_run,
    )


def cross_validate(
    manifest: DatasetManifest,
    real_manifest: DatasetManifest,
    cfg: TrainConfig,
    feature_cfg: FeatureConfig,
    train_on_synthetic_only: bool = False,
    folds: list[int] | None = None,
    resume_dir: str | Path | None = None,
    config_fingerprint: str = "",
    label: str = "",
    train_fn=train_fold,
) -> EvalReport:
    """Train and evaluate every fold of the official protocol.

    ``manifest`` is the training material; real clips for evaluation are
    merged in when the manifest carries none of its own. Passing
    ``resume_dir`` makes fold runs resumable: finished folds are loaded from
    their result files instead of being retrained.
    """
    spec = manifest.spec
    if real_manifest.spec != spec:
        raise ProtocolError("evaluation manifest has a different dataset spec")
    combined = (
        manifest
        if any(e.source.is_real for e in manifest.entries)
        else merge_manifests([manifest, real_manifest])
    )
    fold_list = folds or list(range(1, spec.n_folds + 1))
    results: list[FoldResult] = []
    logs: list[TrainingLog] = []
    resume_path = Path(resume_dir) if resume_dir else None

    for fold in fold_list:
        if resume_path is not None:
            cached = resume_path / f"fold_{fold}.json"
            if cached.exists():
                results.append(FoldResult.from_dict(json.loads(cached.read_text())))
                logger.info("fold %d: loaded cached result", fold)
                continue
        train_entries, test_entries = split_for_fold(
            combined, fold, train_on_synthetic_only=train_on_synthetic_only
        )
        leaks = leak_violations(train_entries, test_entries)
        if leaks:
            raise ProtocolError(f"fold {fold}: training leaks into test fold: {leaks[:3]}")
        fold_cfg = TrainConfig(
            max_epochs=cfg.max_epochs,
            early_stop_patience=cfg.early_stop_patience,
            batch_size=cfg.batch_size,
            learning_rate=cfg.learning_rate,
            optimizer=cfg.optimizer,
            rng_seed=cfg.rng_seed + fold,  # independent stream per fold
            validation_fraction=cfg.validation_fraction,
            num_threads=cfg.num_threads,
        )
        model, log = train_fn(train_entries, fold_cfg, feature_cfg, spec, fold=fold)
        logs.append(log)
        result = evaluate_fold(
            model, test_entries, spec, feature_cfg, fold=fold, epochs_run=log.epochs_run
        )
        logger.info(
            "fold %d: accuracy %.4f (%d/%d), %d epochs",
            fold,
            result.accuracy,
            result.n_correct,
            result.n_test,
            result.epochs_run,
        )
        results.append(result)
        if resume_path is not None:
            resume_path.mkdir(parents=True, exist_ok=True)
            (resume_path / f"fold_{fold}.json").write_text(
                json.dumps(result.to_dict()), encoding="utf-8"
            )
            log.write(resume_path / f"fold_{fold}_training.csv")
            write_confusion_table(result.confusion, resume_path / f"fold_{fold}_confusion.csv")

    return EvalReport(
        dataset_id=spec.dataset_id,
        n_classes=spec.n_classes,
        fold_results=results,
        config_fingerprint=config_fingerprint,
        label=label,
        training_logs=logs,
    )
