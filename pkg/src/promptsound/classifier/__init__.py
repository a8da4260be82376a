from .evaluate import (
    EvalReport,
    FoldResult,
    cross_validate,
    evaluate_fold,
    predict_entries,
    write_confusion_table,
)
from .features import FeatureConfig, featurize, fit_samples, mel_filterbank
from .model import Cnn10, ConvBlock, build_model
from .training import (
    EarlyStopper,
    EpochRecord,
    TrainConfig,
    TrainingLog,
    load_clip_features,
    load_dataset_tensors,
    stratified_validation_split,
    train_fold,
)

__all__ = [
    "EvalReport",
    "FoldResult",
    "cross_validate",
    "evaluate_fold",
    "predict_entries",
    "write_confusion_table",
    "FeatureConfig",
    "featurize",
    "fit_samples",
    "mel_filterbank",
    "Cnn10",
    "ConvBlock",
    "build_model",
    "EarlyStopper",
    "EpochRecord",
    "TrainConfig",
    "TrainingLog",
    "load_clip_features",
    "load_dataset_tensors",
    "stratified_validation_split",
    "train_fold",
]
