from .config import (
    BACKEND_DISPLAY_NAMES,
    MODES,
    ExperimentConfig,
    LlmSettings,
    TtaSettings,
    load_config,
)
from .report import ResultsRow, check_expected, collect_rows, emit_report
from .runner import ExperimentRunner, StageError

__all__ = [
    "BACKEND_DISPLAY_NAMES",
    "MODES",
    "ExperimentConfig",
    "LlmSettings",
    "TtaSettings",
    "load_config",
    "ResultsRow",
    "check_expected",
    "collect_rows",
    "emit_report",
    "ExperimentRunner",
    "StageError",
]
