from __future__ import annotations

import pytest

from promptsound.datasets import load_real_manifest
from promptsound.fixtures import (
    build_toy_dataset,
    write_esc50_style_metadata,
    write_us8k_style_metadata,
)
from promptsound.llm import LlmGateway, MockChatBackend
from promptsound.types import CaptionStrategy, SoundClass


@pytest.fixture(scope="session")
def esc50_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("esc50_meta")
    metadata = write_esc50_style_metadata(root / "esc50.csv")
    return load_real_manifest("esc50", metadata, root / "audio")


@pytest.fixture(scope="session")
def us8k_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("us8k_meta")
    metadata = write_us8k_style_metadata(root / "UrbanSound8K.csv")
    return load_real_manifest("us8k", metadata, root / "audio")


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("toy_data")
    return build_toy_dataset(root, n_classes=4, clips_per_class=8, n_folds=2, duration=1.0)


@pytest.fixture(scope="session")
def toy_manifest(toy_dataset):
    return load_real_manifest(
        "toy", toy_dataset.metadata_path, toy_dataset.audio_root, spec=toy_dataset.spec
    )


@pytest.fixture
def mock_gateway():
    return LlmGateway(MockChatBackend())


def make_class(index: int = 0, name: str = "dog", dataset_id: str = "toy") -> SoundClass:
    return SoundClass(dataset_id=dataset_id, class_index=index, display_name=name)


STRATEGIES = (CaptionStrategy.BSC, CaptionStrategy.STR, CaptionStrategy.EXE)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of a run."""
    lines: dict[str, str] = {}
    for outcome, status in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if outcome == "passed" and getattr(report, "when", "call") != "call":
                continue
            name = nodeid.split("::")[-1]
            if status == "FAIL" or name not in lines:
                lines[name] = status
    if lines:
        terminalreporter.section("acceptance criteria")
        for name in sorted(lines):
            terminalreporter.write_line(f"{name}: {lines[name]}")
