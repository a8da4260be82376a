from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from promptsound.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_mini_config(root: Path, name: str = "cli-mini", **overrides) -> Path:
    cfg = {
        "name": name,
        "dataset": {
            "id": "toy",
            "metadata": "fixtures/toy/metadata.csv",
            "audio_root": "fixtures/toy/audio",
            "spec": {"n_classes": 3, "n_folds": 2, "expected_total": 12, "clip_duration": 0.5},
        },
        "mode": "replace",
        "strategies": ["EXE"],
        "backends": ["mock-tone"],
        "paths": {
            "out": f"runs/{name}",
            "generated_root": "generated",
            "corpus": "fixtures/toy/corpus.csv",
        },
        "train": {"max_epochs": 2, "early_stop_patience": 2, "batch_size": 8},
        "rng_seed": 3,
    }
    cfg.update(overrides)
    path = root / f"{name}.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


@pytest.fixture
def workspace(runner, tmp_path):
    result = runner.invoke(
        main,
        ["fixture", "--out", str(tmp_path / "fixtures/toy"), "--classes", "3",
         "--clips-per-class", "4", "--folds", "2", "--duration", "0.5"],
    )
    assert result.exit_code == 0, result.output
    return tmp_path


def test_fixture_command_reports_layout(runner, tmp_path):
    result = runner.invoke(main, ["fixture", "--out", str(tmp_path / "f")])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["classes"] == 4
    assert payload["total"] == 32
    assert Path(payload["metadata"]).exists()
    assert Path(payload["corpus"]).exists()


def test_captions_command(runner, workspace):
    config = write_mini_config(workspace)
    result = runner.invoke(main, ["captions", "--config", str(config), "--mock-llm"])
    assert result.exit_code == 0, result.output
    assert "EXE: 12 captions" in result.output
    caption_files = list((workspace / "runs/cli-mini/captions").glob("*.jsonl"))
    assert len(caption_files) == 1


def test_generate_and_assemble_commands(runner, workspace):
    config = write_mini_config(workspace)
    result = runner.invoke(
        main, ["generate", "--config", str(config), "--mock-llm", "--mock-tta"]
    )
    assert result.exit_code == 0, result.output
    wavs = list((workspace / "generated").rglob("*.wav"))
    assert len(wavs) == 12
    result = runner.invoke(
        main, ["assemble", "--config", str(config), "--mock-llm", "--mock-tta"]
    )
    assert result.exit_code == 0, result.output
    assert (workspace / "runs/cli-mini/manifests/assembled.csv").exists()


def test_run_completes_with_exit_zero_and_writes_row(runner, workspace):
    config = write_mini_config(workspace)
    result = runner.invoke(
        main, ["run", "--config", str(config), "--mock-llm", "--mock-tta"]
    )
    assert result.exit_code == 0, result.output
    row = json.loads((workspace / "runs/cli-mini/row.json").read_text())
    assert row["label"] == "EXE / Mock Tone"
    report = json.loads((workspace / "runs/cli-mini/report.json").read_text())
    assert {f["fold"] for f in report["folds"]} == {1, 2}


def test_run_with_fold_subset(runner, workspace):
    config = write_mini_config(workspace, name="cli-folds")
    result = runner.invoke(
        main,
        ["run", "--config", str(config), "--mock-llm", "--mock-tta", "--folds", "1"],
    )
    assert result.exit_code == 0, result.output
    report = json.loads((workspace / "runs/cli-folds/report.json").read_text())
    assert [f["fold"] for f in report["folds"]] == [1]


def test_out_and_seed_overrides(runner, workspace):
    config = write_mini_config(workspace, name="cli-override")
    result = runner.invoke(
        main,
        ["run", "--config", str(config), "--mock-llm", "--mock-tta",
         "--out", str(workspace / "elsewhere"), "--seed", "11"],
    )
    assert result.exit_code == 0, result.output
    assert (workspace / "elsewhere" / "row.json").exists()


def test_invalid_fold_is_rejected(runner, workspace):
    config = write_mini_config(workspace, name="cli-badfold")
    result = runner.invoke(
        main, ["run", "--config", str(config), "--mock-llm", "--mock-tta", "--folds", "9"]
    )
    assert result.exit_code != 0


def test_missing_generated_audio_fails_with_stage_name(runner, workspace):
    config = write_mini_config(workspace, name="cli-noassets")
    result = runner.invoke(
        main, ["assemble", "--config", str(config), "--mock-llm"]
    )
    assert result.exit_code != 0
    assert "missing" in result.output.lower()


def test_report_command_aggregates_runs(runner, workspace):
    config = write_mini_config(workspace, name="cli-report")
    assert (
        runner.invoke(main, ["run", "--config", str(config), "--mock-llm", "--mock-tta"]).exit_code
        == 0
    )
    result = runner.invoke(
        main,
        ["report", str(workspace / "runs/cli-report"), "--out", str(workspace / "tables")],
    )
    assert result.exit_code == 0, result.output
    table = workspace / "tables" / "results_table.csv"
    assert table.exists()
    assert "EXE / Mock Tone" in table.read_text()


def test_baseline_mode_via_cli(runner, workspace):
    config = write_mini_config(
        workspace, name="cli-baseline", mode="baseline", strategies=[], backends=[],
        paths={"out": "runs/cli-baseline"},
    )
    result = runner.invoke(main, ["run", "--config", str(config), "--mock-llm"])
    assert result.exit_code == 0, result.output
    row = json.loads((workspace / "runs/cli-baseline/row.json").read_text())
    assert row["label"] == "Baseline"
    assert row["mode"] == "baseline"
    # Quality at this epoch budget is not the point here; the acceptance
    # suite covers convergence on the tone fixture.
    assert 0.0 <= row["pooled_accuracy"] <= 1.0
