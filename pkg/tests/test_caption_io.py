from __future__ import annotations

import json

import pytest

from promptsound.captions import read_caption_file, write_caption_file
from promptsound.errors import CaptionFileError
from promptsound.types import CaptionRecord, CaptionStrategy

from .conftest import make_class


def records(n: int) -> set[CaptionRecord]:
    return {
        CaptionRecord(
            dataset_id="toy",
            sound_class=make_class(i % 3, f"class{i % 3}"),
            slot_id=f"slot{i}",
            copy_index=1 + i % 2,
            strategy=CaptionStrategy.EXE,
            text=f"caption text {i}",
            llm_model="mock",
            created_at="2026-01-01T00:00:00+00:00",
        )
        for i in range(n)
    }


def test_round_trip_identity(tmp_path):
    original = records(100)
    path = tmp_path / "captions.jsonl"
    write_caption_file(original, path)
    assert read_caption_file(path) == original


def test_empty_set_round_trips(tmp_path):
    path = tmp_path / "empty.jsonl"
    write_caption_file(set(), path)
    assert path.exists()
    assert read_caption_file(path) == set()


def test_missing_text_field_reports_line_number(tmp_path):
    path = tmp_path / "captions.jsonl"
    write_caption_file(records(3), path)
    lines = path.read_text().splitlines()
    broken = json.loads(lines[1])
    del broken["text"]
    lines[1] = json.dumps(broken)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CaptionFileError) as excinfo:
        read_caption_file(path)
    assert excinfo.value.line_number == 2
    assert "text" in str(excinfo.value)


def test_invalid_json_line_reports_line_number(tmp_path):
    path = tmp_path / "captions.jsonl"
    write_caption_file(records(2), path)
    with path.open("a") as fh:
        fh.write("{not json\n")
    with pytest.raises(CaptionFileError) as excinfo:
        read_caption_file(path)
    assert excinfo.value.line_number == 3


def test_duplicate_slot_key_rejected_on_write(tmp_path):
    one = next(iter(records(1)))
    clash = CaptionRecord(
        dataset_id=one.dataset_id,
        sound_class=one.sound_class,
        slot_id=one.slot_id,
        copy_index=one.copy_index,
        strategy=one.strategy,
        text="different text, same slot key",
        llm_model="mock",
        created_at="2026-01-02T00:00:00+00:00",
    )
    with pytest.raises(CaptionFileError, match="duplicate"):
        write_caption_file([one, clash], tmp_path / "bad.jsonl")


def test_file_format_is_flat_json_objects(tmp_path):
    path = tmp_path / "captions.jsonl"
    write_caption_file(records(2), path)
    for line in path.read_text().splitlines():
        payload = json.loads(line)
        assert set(payload) == {
            "dataset_id", "slot_id", "copy_index", "strategy", "class_index",
            "class_name", "text", "llm_model", "created_at",
        }
