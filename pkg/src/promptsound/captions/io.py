"""Caption file format: one flat JSON object per line, order-independent."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import CaptionFileError
from ..types import CaptionRecord, CaptionStrategy, SoundClass

_FIELDS = (
    "dataset_id",
    "slot_id",
    "copy_index",
    "strategy",
    "class_index",
    "class_name",
    "text",
    "llm_model",
    "created_at",
)


def write_caption_file(records: list[CaptionRecord] | set[CaptionRecord], path: str | Path) -> None:
    records = sorted(records, key=lambda r: r.key)
    keys = set()
    for record in records:
        if record.key in keys:
            raise CaptionFileError(
                f"duplicate caption key {record.key}; a caption set holds one "
                "record per (dataset, slot, copy, strategy)"
            )
        keys.add(record.key)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "dataset_id": record.dataset_id,
                        "slot_id": record.slot_id,
                        "copy_index": record.copy_index,
                        "strategy": record.strategy.value,
                        "class_index": record.sound_class.class_index,
                        "class_name": record.sound_class.display_name,
                        "text": record.text,
                        "llm_model": record.llm_model,
                        "created_at": record.created_at,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_caption_file(path: str | Path) -> set[CaptionRecord]:
    path = Path(path)
    records: set[CaptionRecord] = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CaptionFileError(
                    f"{path}:{line_no}: invalid JSON: {exc}", line_number=line_no
                ) from None
            missing = [f for f in _FIELDS if f not in payload]
            if missing:
                raise CaptionFileError(
                    f"{path}:{line_no}: missing field(s): {', '.join(missing)}",
                    line_number=line_no,
                )
            try:
                records.add(
                    CaptionRecord(
                        dataset_id=payload["dataset_id"],
                        sound_class=SoundClass(
                            dataset_id=payload["dataset_id"],
                            class_index=int(payload["class_index"]),
                            display_name=payload["class_name"],
                        ),
                        slot_id=payload["slot_id"],
                        copy_index=int(payload["copy_index"]),
                        strategy=CaptionStrategy.parse(payload["strategy"]),
                        text=payload["text"],
                        llm_model=payload["llm_model"],
                        created_at=payload["created_at"],
                    )
                )
            except (ValueError, TypeError) as exc:
                raise CaptionFileError(
                    f"{path}:{line_no}: {exc}", line_number=line_no
                ) from None
    return records
