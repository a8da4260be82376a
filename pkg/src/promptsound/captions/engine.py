"""Caption generation under the three prompt strategies.

The Basic strategy is a pure template. The Structured and Exemplar-based
strategies drive a chat LLM with few-shot requests: Structured seeds its
examples from a shipped fixture of attribute-rich sentences and then feeds
back its own accepted captions, Exemplar-based samples its examples from a
human-annotated corpus. Both run every candidate through the uniqueness
filter before a caption set is considered complete.
"""

from __future__ import annotations

import hashlib
import logging
import random
from datetime import datetime, timezone
from importlib import resources
from typing import Callable, Iterable, Sequence

from ..corpus import ExemplarCorpus
from ..errors import CompletenessError, SchemaDerivationError, UniquenessError
from ..llm import LlmGateway, LlmRequest, encode_caption_seed_tag
from ..llm.gateway import GatewayError
from ..types import (
    AttributeSchema,
    CaptionRecord,
    CaptionStrategy,
    FewShotRequest,
    SoundClass,
    normalize_caption,
)

logger = logging.getLogger("promptsound.captions")

BASIC_TEMPLATE = "The sound of a {name}"

# Bounds from the regeneration budget: how many fill/dedup rounds we pay
# for before declaring the caption set unattainable.
DEFAULT_MAX_ROUNDS = 5
DEFAULT_BATCH_SIZE = 20
DEFAULT_K_EXAMPLES = 5

_SYSTEM_TEXT = (
    "You write one-line descriptions of everyday sounds. Each description is "
    "used as a text prompt for an audio generation model, so it must describe "
    "only what the sound is like."
)


def basic_caption(sound_class: SoundClass) -> str:
    """Template caption; applied verbatim even when the article reads awkwardly."""
    return BASIC_TEMPLATE.format(name=sound_class.display_name)


def load_seed_sentences() -> list[str]:
    """Bootstrap example sentences for the first Structured few-shot batch."""
    text = (
        resources.files("promptsound.captions")
        .joinpath("data/str_seed_sentences.txt")
        .read_text(encoding="utf-8")
    )
    return [line.strip() for line in text.splitlines() if line.strip()]


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _stable_seed(*parts: object) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_attribute_schema(gateway: LlmGateway, fixed: bool = False,
                            model_id: str = "gpt-4") -> AttributeSchema:
    """Ask the LLM for the attributes a detailed sound description should cover.

    The offline mock and the ``fixed`` flag both short-circuit to the default
    five-attribute schema so offline runs stay deterministic.
    """
    if fixed or gateway.is_mock:
        return AttributeSchema.fixed_default()
    req = LlmRequest(
        model_id=model_id,
        system_text=_SYSTEM_TEXT,
        user_text=(
            "List the key attributes that make a description of a sound detailed "
            "and specific. Return one attribute name per line, nothing else."
        ),
        temperature=0.2,
        max_tokens=256,
        seed_tag="attribute-schema|v1",
    )
    try:
        response = gateway.complete(req)
    except GatewayError as exc:
        raise SchemaDerivationError(f"attribute derivation failed: {exc}") from exc
    attributes = tuple(dict.fromkeys(_clean_line(l) for l in response.text.splitlines() if _clean_line(l)))
    if not attributes:
        raise SchemaDerivationError("LLM returned no attribute names")
    return AttributeSchema(attributes=attributes, provenance="llm-derived")


def _clean_line(line: str) -> str:
    text = line.strip()
    for prefix in ("-", "*", "•"):
        if text.startswith(prefix):
            text = text[len(prefix):].strip()
    # strip leading enumeration like "3." or "12)"
    head, sep, rest = text.partition(" ")
    if sep and head.rstrip(".)").isdigit():
        text = rest.strip()
    return text


def _structured_instruction(sound_class: SoundClass, schema: AttributeSchema, n: int) -> str:
    attrs = ", ".join(schema.attributes)
    return (
        f"Write {n} different one-sentence descriptions of the sound of a "
        f"{sound_class.display_name}. Where it reads naturally, touch on: {attrs}. "
        "Vary wording and structure between sentences; never repeat a sentence. "
        "Use the example sentences below as a style guide without copying them. "
        f"Every sentence must clearly be about a {sound_class.display_name}. "
        f"Return exactly {n} lines, one sentence per line, with no numbering."
    )


def _exemplar_instruction(sound_class: SoundClass, n: int) -> str:
    return (
        f"Write {n} different one-sentence descriptions of the sound of a "
        f"{sound_class.display_name}, in the style of the human-written example "
        "captions below. Vary wording and structure between sentences; never "
        f"repeat a sentence. Every sentence must clearly be about a "
        f"{sound_class.display_name}. Return exactly {n} lines, one sentence "
        "per line, with no numbering."
    )


def _format_prompt(request: FewShotRequest) -> str:
    examples = "\n".join(f"- {e}" for e in request.examples)
    return f"{request.instruction}\n\nExamples:\n{examples}"


def _parse_caption_lines(text: str) -> list[str]:
    return [_clean_line(line) for line in text.splitlines() if _clean_line(line)]


class _FewShotGenerator:
    """Shared batching/fill/regenerate machinery for the two LLM strategies."""

    def __init__(
        self,
        strategy: CaptionStrategy,
        gateway: LlmGateway,
        rng_seed: int,
        model_id: str,
        temperature: float,
        batch_size: int,
        max_rounds: int,
        instruction_for: Callable[[SoundClass, int], str],
        examples_for: Callable[[SoundClass, int], Sequence[str]],
        on_accept: Callable[[CaptionRecord], None] | None = None,
    ):
        self.strategy = strategy
        self.gateway = gateway
        self.rng_seed = rng_seed
        self.model_id = model_id
        self.temperature = temperature
        self.batch_size = batch_size
        self.max_rounds = max_rounds
        self.instruction_for = instruction_for
        self.examples_for = examples_for
        self.on_accept = on_accept
        self.requests_sent: list[FewShotRequest] = []

    def _complete_batch(
        self,
        sound_class: SoundClass,
        targets: list[tuple[str, int]],
        round_index: int,
    ) -> list[str]:
        examples = tuple(self.examples_for(sound_class, round_index))
        request = FewShotRequest(
            instruction=self.instruction_for(sound_class, len(targets)),
            examples=examples,
            target_class=sound_class,
            batch_size=len(targets),
        )
        self.requests_sent.append(request)
        llm_req = LlmRequest(
            model_id=self.model_id,
            system_text=_SYSTEM_TEXT,
            user_text=_format_prompt(request),
            temperature=self.temperature,
            max_tokens=4096,
            seed_tag=encode_caption_seed_tag(
                sound_class.dataset_id,
                sound_class.display_name,
                self.strategy.value,
                round_index,
                targets,
            ),
        )
        return _parse_caption_lines(self.gateway.complete(llm_req).text)

    def generate_for_class(
        self, sound_class: SoundClass, slot_ids: Sequence[str], copies: int
    ) -> list[CaptionRecord]:
        pending = [(slot, copy) for slot in slot_ids for copy in range(1, copies + 1)]
        records: dict[tuple[str, int], CaptionRecord] = {}
        for round_index in range(self.max_rounds + 1):
            if not pending:
                break
            still_pending: list[tuple[str, int]] = []
            for start in range(0, len(pending), self.batch_size):
                batch = pending[start : start + self.batch_size]
                lines = self._complete_batch(sound_class, batch, round_index)
                for target, text in zip(batch, lines):
                    slot, copy = target
                    record = CaptionRecord(
                        dataset_id=sound_class.dataset_id,
                        sound_class=sound_class,
                        slot_id=slot,
                        copy_index=copy,
                        strategy=self.strategy,
                        text=text,
                        llm_model=self.model_id,
                        created_at=_now_iso(),
                    )
                    records[target] = record
                    if self.on_accept is not None:
                        self.on_accept(record)
                still_pending.extend(batch[len(lines):])
            pending = still_pending
        if pending:
            raise CompletenessError(
                f"{self.strategy.value}: gateway never produced captions for "
                f"{len(pending)} slot(s)",
                gaps=[f"{slot}#c{copy}" for slot, copy in pending],
            )
        ordered = [(slot, copy) for slot in slot_ids for copy in range(1, copies + 1)]
        return [records[t] for t in ordered]

    def regenerate(self, record: CaptionRecord, attempt: int) -> CaptionRecord:
        lines = self._complete_batch(
            record.sound_class, [(record.slot_id, record.copy_index)], attempt
        )
        if not lines:
            raise CompletenessError(
                f"{self.strategy.value}: regeneration returned no caption",
                gaps=[f"{record.slot_id}#c{record.copy_index}"],
            )
        return CaptionRecord(
            dataset_id=record.dataset_id,
            sound_class=record.sound_class,
            slot_id=record.slot_id,
            copy_index=record.copy_index,
            strategy=record.strategy,
            text=lines[0],
            llm_model=record.llm_model,
            created_at=_now_iso(),
        )


def ensure_unique(
    candidates: list[CaptionRecord],
    regenerate: Callable[[CaptionRecord, int], CaptionRecord],
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> list[CaptionRecord]:
    """Replace duplicated captions until normalized texts are distinct.

    Duplicates are detected per (class, strategy) on the case-folded,
    whitespace-collapsed text. The first occurrence is kept untouched;
    later ones are regenerated through the callback. Slots still colliding
    after ``max_rounds`` raise a UniquenessError naming them.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    seen: dict[tuple[str, int, str], set[str]] = {}
    result: list[CaptionRecord | None] = [None] * len(candidates)
    duplicates: list[tuple[int, CaptionRecord]] = []
    for i, record in enumerate(candidates):
        group = (record.dataset_id, record.sound_class.class_index, record.strategy.value)
        texts = seen.setdefault(group, set())
        normalized = normalize_caption(record.text)
        if normalized in texts:
            duplicates.append((i, record))
        else:
            texts.add(normalized)
            result[i] = record

    for attempt in range(1, max_rounds + 1):
        if not duplicates:
            break
        remaining: list[tuple[int, CaptionRecord]] = []
        for i, record in duplicates:
            replacement = regenerate(record, attempt)
            group = (
                replacement.dataset_id,
                replacement.sound_class.class_index,
                replacement.strategy.value,
            )
            texts = seen.setdefault(group, set())
            normalized = normalize_caption(replacement.text)
            if normalized in texts:
                remaining.append((i, replacement))
            else:
                texts.add(normalized)
                result[i] = replacement
        duplicates = remaining

    if duplicates:
        slots = [(rec.slot_id, rec.copy_index) for _, rec in duplicates]
        raise UniquenessError(
            f"{len(duplicates)} caption(s) still duplicated after {max_rounds} rounds: "
            + ", ".join(f"{s}#c{c}" for s, c in slots),
            slots=slots,
        )
    return [r for r in result if r is not None]


def generate_basic_captions(
    classes: Sequence[SoundClass],
    slots: dict[SoundClass, Sequence[str]],
    copies: int,
) -> list[CaptionRecord]:
    """One template caption per (slot, copy); no LLM involved."""
    created = _now_iso()
    records = []
    for sound_class in classes:
        text = basic_caption(sound_class)
        for slot in slots[sound_class]:
            for copy in range(1, copies + 1):
                records.append(
                    CaptionRecord(
                        dataset_id=sound_class.dataset_id,
                        sound_class=sound_class,
                        slot_id=slot,
                        copy_index=copy,
                        strategy=CaptionStrategy.BSC,
                        text=text,
                        llm_model="template",
                        created_at=created,
                    )
                )
    return records


def generate_structured_captions(
    classes: Sequence[SoundClass],
    slots: dict[SoundClass, Sequence[str]],
    copies: int,
    schema: AttributeSchema,
    gateway: LlmGateway,
    rng_seed: int,
    model_id: str = "gpt-4",
    temperature: float = 1.0,
    k_examples: int = DEFAULT_K_EXAMPLES,
    batch_size: int = DEFAULT_BATCH_SIZE,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> list[CaptionRecord]:
    """Attribute-guided captions; examples feed back from accepted captions."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    seeds = load_seed_sentences()
    accepted_texts: list[str] = []

    def examples_for(sound_class: SoundClass, round_index: int) -> list[str]:
        pool = accepted_texts if accepted_texts else seeds
        rng = random.Random(_stable_seed(rng_seed, "str", sound_class.class_index,
                                         round_index, len(accepted_texts)))
        k = min(k_examples, len(pool))
        return rng.sample(pool, k)

    generator = _FewShotGenerator(
        strategy=CaptionStrategy.STR,
        gateway=gateway,
        rng_seed=rng_seed,
        model_id=model_id,
        temperature=temperature,
        batch_size=batch_size,
        max_rounds=max_rounds,
        instruction_for=lambda cls, n: _structured_instruction(cls, schema, n),
        examples_for=examples_for,
        on_accept=lambda rec: accepted_texts.append(rec.text),
    )
    candidates: list[CaptionRecord] = []
    for sound_class in classes:
        candidates.extend(generator.generate_for_class(sound_class, slots[sound_class], copies))
    unique = ensure_unique(candidates, generator.regenerate, max_rounds)
    _log_attribute_coverage(unique, schema)
    return unique


def generate_exemplar_captions(
    classes: Sequence[SoundClass],
    slots: dict[SoundClass, Sequence[str]],
    copies: int,
    corpus: ExemplarCorpus,
    gateway: LlmGateway,
    rng_seed: int,
    k_examples: int = DEFAULT_K_EXAMPLES,
    model_id: str = "gpt-4",
    temperature: float = 1.0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> list[CaptionRecord]:
    """Few-shot captions guided by human-annotated exemplar captions."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if k_examples < 1:
        raise ValueError("k_examples must be >= 1")
    if corpus.caption_pool_size == 0:
        raise ValueError("exemplar corpus is empty")

    def examples_for(sound_class: SoundClass, round_index: int) -> list[str]:
        seed = _stable_seed(rng_seed, "exe", sound_class.class_index, round_index)
        return corpus.sample_exemplars(min(k_examples, corpus.caption_pool_size), seed)

    generator = _FewShotGenerator(
        strategy=CaptionStrategy.EXE,
        gateway=gateway,
        rng_seed=rng_seed,
        model_id=model_id,
        temperature=temperature,
        batch_size=batch_size,
        max_rounds=max_rounds,
        instruction_for=_exemplar_instruction,
        examples_for=examples_for,
    )
    candidates: list[CaptionRecord] = []
    for sound_class in classes:
        candidates.extend(generator.generate_for_class(sound_class, slots[sound_class], copies))
    return ensure_unique(candidates, generator.regenerate, max_rounds)


def _log_attribute_coverage(records: Iterable[CaptionRecord], schema: AttributeSchema) -> None:
    # Coverage is diagnostic only: the LLM is asked for the attributes but
    # not forced to include every one in every sentence.
    records = list(records)
    if not records:
        return
    counts = {attr: 0 for attr in schema.attributes}
    for record in records:
        lowered = record.text.lower()
        for attr in schema.attributes:
            if attr.split()[0].lower() in lowered:
                counts[attr] += 1
    total = len(records)
    coverage = ", ".join(f"{attr}={count / total:.0%}" for attr, count in counts.items())
    logger.info("attribute keyword coverage over %d captions: %s", total, coverage)
