"""Chat backends: the deterministic offline mock and an HTTP client.

The mock cooperates with the caption engine through the request's
``seed_tag``: when the tag encodes a caption batch (dataset, class,
regeneration round and the exact (slot, copy) targets), the mock emits one
line per target whose wording is a pure function of that target. This keeps
offline runs fully reproducible and gives every caption the class name as a
substring, which the test suite leans on.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import httpx

from ..errors import RequestError
from .gateway import LlmRequest, TransportFailure

ENV_ENDPOINT = "PROMPTSOUND_LLM_ENDPOINT"
ENV_MODEL = "PROMPTSOUND_LLM_MODEL"
ENV_API_KEY = "PROMPTSOUND_LLM_API_KEY"

_SEED_TAG_PREFIX = "captions|v1"


@dataclass(frozen=True)
class CaptionBatchTag:
    """Decoded caption-batch seed tag."""

    dataset_id: str
    class_name: str
    strategy: str
    round_index: int
    targets: tuple[tuple[str, int], ...]  # (slot_id, copy_index)


def encode_caption_seed_tag(
    dataset_id: str,
    class_name: str,
    strategy: str,
    round_index: int,
    targets: list[tuple[str, int]],
) -> str:
    joined = ";".join(f"{slot}:{copy}" for slot, copy in targets)
    return f"{_SEED_TAG_PREFIX}|{dataset_id}|{class_name}|{strategy}|{round_index}|{joined}"


def parse_caption_seed_tag(tag: str) -> CaptionBatchTag | None:
    if not tag.startswith(_SEED_TAG_PREFIX + "|"):
        return None
    parts = tag.split("|")
    if len(parts) != 7:
        return None
    _, _, dataset_id, class_name, strategy, round_text, joined = parts
    try:
        round_index = int(round_text)
        targets = []
        for item in joined.split(";"):
            slot, copy = item.rsplit(":", 1)
            targets.append((slot, int(copy)))
    except ValueError:
        return None
    return CaptionBatchTag(dataset_id, class_name, strategy, round_index, tuple(targets))


_ADJECTIVES = (
    "sharp", "low", "bright", "muffled", "rapid", "steady", "harsh", "soft",
    "ringing", "pulsing", "distant", "close", "rough", "smooth", "piercing",
    "deep", "faint", "booming", "crisp", "hollow", "jagged", "mellow",
    "shrill", "thin", "warm", "brittle", "heavy", "light", "grating",
    "sweeping", "stuttering", "droning",
)

_TEXTURES = (
    "metallic", "woody", "airy", "resonant", "buzzing", "hissing",
    "clattering", "rumbling", "whistling", "crackling", "humming",
    "thudding", "scraping", "chiming", "fluttering", "roaring", "squeaking",
    "knocking", "swirling", "popping", "rustling", "gurgling", "tapping",
    "whirring", "clicking", "splashing", "creaking", "banging", "sizzling",
    "echoing", "throbbing", "wailing",
)

_CONTEXTS = (
    "in an open field", "near a busy street", "inside a small room",
    "under a metal roof", "by the waterside", "in a long corridor",
    "close to the listener", "far in the distance", "against steady wind",
    "in an empty warehouse", "on a wooden floor", "behind a thin wall",
    "at the edge of a park", "over loose gravel", "in a tiled stairwell",
    "beneath a bridge", "within dense foliage", "across a courtyard",
    "along a fence line", "inside a vehicle", "near heavy machinery",
    "on a rooftop", "through an open door", "around a corner",
)


def _pick(source: str, *lists: tuple[str, ...]) -> list[str]:
    digest = hashlib.sha256(source.encode("utf-8")).digest()
    return [words[digest[i] % len(words)] for i, words in enumerate(lists)]


def mock_caption_line(class_name: str, slot_id: str, copy_index: int, round_index: int) -> str:
    adj, texture, context = _pick(
        f"{slot_id}|{copy_index}|{round_index}", _ADJECTIVES, _TEXTURES, _CONTEXTS
    )
    return f"{class_name} sound: {adj} and {texture}, {context}"


class MockChatBackend:
    """Deterministic offline backend; performs no I/O of any kind."""

    name = "mock"
    is_mock = True

    def complete_once(self, req: LlmRequest) -> str:
        tag = parse_caption_seed_tag(req.seed_tag)
        if tag is not None:
            lines = [
                mock_caption_line(tag.class_name, slot, copy, tag.round_index)
                for slot, copy in tag.targets
            ]
            return "\n".join(lines)
        # Generic fallback: echo the subject after the last colon so the
        # response provably depends on the request.
        subject = req.user_text.rsplit(":", 1)[-1].strip() or req.user_text.strip()
        adj, texture = _pick(req.user_text + "|" + req.seed_tag, _ADJECTIVES, _TEXTURES)[:2]
        return f"{subject} sound: {adj} and {texture}"


class HttpChatBackend:
    """OpenAI-style chat-completion endpoint over HTTP.

    Endpoint, model and credential come from the constructor or from
    PROMPTSOUND_LLM_ENDPOINT / PROMPTSOUND_LLM_MODEL / PROMPTSOUND_LLM_API_KEY.
    """

    name = "http"
    is_mock = False

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        timeout: float = 120.0,
        client: httpx.Client | None = None,
    ):
        self.endpoint = (endpoint or os.environ.get(ENV_ENDPOINT, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        if not self.endpoint:
            raise ValueError(
                f"no LLM endpoint configured (set {ENV_ENDPOINT} or pass endpoint=)"
            )
        self._client = client or httpx.Client(timeout=timeout)

    def complete_once(self, req: LlmRequest) -> str:
        payload = {
            "model": req.model_id,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = self._client.post(
                f"{self.endpoint}/chat/completions", json=payload, headers=headers
            )
        except httpx.HTTPError as exc:
            raise TransportFailure(str(exc)) from exc
        if 400 <= response.status_code < 500:
            raise RequestError(
                f"LLM service rejected request: HTTP {response.status_code}: {response.text[:500]}"
            )
        if response.status_code >= 500:
            raise TransportFailure(f"HTTP {response.status_code}")
        try:
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise TransportFailure(f"malformed completion response: {exc}") from exc
