"""Uniform chat-completion client: caching, retries, rate limiting.

The gateway wraps any backend implementing ``complete_once`` and adds the
operational layers around it. Identical requests are served from a disk
cache keyed by a digest of the canonicalized request, so an interrupted
caption run never re-spends LLM calls it already paid for.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from collections import deque
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..errors import GatewayError, RequestError

logger = logging.getLogger("promptsound.llm")


@dataclass(frozen=True)
class LlmRequest:
    model_id: str
    system_text: str
    user_text: str
    temperature: float = 1.0
    max_tokens: int = 1024
    seed_tag: str = ""

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")


@dataclass(frozen=True)
class LlmResponse:
    text: str
    cached: bool
    latency: float  # seconds


def cache_key(req: LlmRequest) -> str:
    """Hex digest of the canonicalized request; stable across processes."""
    canonical = json.dumps(asdict(req), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class TransportFailure(Exception):
    """Retryable backend failure (network, timeout, 5xx)."""


class ChatBackend(Protocol):
    name: str

    def complete_once(self, req: LlmRequest) -> str:
        """Single completion attempt; raises TransportFailure or RequestError."""
        ...


class ResponseCache:
    """Disk-backed response cache; entries are written atomically."""

    def __init__(self, cache_dir: str | Path | None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._mem: dict[str, str] = {}
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        assert self.cache_dir is not None
        return self.cache_dir / key[:2] / f"{key}.json"

    def get(self, key: str) -> str | None:
        with self._lock:
            if key in self._mem:
                return self._mem[key]
        if self.cache_dir is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return None
        text = entry.get("text")
        if text is None:
            return None
        with self._lock:
            self._mem[key] = text
        return text

    def put(self, key: str, text: str) -> None:
        with self._lock:
            self._mem[key] = text
        if self.cache_dir is None:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"text": text, "created_at": time.time()}, fh, ensure_ascii=False)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class RateLimiter:
    """Shared limiter enforcing the configured requests-per-minute ceiling.

    Keeps a sliding window of grant timestamps so the count in any 60 s
    window never exceeds ``requests_per_minute``, which is the contract the
    rest of the system relies on.
    """

    def __init__(
        self,
        requests_per_minute: float | None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.requests_per_minute = requests_per_minute
        self._clock = clock
        self._sleep = sleep
        self._grants: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if not self.requests_per_minute:
            return
        limit = int(self.requests_per_minute)
        while True:
            with self._lock:
                now = self._clock()
                while self._grants and now - self._grants[0] >= 60.0:
                    self._grants.popleft()
                if len(self._grants) < limit:
                    self._grants.append(now)
                    return
                wait = 60.0 - (now - self._grants[0])
            self._sleep(max(wait, 1e-3))


class LlmGateway:
    """Chat-completion gateway with disk cache, retries and rate limiting."""

    def __init__(
        self,
        backend: ChatBackend,
        cache_dir: str | Path | None = None,
        retries: int = 3,
        backoff_base: float = 1.0,
        requests_per_minute: float | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.backend = backend
        self.cache = ResponseCache(cache_dir)
        self.retries = retries
        self.backoff_base = backoff_base
        self.rate_limiter = RateLimiter(requests_per_minute, sleep=sleep)
        self._sleep = sleep
        self._key_locks: dict[str, threading.Lock] = {}
        self._key_locks_guard = threading.Lock()
        self.calls_made = 0  # completed backend calls, for idempotence checks

    @property
    def is_mock(self) -> bool:
        return getattr(self.backend, "is_mock", False)

    def _lock_for(self, key: str) -> threading.Lock:
        with self._key_locks_guard:
            return self._key_locks.setdefault(key, threading.Lock())

    def complete(self, req: LlmRequest) -> LlmResponse:
        key = cache_key(req)
        start = time.monotonic()
        cached = self.cache.get(key)
        if cached is not None:
            return LlmResponse(text=cached, cached=True, latency=time.monotonic() - start)

        # Per-key lock: at most one backend call per unique key even under
        # concurrent identical requests.
        with self._lock_for(key):
            cached = self.cache.get(key)
            if cached is not None:
                return LlmResponse(text=cached, cached=True, latency=time.monotonic() - start)
            text = self._complete_with_retries(req)
            self.cache.put(key, text)
        return LlmResponse(text=text, cached=False, latency=time.monotonic() - start)

    def _complete_with_retries(self, req: LlmRequest) -> str:
        attempts = self.retries + 1
        last_cause: Exception | None = None
        for attempt in range(attempts):
            if attempt > 0:
                wait = self.backoff_base * (2 ** (attempt - 1))
                logger.warning(
                    "llm retry attempt=%d/%d wait=%.1fs model=%s cause=%s",
                    attempt,
                    self.retries,
                    wait,
                    req.model_id,
                    last_cause,
                )
                self._sleep(wait)
            self.rate_limiter.acquire()
            try:
                text = self.backend.complete_once(req)
            except RequestError:
                raise
            except TransportFailure as exc:
                last_cause = exc
                continue
            self.calls_made += 1
            return text
        raise GatewayError(
            f"LLM transport failed after {self.retries} retries: {last_cause}"
        ) from last_cause
