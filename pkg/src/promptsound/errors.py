"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class PromptSoundError(Exception):
    """Base class for all toolkit errors."""


class GatewayError(PromptSoundError):
    """LLM transport failed after exhausting the retry budget."""


class RequestError(PromptSoundError):
    """The LLM service rejected the request (non-retryable, e.g. HTTP 4xx)."""


class SchemaDerivationError(PromptSoundError):
    """Attribute schema could not be derived from the language model."""


class UniquenessError(PromptSoundError):
    """Caption uniqueness could not be achieved within the regeneration budget.

    Carries the slots that remained duplicated so callers can report or
    retry them specifically.
    """

    def __init__(self, message: str, slots: list[tuple[str, int]] | None = None):
        super().__init__(message)
        self.slots = slots or []


class CaptionFileError(PromptSoundError):
    """A caption file line could not be parsed; carries the line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class CorpusFormatError(PromptSoundError):
    """Exemplar corpus file does not match the expected caption table format."""


class BackendUnavailableError(PromptSoundError):
    """A text-to-audio backend could not be loaded or reached."""


class GenerationError(PromptSoundError):
    """A single generation job failed; carries backend diagnostics."""


class IntegrityError(PromptSoundError):
    """Real dataset metadata does not match its published structure."""


class CompletenessError(PromptSoundError):
    """Required captions or generated files are missing; carries the gaps."""

    def __init__(self, message: str, gaps: list[str] | None = None):
        super().__init__(message)
        self.gaps = gaps or []


class CompositionError(PromptSoundError):
    """Manifests cannot be combined (spec mismatch or clip id collision)."""


class ProtocolError(PromptSoundError):
    """The evaluation protocol cannot proceed (e.g. no real clips to test on)."""


class ConfigError(PromptSoundError):
    """Experiment configuration is invalid or inconsistent."""
