from .backends import (
    ENV_API_KEY,
    ENV_ENDPOINT,
    ENV_MODEL,
    HttpChatBackend,
    MockChatBackend,
    encode_caption_seed_tag,
    parse_caption_seed_tag,
)
from .gateway import (
    LlmGateway,
    LlmRequest,
    LlmResponse,
    RateLimiter,
    TransportFailure,
    cache_key,
)

__all__ = [
    "ENV_API_KEY",
    "ENV_ENDPOINT",
    "ENV_MODEL",
    "HttpChatBackend",
    "MockChatBackend",
    "LlmGateway",
    "LlmRequest",
    "LlmResponse",
    "RateLimiter",
    "TransportFailure",
    "cache_key",
    "encode_caption_seed_tag",
    "parse_caption_seed_tag",
]
