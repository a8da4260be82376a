from .engine import (
    BASIC_TEMPLATE,
    basic_caption,
    derive_attribute_schema,
    ensure_unique,
    generate_basic_captions,
    generate_exemplar_captions,
    generate_structured_captions,
    load_seed_sentences,
)
from .io import read_caption_file, write_caption_file

__all__ = [
    "BASIC_TEMPLATE",
    "basic_caption",
    "derive_attribute_schema",
    "ensure_unique",
    "generate_basic_captions",
    "generate_exemplar_captions",
    "generate_structured_captions",
    "load_seed_sentences",
    "read_caption_file",
    "write_caption_file",
]
