"""Knowledge-grounded generative relation extraction pipeline."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    EntityMention,
    Example,
    RelationSchema,
    RelationTriple,
    TaskKind,
    validate_corpus,
)
