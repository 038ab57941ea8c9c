"""Massively multilingual word embeddings: estimators and evaluation suite."""

from .core import (
    Dictionary,
    EmbeddingSet,
    FormatError,
    LangWord,
    MonoCorpus,
    ParallelCorpus,
    coverage,
    load_embeddings,
    normalize_unit,
    save_embeddings,
)

__version__ = "0.1.0"

__all__ = [
    "Dictionary",
    "EmbeddingSet",
    "FormatError",
    "LangWord",
    "MonoCorpus",
    "ParallelCorpus",
    "coverage",
    "load_embeddings",
    "normalize_unit",
    "save_embeddings",
]
