"""Evaluation dataset types and their tab-separated file formats."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import FormatError, LangWord
from ..ingest import _read_lines


@dataclass
class SimilarityDataset:
    items: list[tuple[LangWord, LangWord, float]]

    def __post_init__(self):
        if not self.items:
            raise ValueError("similarity dataset is empty")
        if not all(math.isfinite(s) for _, _, s in self.items):
            raise ValueError("similarity scores must be finite")

    def __len__(self):
        return len(self.items)

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(w.lang for a, b, _ in self.items for w in (a, b))


@dataclass
class TranslationDataset:
    pairs: list[tuple[LangWord, LangWord]]

    def __post_init__(self):
        for a, b in self.pairs:
            if a.lang == b.lang:
                raise ValueError(f"translation pair {a} / {b} stays within one language")

    def __len__(self):
        return len(self.pairs)

    def candidates(self, lang: str) -> list[LangWord]:
        """All words of ``lang`` appearing anywhere in the dataset."""
        return sorted({w for pair in self.pairs for w in pair if w.lang == lang})

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(w.lang for pair in self.pairs for w in pair)


@dataclass
class LinguisticMatrix:
    """Per-word distributions over P shared property tags (e.g. supersenses)."""

    tags: list[str]
    columns: dict[LangWord, np.ndarray]
    tag_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.tag_index = {t: i for i, t in enumerate(self.tags)}
        for w, col in self.columns.items():
            if col.shape != (len(self.tags),):
                raise ValueError(f"column for {w} has shape {col.shape}")
            if abs(col.sum() - 1.0) > 1e-9 or np.any(col < 0):
                raise ValueError(f"column for {w} is not a distribution")

    @property
    def vocabulary(self) -> list[LangWord]:
        return sorted(self.columns)

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(w.lang for w in self.columns)

    def matrix(self, words) -> np.ndarray:
        """P x N matrix with one column per word."""
        return np.array([self.columns[w] for w in words]).T.reshape(len(self.tags), len(words))


@dataclass
class Document:
    label: str
    lang: str
    tokens: list[str]


def read_similarity_dataset(path) -> SimilarityDataset:
    items = []
    for n, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError("expected '<lang>:<w1>\\t<lang>:<w2>\\t<score>'", line=n, path=str(path))
        try:
            items.append((LangWord.parse(fields[0]), LangWord.parse(fields[1]), float(fields[2])))
        except ValueError as exc:
            raise FormatError(str(exc), line=n, path=str(path)) from None
    return SimilarityDataset(items)


def read_translation_dataset(path) -> TranslationDataset:
    """Pairs in file order; a line listed in both directions is scored twice."""
    pairs = []
    seen = set()
    for n, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError("expected '<lang>:<word>\\t<lang>:<word>'", line=n, path=str(path))
        try:
            pair = (LangWord.parse(fields[0].strip()), LangWord.parse(fields[1].strip()))
        except ValueError as exc:
            raise FormatError(str(exc), line=n, path=str(path)) from None
        if pair[0].lang == pair[1].lang:
            raise FormatError("translation pair stays within one language", line=n, path=str(path))
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    return TranslationDataset(pairs)


def build_linguistic_matrix(paths, languages=None) -> LinguisticMatrix:
    """Read ``<lang>:<word>\\t<tag>\\t<count>`` annotation files into one matrix.

    The same tag string in different languages is the same property row.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    counts: dict[LangWord, dict[str, float]] = {}
    tags = set()
    for path in paths:
        for n, line in enumerate(_read_lines(path), 1):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError("expected '<lang>:<word>\\t<tag>\\t<count>'", line=n, path=str(path))
            try:
                word = LangWord.parse(fields[0])
                count = float(fields[2])
            except ValueError as exc:
                raise FormatError(str(exc), line=n, path=str(path)) from None
            tag = fields[1].strip()
            if not tag or not math.isfinite(count) or count < 0:
                raise FormatError("tag must be non-empty and count a non-negative number", line=n, path=str(path))
            if languages is not None and word.lang not in languages:
                continue
            row = counts.setdefault(word, {})
            row[tag] = row.get(tag, 0.0) + count
            tags.add(tag)
    tag_list = sorted(tags)
    index = {t: i for i, t in enumerate(tag_list)}
    columns = {}
    for word, row in counts.items():
        total = sum(row.values())
        if total <= 0:
            raise ValueError(f"{word} has zero total annotation count")
        col = np.zeros(len(tag_list))
        for t, c in row.items():
            col[index[t]] = c / total
        columns[word] = col
    return LinguisticMatrix(tag_list, columns)


def read_documents(path) -> list[Document]:
    docs = []
    for n, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not fields[0] or not fields[1]:
            raise FormatError("expected '<label>\\t<lang>\\t<tokens>'", line=n, path=str(path))
        docs.append(Document(fields[0], fields[1], fields[2].split()))
    return docs
