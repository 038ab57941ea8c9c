"""Shared domain types, the multilingual embedding store and its text format.

Every word in the shared space is keyed by a :class:`LangWord`, a
``(language, surface)`` pair, so the same surface form may carry different
vectors in different languages.  Embedding files look like::

    3 4
    en:dog 0.1 0.2 0.3 0.4
    it:cane 0.1 0.2 0.3 0.5
    da:hund 0.0 0.2 0.3 0.4

The header holds ``<entry_count> <dim>``.  Keys split on the first colon, so
surfaces may contain colons themselves.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class FormatError(ValueError):
    """A malformed input file.  ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.message = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ZeroVectorWarning(UserWarning):
    """Raised through :mod:`warnings` when unit normalization meets all-zero vectors."""

    def __init__(self, keys: Sequence["LangWord"]):
        self.keys = list(keys)
        shown = ", ".join(str(k) for k in self.keys[:5])
        more = "" if len(self.keys) <= 5 else f" (+{len(self.keys) - 5} more)"
        super().__init__(f"{len(self.keys)} zero vector(s) left unnormalized: {shown}{more}")


@dataclass(frozen=True, order=True)
class LangWord:
    lang: str
    surface: str

    def __post_init__(self):
        if not self.lang or ":" in self.lang or any(ch.isspace() for ch in self.lang):
            raise ValueError(f"invalid language code {self.lang!r}")
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"invalid surface form {self.surface!r}")

    @classmethod
    def parse(cls, key: str) -> "LangWord":
        lang, sep, surface = key.partition(":")
        if not sep:
            raise ValueError(f"key {key!r} has no 'lang:' prefix")
        return cls(lang, surface)

    def __str__(self):
        return f"{self.lang}:{self.surface}"


class EmbeddingSet:
    """An immutable partial map ``LangWord -> R^dim``.

    Vectors are held in one read-only float64 matrix; ``keys[i]`` owns row ``i``.
    """

    __slots__ = ("_keys", "_index", "_vectors", "_languages")

    def __init__(self, keys: Sequence[LangWord], vectors, dim: int | None = None):
        keys = list(keys)
        vectors = np.array(vectors, dtype=np.float64, copy=True)
        if vectors.ndim == 1 and vectors.size == 0:
            if dim is None:
                raise ValueError("dim is required for an empty EmbeddingSet")
            vectors = vectors.reshape(0, dim)
        if vectors.ndim != 2 or vectors.shape[0] != len(keys):
            raise ValueError(f"expected a {len(keys)} x dim matrix, got shape {vectors.shape}")
        if dim is not None and vectors.shape[1] != dim:
            raise ValueError(f"vectors have {vectors.shape[1]} columns, expected {dim}")
        if vectors.shape[1] < 1:
            raise ValueError("dim must be positive")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding vectors must be finite")
        index = {}
        for i, key in enumerate(keys):
            if not isinstance(key, LangWord):
                raise TypeError(f"keys must be LangWord, got {type(key).__name__}")
            if key in index:
                raise ValueError(f"duplicate key {key}")
            index[key] = i
        vectors.setflags(write=False)
        self._keys = tuple(keys)
        self._index = index
        self._vectors = vectors
        self._languages = frozenset(k.lang for k in keys)

    @classmethod
    def from_dict(cls, entries: Mapping[LangWord, Sequence[float]], dim: int | None = None) -> "EmbeddingSet":
        keys = list(entries)
        if not keys:
            return cls([], np.empty((0, dim or 1)), dim=dim or 1)
        return cls(keys, np.array([entries[k] for k in keys], dtype=np.float64), dim=dim)

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def keys(self) -> tuple[LangWord, ...]:
        return self._keys

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    @property
    def languages(self) -> frozenset[str]:
        return self._languages

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key):
        return key in self._index

    def __getitem__(self, key: LangWord) -> np.ndarray:
        return self._vectors[self._index[key]]

    def __iter__(self):
        return iter(self._keys)

    def get(self, key: LangWord, default=None):
        i = self._index.get(key)
        return default if i is None else self._vectors[i]

    def index_of(self, key: LangWord) -> int:
        return self._index[key]

    def items(self):
        for k, v in zip(self._keys, self._vectors):
            yield k, v

    def restrict(self, keys: Iterable[LangWord]) -> "EmbeddingSet":
        keep = [k for k in keys if k in self._index]
        rows = [self._index[k] for k in keep]
        return EmbeddingSet(keep, self._vectors[rows].reshape(len(rows), self.dim), dim=self.dim)

    def language(self, lang: str) -> "EmbeddingSet":
        return self.restrict(k for k in self._keys if k.lang == lang)

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        if self.dim != other.dim or set(self._keys) != set(other._keys):
            return False
        return all(np.array_equal(v, other[k]) for k, v in self.items())

    __hash__ = None

    def __repr__(self):
        langs = ",".join(sorted(self._languages))
        return f"EmbeddingSet(n={len(self)}, dim={self.dim}, languages={{{langs}}})"


@dataclass(frozen=True)
class Dictionary:
    """A set of translation pairs; each pair joins two different languages."""

    pairs: frozenset[tuple[LangWord, LangWord]] = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset(self.pairs)
        for a, b in pairs:
            if a.lang == b.lang:
                raise ValueError(f"dictionary pair {a} / {b} joins a language with itself")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __contains__(self, pair):
        return pair in self.pairs

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(w.lang for pair in self.pairs for w in pair)


@dataclass
class MonoCorpus:
    lang: str
    sentences: list[list[str]]

    def __post_init__(self):
        for sent in self.sentences:
            for tok in sent:
                if not tok or any(ch.isspace() for ch in tok):
                    raise ValueError(f"invalid token {tok!r}")

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass
class ParallelCorpus:
    src_lang: str
    tgt_lang: str
    sentence_pairs: list[tuple[list[str], list[str]]]
    alignments: list[frozenset[tuple[int, int]]] | None = None

    def __post_init__(self):
        if self.alignments is None:
            return
        if len(self.alignments) != len(self.sentence_pairs):
            raise ValueError("one alignment set is required per sentence pair")
        for n, (links, (src, tgt)) in enumerate(zip(self.alignments, self.sentence_pairs), 1):
            for i, j in links:
                if not (0 <= i < len(src) and 0 <= j < len(tgt)):
                    raise FormatError(f"alignment {i}-{j} out of range for {len(src)}x{len(tgt)} sentence", line=n)

    def __len__(self):
        return len(self.sentence_pairs)

    def reversed(self) -> "ParallelCorpus":
        """The same corpus seen from the target side."""
        pairs = [(t, s) for s, t in self.sentence_pairs]
        links = None
        if self.alignments is not None:
            links = [frozenset((j, i) for i, j in a) for a in self.alignments]
        return ParallelCorpus(self.tgt_lang, self.src_lang, pairs, links)


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def save_embeddings(emb: EmbeddingSet, path) -> None:
    if len(emb) == 0:
        raise ValueError("refusing to save an empty EmbeddingSet")
    order = sorted(range(len(emb)), key=lambda i: emb.keys[i])
    lines = [f"{len(emb)} {emb.dim}"]
    vectors = emb.vectors
    for i in order:
        lines.append(f"{emb.keys[i]} " + " ".join(_format_float(x) for x in vectors[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_embeddings(text: str, source: str | None = None) -> EmbeddingSet:
    """Parse the embedding text format; errors carry 1-based line numbers."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].strip():
        raise FormatError("missing header line", line=1, path=source)
    header = lines[0].split()
    try:
        count, dim = (int(x) for x in header)
    except ValueError:
        raise FormatError(f"malformed header {lines[0]!r}, expected '<count> <dim>'", line=1, path=source) from None
    if count < 0 or dim < 1:
        raise FormatError(f"malformed header {lines[0]!r}", line=1, path=source)
    keys = []
    seen = {}
    data = np.empty((max(count, 0), dim), dtype=np.float64)
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.rstrip("\r").split(" ")
        if len(keys) >= count:
            raise FormatError(f"more entries than the {count} declared in the header", line=lineno, path=source)
        if len(parts) != dim + 1:
            raise FormatError(f"expected {dim} components, got {len(parts) - 1}", line=lineno, path=source)
        try:
            key = LangWord.parse(parts[0])
        except ValueError as exc:
            raise FormatError(str(exc), line=lineno, path=source) from None
        if key in seen:
            raise FormatError(f"duplicate key {key} (first seen on line {seen[key]})", line=lineno, path=source)
        try:
            row = [float(x) for x in parts[1:]]
        except ValueError:
            raise FormatError("non-numeric vector component", line=lineno, path=source) from None
        if not all(math.isfinite(x) for x in row):
            raise FormatError("non-finite vector component", line=lineno, path=source)
        seen[key] = lineno
        data[len(keys)] = row
        keys.append(key)
    if len(keys) != count:
        raise FormatError(f"header declares {count} entries, found {len(keys)}", line=1, path=source)
    return EmbeddingSet(keys, data, dim=dim)


def load_embeddings(path) -> EmbeddingSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"invalid UTF-8: {exc}", path=str(path)) from None
    return parse_embeddings(text, source=str(path))


def normalize_unit(emb: EmbeddingSet) -> EmbeddingSet:
    """Scale every vector to unit Euclidean norm.

    All-zero vectors stay zero and are reported with a :class:`ZeroVectorWarning`.
    """
    vectors = emb.vectors
    norms = np.linalg.norm(vectors, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    out = vectors / safe[:, None]
    if zero.any():
        warnings.warn(ZeroVectorWarning([k for k, z in zip(emb.keys, zero) if z]), stacklevel=2)
    return EmbeddingSet(emb.keys, out, dim=emb.dim)


def coverage(emb: EmbeddingSet, query: Sequence[LangWord]) -> float:
    if len(query) == 0:
        raise ValueError("coverage of an empty query is undefined")
    return sum(1 for w in query if w in emb) / len(query)


def merge_embeddings(sets: Iterable[EmbeddingSet]) -> EmbeddingSet:
    """Union of disjoint embedding sets sharing one dimensionality."""
    keys: list[LangWord] = []
    blocks = []
    dim = None
    for s in sets:
        if dim is None:
            dim = s.dim
        elif s.dim != dim:
            raise ValueError(f"cannot merge dims {dim} and {s.dim}")
        keys.extend(s.keys)
        blocks.append(s.vectors)
    if dim is None:
        raise ValueError("nothing to merge")
    return EmbeddingSet(keys, np.vstack(blocks), dim=dim)
