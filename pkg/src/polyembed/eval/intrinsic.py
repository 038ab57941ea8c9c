"""Word similarity and word translation scores."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..core import EmbeddingSet
from ..linalg import spearman
from .datasets import SimilarityDataset, TranslationDataset


@dataclass
class ScoreReport:
    metric: str
    score: float
    coverage: float
    count: int
    skipped: int = 0

    def __post_init__(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError("coverage must lie in [0, 1]")

    def as_dict(self) -> dict:
        return asdict(self)

    def __str__(self):
        return f"{self.score:.4f} {self.coverage:.4f} {self.count}"


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return np.divide(v, n, out=np.zeros_like(v), where=n > 0)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(_unit(np.asarray(a, float)) * _unit(np.asarray(b, float))))


def eval_word_similarity(emb: EmbeddingSet, data: SimilarityDataset, metric: str = "word-similarity") -> ScoreReport:
    """Spearman correlation between cosines and human scores, x100, over covered pairs."""
    cos, gold = [], []
    for a, b, score in data.items:
        if a in emb and b in emb:
            cos.append(cosine(emb[a], emb[b]))
            gold.append(score)
    if len(cos) < 2:
        raise ValueError(f"only {len(cos)} similarity pair(s) covered; need at least 2")
    return ScoreReport(metric, 100.0 * spearman(cos, gold), len(cos) / len(data), len(cos), len(data) - len(cos))


def eval_word_translation(emb: EmbeddingSet, data: TranslationDataset, metric: str = "word-translation") -> ScoreReport:
    """Share of covered pairs whose gold translation is at least as close as every candidate, x100.

    Candidates for a pair (w1, w2) are the covered words of w2's language in
    the dataset.  Exact ties count as correct.
    """
    pools = {}
    hits = 0
    covered = 0
    for w1, w2 in data.pairs:
        if w1 not in emb or w2 not in emb:
            continue
        lang = w2.lang
        if lang not in pools:
            words = [w for w in data.candidates(lang) if w in emb]
            mat = _unit(np.array([emb[w] for w in words]).reshape(len(words), emb.dim))
            pools[lang] = (mat, {w: i for i, w in enumerate(words)})
        mat, where = pools[lang]
        sims = np.sum(mat * _unit(emb[w1]), axis=1)
        covered += 1
        if sims[where[w2]] >= sims.max():
            hits += 1
    if covered == 0:
        raise ValueError("no translation pair is covered by the embeddings")
    return ScoreReport(metric, 100.0 * hits / covered, covered / len(data), covered, len(data) - covered)
