"""Translation-invariant low-rank factorization of a multilingual PMI matrix."""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from typing import Sequence

import numpy as np

from ..core import EmbeddingSet, LangWord, MonoCorpus, ParallelCorpus, normalize_unit
from ..linalg import FactorizationResult, als_factorize

logger = logging.getLogger(__name__)


def build_pmi_matrix(corpora: Sequence[MonoCorpus], window: int = 3, min_count: int = 5):
    """Positive PMI over symmetric-window co-occurrences.

    Returns ``(matrix, index)`` where ``index`` lists the LangWord of each
    row, sorted.  Marginals are the row sums of the co-occurrence counts.
    """
    if window < 1:
        raise ValueError("window must be positive")
    counts = Counter(LangWord(c.lang, t) for c in corpora for s in c.sentences for t in s)
    index = sorted(w for w, n in counts.items() if n >= min_count)
    if not index:
        raise ValueError("empty vocabulary after min_count filtering")
    pos = {w: i for i, w in enumerate(index)}
    cooc = np.zeros((len(index), len(index)))
    for corpus in corpora:
        for sent in corpus.sentences:
            ids = [pos.get(LangWord(corpus.lang, t), -1) for t in sent]
            for i, a in enumerate(ids):
                if a < 0:
                    continue
                for b in ids[i + 1:i + 1 + window]:
                    if b < 0:
                        continue
                    cooc[a, b] += 1.0
                    cooc[b, a] += 1.0
    marg = cooc.sum(axis=1)
    total = marg.sum()
    pmi = np.zeros_like(cooc)
    nz = cooc > 0
    if total > 0:
        rows, cols = np.nonzero(nz)
        pmi[rows, cols] = np.log(cooc[rows, cols] * total / (marg[rows] * marg[cols]))
    np.maximum(pmi, 0.0, out=pmi)
    return pmi, index


def build_alignment_matrix(parallel: Sequence[ParallelCorpus], index: Sequence[LangWord]) -> np.ndarray:
    """Row-normalized alignment link counts between words of the shared index.

    Links are counted in both directions; links touching words outside the
    index are skipped.
    """
    pos = {w: i for i, w in enumerate(index)}
    A = np.zeros((len(index), len(index)))
    for corpus in parallel:
        if corpus.alignments is None:
            warnings.warn(f"{corpus.src_lang}-{corpus.tgt_lang} corpus has no alignments; skipped", stacklevel=2)
            continue
        for (src, tgt), links in zip(corpus.sentence_pairs, corpus.alignments):
            for i, j in links:
                u = pos.get(LangWord(corpus.src_lang, src[i]))
                v = pos.get(LangWord(corpus.tgt_lang, tgt[j]))
                if u is None or v is None:
                    continue
                A[u, v] += 1.0
                A[v, u] += 1.0
    sums = A.sum(axis=1, keepdims=True)
    return np.divide(A, sums, out=np.zeros_like(A), where=sums > 0)


def invariance_targets(X: np.ndarray, A: np.ndarray) -> list[tuple[np.ndarray, float]]:
    return [(X, 1.0), (X @ A, 1.0), (A.T @ X, 1.0), (A.T @ X @ A, 1.0)]


def invariance_train(
    X: np.ndarray,
    A: np.ndarray,
    index: Sequence[LangWord],
    d: int = 512,
    iterations: int = 100,
    seed: int = 0,
) -> tuple[EmbeddingSet, FactorizationResult]:
    """Rows of U from the shared factorization of X, XA, A^T X and A^T X A."""
    X = np.asarray(X, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or A.shape != X.shape:
        raise ValueError(f"X and A must be square and conformable, got {X.shape} and {A.shape}")
    if len(index) != X.shape[0]:
        raise ValueError("index length does not match the matrix size")
    result = als_factorize(invariance_targets(X, A), d, iterations, seed=seed)
    for it, obj in enumerate(result.history):
        logger.debug("invariance iteration %d objective %.8g", it, obj)
    emb = normalize_unit(EmbeddingSet(list(index), result.U, dim=d))
    return emb, result
