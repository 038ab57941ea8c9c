"""QVEC, QVEC-CCA and their multilingual versions.

QVEC aligns each embedding dimension with at most one linguistic property
and sums the Pearson correlations of aligned pairs.  Columns may be reused
and a dimension may stay unaligned, so the optimum is
``sum_i max(0, max_j r(x_i, s_j))``.  QVEC-CCA is the first canonical
correlation between the two matrices and is basis-invariant.
"""

from __future__ import annotations

import math
import warnings
from typing import Iterable

import numpy as np

from ..core import EmbeddingSet
from ..linalg import first_canonical_correlation
from .datasets import LinguisticMatrix
from .intrinsic import ScoreReport


def correlation_table(X, S) -> np.ndarray:
    """D x P Pearson correlations between rows of X and rows of S; NaN where a row is constant."""
    X = np.asarray(X, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    if X.shape[1] != S.shape[1]:
        raise ValueError(f"X has {X.shape[1]} columns, S has {S.shape[1]}")

    def standardize(M):
        C = M - M.mean(axis=1, keepdims=True)
        norms = np.sqrt(np.sum(C * C, axis=1, keepdims=True))
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(norms > 0, C / norms, np.nan)

    table = standardize(X) @ standardize(S).T
    return np.clip(table, -1.0, 1.0)


def qvec(X, S) -> float:
    """Raw QVEC score of a D x N embedding matrix against a P x N linguistic matrix."""
    X = np.asarray(X, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    if X.shape[1] < 2:
        raise ValueError("QVEC needs at least two common words")
    table = correlation_table(X, S)
    constant = np.all(X == X[:, :1], axis=1)
    if constant.any():
        warnings.warn(f"{int(constant.sum())} constant embedding dimension(s) excluded from QVEC", stacklevel=2)
    contributions = []
    for i, row in enumerate(table):
        if constant[i]:
            continue
        if np.all(np.isnan(row)):
            contributions.append(0.0)
        else:
            contributions.append(max(0.0, float(np.nanmax(row))))
    return math.fsum(contributions)


def qvec_cca(X, S, reg: float = 0.0) -> float:
    """First canonical correlation between the columns of X (D x N) and S (P x N)."""
    X = np.asarray(X, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    if X.shape[1] < 2:
        raise ValueError("QVEC-CCA needs at least two common words")
    return first_canonical_correlation(X.T, S.T, reg)


def _common(emb: EmbeddingSet, ling: LinguisticMatrix, languages: Iterable[str] | None):
    langs = set(languages) if languages is not None else set(ling.languages)
    vocab = [w for w in ling.vocabulary if w.lang in langs]
    common = [w for w in vocab if w in emb]
    if not common:
        raise ValueError("embeddings and linguistic matrix share no words")
    X = np.array([emb[w] for w in common]).T
    S = ling.matrix(common)
    return X, S, len(common), len(vocab)


def multiqvec(emb: EmbeddingSet, ling: LinguisticMatrix, languages=None, metric: str = "multiqvec") -> ScoreReport:
    X, S, n, total = _common(emb, ling, languages)
    return ScoreReport(metric, qvec(X, S), n / total, n, total - n)


def multiqvec_cca(emb: EmbeddingSet, ling: LinguisticMatrix, languages=None, reg: float = 0.0,
                  metric: str = "multiqvec-cca") -> ScoreReport:
    X, S, n, total = _common(emb, ling, languages)
    return ScoreReport(metric, 100.0 * qvec_cca(X, S, reg), n / total, n, total - n)
