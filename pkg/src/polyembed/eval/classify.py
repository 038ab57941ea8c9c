"""Document classification over averaged word vectors."""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

from ..core import EmbeddingSet, LangWord
from .datasets import Document
from .intrinsic import ScoreReport


def document_features(emb: EmbeddingSet, docs: Sequence[Document]) -> tuple[np.ndarray, int, int]:
    """Mean of covered word vectors per document (zero if none is covered).

    Also returns the covered and total token counts.
    """
    feats = np.zeros((len(docs), emb.dim))
    covered = total = 0
    for i, doc in enumerate(docs):
        vecs = []
        for tok in doc.tokens:
            v = emb.get(LangWord(doc.lang, tok))
            if v is not None:
                vecs.append(v)
        total += len(doc.tokens)
        covered += len(vecs)
        if vecs:
            feats[i] = np.mean(vecs, axis=0)
    return feats, covered, total


class SoftmaxClassifier:
    """Multinomial logistic regression trained by plain per-example SGD."""

    def __init__(self, n_features: int, n_classes: int):
        self.W = np.zeros((n_classes, n_features))
        self.b = np.zeros(n_classes)

    def scores(self, X):
        return X @ self.W.T + self.b

    def predict(self, X):
        return np.argmax(self.scores(X), axis=1)

    def fit(self, X, y, epochs: int = 50, lr: float = 0.5, seed: int = 0):
        rng = np.random.default_rng(seed)
        for _ in range(epochs):
            for i in rng.permutation(len(X)):
                z = self.scores(X[i])
                p = np.exp(z - z.max())
                p /= p.sum()
                p[y[i]] -= 1.0
                self.W -= lr * np.outer(p, X[i])
                self.b -= lr * p
        return self


def majority_baseline(train: Sequence[Document], test: Sequence[Document]) -> float:
    """Accuracy x100 of always predicting the most frequent training label."""
    counts = Counter(d.label for d in train)
    top = min(counts, key=lambda lbl: (-counts[lbl], lbl))
    return 100.0 * sum(d.label == top for d in test) / len(test)


def eval_doc_classification(emb: EmbeddingSet, train: Sequence[Document], test: Sequence[Document],
                            epochs: int = 50, lr: float = 0.5, seed: int = 0,
                            metric: str = "doc-classification") -> ScoreReport:
    if not train or not test:
        raise ValueError("need non-empty training and test documents")
    labels = sorted({d.label for d in train})
    missing = sorted({d.label for d in test} - set(labels))
    if missing:
        raise ValueError(f"test labels absent from training data: {missing}")
    index = {lbl: i for i, lbl in enumerate(labels)}
    Xtr, _, _ = document_features(emb, train)
    Xte, covered, total = document_features(emb, test)
    ytr = np.array([index[d.label] for d in train])
    yte = np.array([index[d.label] for d in test])
    clf = SoftmaxClassifier(emb.dim, len(labels)).fit(Xtr, ytr, epochs, lr, seed)
    acc = float(np.mean(clf.predict(Xte) == yte))
    return ScoreReport(metric, 100.0 * acc, covered / total if total else 0.0, len(test), 0)
