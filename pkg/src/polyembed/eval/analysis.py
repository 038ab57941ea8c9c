"""Vocabulary intersection and metric-correlation analysis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..core import EmbeddingSet, LangWord
from ..linalg import UndefinedCorrelationError, pearson


def intersect_vocabularies(sets: Sequence[EmbeddingSet]) -> list[LangWord]:
    if len(sets) < 2:
        raise ValueError("need at least two embedding sets to intersect")
    common = set(sets[0].keys)
    for s in sets[1:]:
        common &= set(s.keys)
    if not common:
        warnings.warn("embedding vocabularies do not intersect", stacklevel=2)
    return sorted(common)


@dataclass
class CorrelationTable:
    intrinsic: list[str]
    extrinsic: list[str]
    values: np.ndarray  # len(intrinsic) x len(extrinsic)

    def __getitem__(self, key: tuple[str, str]) -> float:
        i, e = key
        return float(self.values[self.intrinsic.index(i), self.extrinsic.index(e)])

    def format(self) -> str:
        """Plain-text table, intrinsic metrics as rows and extrinsic tasks as columns."""
        w = max([len("intrinsic \\ extrinsic")] + [len(n) for n in self.intrinsic])
        cols = [max(len(n), 7) for n in self.extrinsic]
        head = "intrinsic \\ extrinsic".rjust(w) + " | " + " | ".join(n.rjust(c) for n, c in zip(self.extrinsic, cols))
        lines = [head, "-" * len(head)]
        for name, row in zip(self.intrinsic, self.values):
            lines.append(name.rjust(w) + " | " + " | ".join(f"{v:.3f}".rjust(c) for v, c in zip(row, cols)))
        return "\n".join(lines)


def metric_correlation(scores: Mapping[str, Sequence[float]], intrinsic: Sequence[str],
                       extrinsic: Sequence[str]) -> CorrelationTable:
    """Pearson correlation of every (intrinsic, extrinsic) column pair across runs.

    ``scores`` maps metric name to one score per run, all runs in the same order.
    """
    cols = {name: np.asarray(v, dtype=np.float64) for name, v in scores.items()}
    for name in list(intrinsic) + list(extrinsic):
        if name not in cols:
            raise KeyError(f"no scores for metric {name!r}")
    lengths = {len(cols[n]) for n in list(intrinsic) + list(extrinsic)}
    if len(lengths) != 1:
        raise ValueError("every metric needs one score per run")
    if lengths.pop() < 3:
        raise ValueError("need at least three runs")
    for name in list(intrinsic) + list(extrinsic):
        if np.all(cols[name] == cols[name][0]):
            raise UndefinedCorrelationError(f"metric column {name!r} is constant")
    values = np.array([[pearson(cols[i], cols[e]) for e in extrinsic] for i in intrinsic])
    return CorrelationTable(list(intrinsic), list(extrinsic), values)
