"""Translation graph and size-capped connected-component clustering."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from ..core import Dictionary, LangWord


@dataclass
class TranslationGraph:
    adjacency: dict[LangWord, set[LangWord]] = field(default_factory=dict)

    @property
    def nodes(self) -> list[LangWord]:
        return sorted(self.adjacency)

    @property
    def edges(self) -> set[frozenset]:
        return {frozenset((u, v)) for u, nbrs in self.adjacency.items() for v in nbrs}

    def __len__(self):
        return len(self.adjacency)


@dataclass
class ClusterAssignment:
    clusters: dict[LangWord, int]
    sizes: dict[int, int]

    def __getitem__(self, word: LangWord) -> int:
        return self.clusters[word]

    def __contains__(self, word):
        return word in self.clusters

    def __len__(self):
        return len(self.clusters)

    def members(self) -> dict[int, list[LangWord]]:
        out: dict[int, list[LangWord]] = {}
        for w, c in self.clusters.items():
            out.setdefault(c, []).append(w)
        return {c: sorted(ws) for c, ws in out.items()}

    def add_singletons(self, words: Iterable[LangWord]) -> "ClusterAssignment":
        """New assignment where each unseen word gets its own cluster, in sorted order."""
        clusters = dict(self.clusters)
        sizes = dict(self.sizes)
        next_id = max(sizes, default=-1) + 1
        for w in sorted(set(words)):
            if w not in clusters:
                clusters[w] = next_id
                sizes[next_id] = 1
                next_id += 1
        return ClusterAssignment(clusters, sizes)


def build_translation_graph(dicts: Iterable[Dictionary]) -> TranslationGraph:
    adjacency: dict[LangWord, set[LangWord]] = {}
    for d in dicts:
        for a, b in d.pairs:
            adjacency.setdefault(a, set()).add(b)
            adjacency.setdefault(b, set()).add(a)
    return TranslationGraph(adjacency)


def cluster_components(graph: TranslationGraph, max_size: float = math.inf) -> ClusterAssignment:
    """Connected components, split so no cluster exceeds ``max_size`` nodes.

    Breadth-first search starts from nodes in sorted order.  Once a cluster is
    full, the nodes still waiting in its frontier seed new clusters.  Cluster
    ids follow discovery order.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    clusters: dict[LangWord, int] = {}
    sizes: dict[int, int] = {}
    for start in graph.nodes:
        if start in clusters:
            continue
        seeds = deque([start])
        while seeds:
            seed = seeds.popleft()
            if seed in clusters:
                continue
            cid = len(sizes)
            size = 0
            queue = deque([seed])
            queued = {seed}
            while queue:
                u = queue.popleft()
                if u in clusters:
                    continue
                if size >= max_size:
                    seeds.append(u)
                    continue
                clusters[u] = cid
                size += 1
                for v in sorted(graph.adjacency[u]):
                    if v not in clusters and v not in queued:
                        queued.add(v)
                        queue.append(v)
            sizes[cid] = size
    return ClusterAssignment(clusters, sizes)
