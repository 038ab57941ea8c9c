"""Dictionary clusters as shared tokens: E = E_embed o E_cluster."""

from __future__ import annotations

import logging
import math
from typing import Sequence

from ..core import Dictionary, EmbeddingSet, LangWord, MonoCorpus, normalize_unit
from ..sgns import SgnsParams, train_sgns
from .graph import ClusterAssignment, build_translation_graph, cluster_components

logger = logging.getLogger(__name__)

MAX_CLUSTER_SIZE_12 = 1000
MAX_CLUSTER_SIZE_59 = 10000


def cluster_corpora(corpora: Sequence[MonoCorpus], assignment: ClusterAssignment) -> list[list[int]]:
    """Replace every token by its cluster id and concatenate the corpora."""
    out = []
    for corpus in corpora:
        lookup: dict[str, int] = {}
        for sent in corpus.sentences:
            row = []
            for tok in sent:
                cid = lookup.get(tok)
                if cid is None:
                    cid = lookup[tok] = assignment[LangWord(corpus.lang, tok)]
                row.append(cid)
            out.append(row)
    return out


def multicluster_train(
    corpora: Sequence[MonoCorpus],
    dicts: Sequence[Dictionary],
    params: SgnsParams,
    max_size: float = MAX_CLUSTER_SIZE_12,
) -> EmbeddingSet:
    corpus_langs = {c.lang for c in corpora}
    dict_langs = set().union(*(d.languages for d in dicts)) if dicts else set()
    if dict_langs - corpus_langs:
        logger.warning("dictionaries mention languages without corpora: %s", sorted(dict_langs - corpus_langs))
    assignment = cluster_components(build_translation_graph(dicts), max_size=max_size)
    corpus_words = {LangWord(c.lang, tok) for c in corpora for s in c.sentences for tok in s}
    assignment = assignment.add_singletons(corpus_words)
    logger.info("multicluster: %d words in %d clusters", len(assignment), len(assignment.sizes))

    stream = cluster_corpora(corpora, assignment)
    try:
        model = train_sgns(stream, params)
    except ValueError as exc:
        raise ValueError(f"cluster-id corpus is empty after min_count filtering: {exc}") from None
    keys, rows = [], []
    for word in sorted(assignment.clusters):
        idx = model.vocab.index.get(assignment[word])
        if idx is not None:
            keys.append(word)
            rows.append(model.input_vectors[idx])
    return normalize_unit(EmbeddingSet(keys, rows, dim=params.dim))
