"""Skipgram over parallel text with bilingual contexts from word alignments."""

from __future__ import annotations

import logging
from typing import Sequence

from ..core import EmbeddingSet, LangWord, ParallelCorpus, normalize_unit
from ..ingest import train_model1, viterbi_links
from ..sgns import SgnsParams, TokenStream, build_vocab, train_stream

logger = logging.getLogger(__name__)


def ensure_alignments(corpus: ParallelCorpus, model1_iterations: int | None = 5) -> ParallelCorpus:
    """The corpus itself if aligned, else a copy aligned by Model 1 argmax links."""
    if corpus.alignments is not None:
        return corpus
    if model1_iterations is None:
        raise ValueError(f"{corpus.src_lang}-{corpus.tgt_lang} corpus has no alignments and none can be derived")
    table = train_model1(corpus, model1_iterations)
    return ParallelCorpus(corpus.src_lang, corpus.tgt_lang, corpus.sentence_pairs, viterbi_links(corpus, table))


def bilingual_layout(parallel: Sequence[ParallelCorpus], bilingual: bool = True):
    """Sentences keyed by LangWord plus position links, source then target per pair."""
    sentences: list[list[LangWord]] = []
    links: dict[int, list[int]] = {}
    offset = 0
    for corpus in parallel:
        for n, (src, tgt) in enumerate(corpus.sentence_pairs):
            s0 = offset
            t0 = offset + len(src)
            sentences.append([LangWord(corpus.src_lang, w) for w in src])
            sentences.append([LangWord(corpus.tgt_lang, w) for w in tgt])
            if bilingual:
                for i, j in corpus.alignments[n]:
                    links.setdefault(s0 + i, []).append(t0 + j)
                    links.setdefault(t0 + j, []).append(s0 + i)
            offset = t0 + len(tgt)
    return sentences, links


def multiskip_train(
    parallel: Sequence[ParallelCorpus],
    params: SgnsParams,
    model1_iterations: int | None = 5,
    bilingual: bool = True,
) -> EmbeddingSet:
    """Sum of bilingual skipgram objectives over all parallel corpora.

    Each position predicts its in-sentence neighbours and the window around
    every aligned position on the other side (the aligned token included).
    No monolingual corpora are used.
    """
    if not parallel:
        raise ValueError("multiskip needs at least one parallel corpus")
    aligned = [ensure_alignments(c, model1_iterations) for c in parallel]
    sentences, links = bilingual_layout(aligned, bilingual)
    vocab = build_vocab(sentences, params.min_count, params.noise_power)
    stream = TokenStream.from_sentences(sentences, vocab, links)
    model = train_stream(stream, vocab, params)
    return normalize_unit(EmbeddingSet(list(vocab.tokens), model.input_vectors, dim=params.dim))
