"""Corpus and dictionary readers, IBM Model 1 translation tables, dictionary extraction.

Word-translation probabilities come from IBM Model 1 trained by EM from a
uniform start, without a NULL word.  Training one table per direction and
keeping the pairs whose product of directional probabilities exceeds ``tau``
yields a bilingual dictionary.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dictionary, FormatError, LangWord, MonoCorpus, ParallelCorpus

logger = logging.getLogger(__name__)

DEFAULT_TAU = 0.1


def _read_lines(path) -> list[str]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return f.read().splitlines()
    except UnicodeDecodeError as exc:
        raise FormatError(f"invalid UTF-8: {exc}", path=str(path)) from None


def read_mono_corpus(path, lang: str) -> MonoCorpus:
    sentences = [line.split() for line in _read_lines(path)]
    sentences = [s for s in sentences if s]
    if not sentences:
        warnings.warn(f"{path}: corpus contains no tokens", stacklevel=2)
    return MonoCorpus(lang, sentences)


def _parse_alignment_line(line: str, lineno: int, src_len: int, tgt_len: int, path) -> frozenset:
    links = set()
    for tok in line.split():
        i, sep, j = tok.partition("-")
        try:
            if not sep:
                raise ValueError
            i, j = int(i), int(j)
        except ValueError:
            raise FormatError(f"malformed alignment token {tok!r}", line=lineno, path=str(path)) from None
        if not (0 <= i < src_len and 0 <= j < tgt_len):
            raise FormatError(
                f"alignment {tok} out of range for a {src_len}x{tgt_len} sentence pair", line=lineno, path=str(path)
            )
        links.add((i, j))
    return frozenset(links)


def read_parallel_corpus(src_path, tgt_path, align_path=None, src_lang: str = "src", tgt_lang: str = "tgt") -> ParallelCorpus:
    src_lines = _read_lines(src_path)
    tgt_lines = _read_lines(tgt_path)
    if len(src_lines) != len(tgt_lines):
        raise FormatError(f"line-count mismatch: {len(src_lines)} source vs {len(tgt_lines)} target lines")
    pairs = [(s.split(), t.split()) for s, t in zip(src_lines, tgt_lines)]
    alignments = None
    if align_path is not None:
        align_lines = _read_lines(align_path)
        if len(align_lines) != len(pairs):
            raise FormatError(f"alignment file has {len(align_lines)} lines, corpus has {len(pairs)}", path=str(align_path))
        alignments = [
            _parse_alignment_line(line, n, len(s), len(t), align_path)
            for n, (line, (s, t)) in enumerate(zip(align_lines, pairs), 1)
        ]
    return ParallelCorpus(src_lang, tgt_lang, pairs, alignments)


def read_dictionary(path) -> Dictionary:
    pairs = set()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError("expected '<lang>:<word>\\t<lang>:<word>'", line=lineno, path=str(path))
        try:
            a, b = LangWord.parse(fields[0].strip()), LangWord.parse(fields[1].strip())
            if a.lang == b.lang:
                raise ValueError(f"pair joins language {a.lang!r} with itself")
        except ValueError as exc:
            raise FormatError(str(exc), line=lineno, path=str(path)) from None
        pairs.add((a, b))
    return Dictionary(frozenset(pairs))


def write_dictionary(dictionary: Dictionary, path) -> None:
    lines = [f"{a}\t{b}" for a, b in sorted(dictionary.pairs)]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


@dataclass
class TranslationTable:
    """``probs[v_index, u_index] = p(u | v)`` for source words u and target words v.

    Each row is a distribution over the source vocabulary.
    """

    src_lang: str
    tgt_lang: str
    src_vocab: list[str]
    tgt_vocab: list[str]
    probs: np.ndarray
    log_likelihoods: list[float]

    def __post_init__(self):
        self._src_index = {w: i for i, w in enumerate(self.src_vocab)}
        self._tgt_index = {w: i for i, w in enumerate(self.tgt_vocab)}

    def prob(self, u: str, v: str) -> float:
        """p(u | v); zero for words never seen in training."""
        i = self._src_index.get(u)
        j = self._tgt_index.get(v)
        if i is None or j is None:
            return 0.0
        return float(self.probs[j, i])

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {
            v: {u: float(p) for u, p in zip(self.src_vocab, row) if p > 0.0}
            for v, row in zip(self.tgt_vocab, self.probs)
        }


def _index_corpus(corpus: ParallelCorpus):
    src_vocab = sorted({w for s, _ in corpus.sentence_pairs for w in s})
    tgt_vocab = sorted({w for _, t in corpus.sentence_pairs for w in t})
    si = {w: i for i, w in enumerate(src_vocab)}
    ti = {w: i for i, w in enumerate(tgt_vocab)}
    encoded = [
        (np.array([si[w] for w in s], dtype=np.intp), np.array([ti[w] for w in t], dtype=np.intp))
        for s, t in corpus.sentence_pairs
        if s and t
    ]
    return src_vocab, tgt_vocab, encoded


def _estep_shard(shard, probs):
    """Expected link counts and log-likelihood for one shard of sentence pairs."""
    counts = np.zeros_like(probs)
    loglik = 0.0
    for src, tgt in shard:
        # t[j, i] = p(src_i | tgt_j) restricted to this sentence pair
        t = probs[np.ix_(tgt, src)]
        denom = t.sum(axis=0)
        loglik += float(np.sum(np.log(denom / len(tgt))))
        np.add.at(counts, (tgt[:, None], src[None, :]), t / denom)
    return counts, loglik


def corpus_log_likelihood(corpus: ParallelCorpus, table: TranslationTable) -> float:
    """Model 1 data log-likelihood, sum over source tokens of log mean_j p(u | v_j)."""
    total = 0.0
    for src, tgt in corpus.sentence_pairs:
        if not src or not tgt:
            continue
        for u in src:
            total += math.log(sum(table.prob(u, v) for v in tgt) / len(tgt))
    return total


def train_model1(corpus: ParallelCorpus, iterations: int = 10, workers: int = 1, shard_size: int = 256) -> TranslationTable:
    """Estimate p(source word | target word) by EM.

    The E-step runs over fixed shards of ``shard_size`` sentence pairs whose
    partial counts are summed in shard order, so the table does not depend on
    ``workers``.  ``log_likelihoods[t]`` is the likelihood under the table
    before iteration ``t + 1`` updated it.
    """
    if iterations < 1:
        raise ValueError("iterations must be positive")
    src_vocab, tgt_vocab, encoded = _index_corpus(corpus)
    if not encoded:
        raise ValueError("cannot train on an empty parallel corpus")
    probs = np.full((len(tgt_vocab), len(src_vocab)), 1.0 / len(src_vocab))
    shards = [encoded[i:i + shard_size] for i in range(0, len(encoded), shard_size)]
    history = []
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for it in range(iterations):
            if pool is None:
                results = [_estep_shard(s, probs) for s in shards]
            else:
                results = list(pool.map(_estep_shard, shards, [probs] * len(shards)))
            counts = np.zeros_like(probs)
            loglik = 0.0
            for c, ll in results:
                counts += c
                loglik += ll
            history.append(loglik)
            totals = counts.sum(axis=1, keepdims=True)
            probs = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
            logger.debug("model1 %s->%s iteration %d loglik %.6f", corpus.src_lang, corpus.tgt_lang, it + 1, loglik)
    finally:
        if pool is not None:
            pool.shutdown()
    return TranslationTable(corpus.src_lang, corpus.tgt_lang, src_vocab, tgt_vocab, probs, history)


def extract_dictionary(fwd: TranslationTable, rev: TranslationTable, tau: float = DEFAULT_TAU) -> Dictionary:
    """Pairs (u, v) with ``fwd.p(u|v) * rev.p(v|u) > tau``.

    ``fwd`` generates language-m words u from language-n words v; ``rev`` is
    the opposite direction over the same language pair.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    if fwd.src_lang != rev.tgt_lang or fwd.tgt_lang != rev.src_lang:
        raise ValueError(
            f"tables disagree on the language pair: {fwd.src_lang}|{fwd.tgt_lang} vs {rev.src_lang}|{rev.tgt_lang}"
        )
    m, n = fwd.src_lang, fwd.tgt_lang
    # rev.probs[u, v] = p(v | u); reorder it onto fwd's (v, u) grid
    u_in_rev = np.array([rev._tgt_index.get(u, -1) for u in fwd.src_vocab])
    v_in_rev = np.array([rev._src_index.get(v, -1) for v in fwd.tgt_vocab])
    pairs = set()
    for vj, v in enumerate(fwd.tgt_vocab):
        rv = v_in_rev[vj]
        if rv < 0:
            continue
        for ui, u in enumerate(fwd.src_vocab):
            ru = u_in_rev[ui]
            if ru < 0:
                continue
            if fwd.probs[vj, ui] * rev.probs[ru, rv] > tau:
                pairs.add((LangWord(m, u), LangWord(n, v)))
    return Dictionary(frozenset(pairs))


def viterbi_links(corpus: ParallelCorpus, table: TranslationTable) -> list[frozenset[tuple[int, int]]]:
    """Link each target token to the source token with the highest p(u | v).

    Ties go to the leftmost source position.
    """
    if table.src_lang != corpus.src_lang or table.tgt_lang != corpus.tgt_lang:
        raise ValueError("table direction does not match the corpus")
    out = []
    for src, tgt in corpus.sentence_pairs:
        links = set()
        if src:
            for j, v in enumerate(tgt):
                scores = [table.prob(u, v) for u in src]
                links.add((int(np.argmax(scores)), j))
        out.append(frozenset(links))
    return out
