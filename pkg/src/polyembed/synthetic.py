"""Synthetic multilingual data with known ground truth.

Languages share a latent cluster-level bigram model: every cluster emits one
word per language, so words of different languages that come from the same
cluster are exact translations with identical distributional behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dictionary, LangWord, MonoCorpus, ParallelCorpus


def surface(lang: str, cluster: int) -> str:
    return f"{lang}{cluster:03d}"


@dataclass
class ClusterLanguageModel:
    start: np.ndarray  # initial cluster distribution
    transitions: np.ndarray  # row-stochastic cluster bigram matrix

    @property
    def n_clusters(self) -> int:
        return len(self.start)

    @classmethod
    def random(cls, n_clusters: int = 100, branching: int = 6, seed: int = 0) -> "ClusterLanguageModel":
        rng = np.random.default_rng(seed)
        trans = np.zeros((n_clusters, n_clusters))
        for c in range(n_clusters):
            succ = rng.choice(n_clusters, size=branching, replace=False)
            trans[c, succ] = rng.dirichlet(np.ones(branching))
        # a little smoothing keeps the chain irreducible
        trans = 0.95 * trans + 0.05 / n_clusters
        return cls(np.full(n_clusters, 1.0 / n_clusters), trans)

    def sample(self, n_sentences: int, min_len: int, max_len: int, rng: np.random.Generator) -> list[list[int]]:
        cum = np.cumsum(self.transitions, axis=1)
        out = []
        for _ in range(n_sentences):
            length = int(rng.integers(min_len, max_len + 1))
            c = int(rng.choice(self.n_clusters, p=self.start))
            sent = [c]
            for u in rng.random(length - 1):
                c = min(int(np.searchsorted(cum[c], u, side="right")), self.n_clusters - 1)
                sent.append(c)
            out.append(sent)
        return out


@dataclass
class SyntheticMultilingual:
    languages: list[str]
    model: ClusterLanguageModel
    corpora: list[MonoCorpus]
    train_dicts: list[Dictionary]  # one per language pair
    heldout: list[tuple[LangWord, LangWord]]

    def english_dicts(self, anchor: str = "en") -> list[Dictionary]:
        return [d for d in self.train_dicts if anchor in d.languages]


def make_multilingual(
    languages=("en", "it", "da"),
    n_clusters: int = 100,
    n_sentences: int = 3000,
    min_len: int = 6,
    max_len: int = 14,
    heldout_fraction: float = 0.2,
    seed: int = 0,
) -> SyntheticMultilingual:
    """Comparable (not parallel) corpora plus a gold dictionary split into train and held-out pairs.

    Held-out pairs come from distinct clusters, one pair per cluster, so the
    remaining training pairs still connect all of a cluster's words when
    three or more languages are present.
    """
    rng = np.random.default_rng(seed)
    languages = list(languages)
    model = ClusterLanguageModel.random(n_clusters, seed=seed)
    corpora = []
    for lang in languages:
        sents = model.sample(n_sentences, min_len, max_len, rng)
        corpora.append(MonoCorpus(lang, [[surface(lang, c) for c in s] for s in sents]))

    lang_pairs = [(a, b) for i, a in enumerate(languages) for b in languages[i + 1:]]
    all_pairs = {(a, b, c) for c in range(n_clusters) for a, b in lang_pairs}
    n_heldout = int(round(heldout_fraction * len(all_pairs)))
    if n_heldout > n_clusters:
        raise ValueError("held-out fraction too large for one pair per cluster")
    heldout_clusters = rng.choice(n_clusters, size=n_heldout, replace=False)
    heldout = set()
    for c in sorted(int(x) for x in heldout_clusters):
        a, b = lang_pairs[int(rng.integers(len(lang_pairs)))]
        heldout.add((a, b, c))
    train = all_pairs - heldout
    dicts = []
    for a, b in lang_pairs:
        pairs = frozenset(
            (LangWord(a, surface(a, c)), LangWord(b, surface(b, c))) for x, y, c in train if (x, y) == (a, b)
        )
        dicts.append(Dictionary(pairs))
    heldout_pairs = sorted((LangWord(a, surface(a, c)), LangWord(b, surface(b, c))) for a, b, c in heldout)
    return SyntheticMultilingual(languages, model, corpora, dicts, heldout_pairs)


def make_parallel(
    src_lang: str,
    tgt_lang: str,
    model: ClusterLanguageModel,
    n_sentences: int,
    min_len: int = 4,
    max_len: int = 10,
    shuffle: bool = False,
    seed: int = 0,
) -> ParallelCorpus:
    """Word-for-word translations of cluster sentences with gold alignments."""
    rng = np.random.default_rng(seed)
    pairs, links = [], []
    for sent in model.sample(n_sentences, min_len, max_len, rng):
        order = rng.permutation(len(sent)) if shuffle else np.arange(len(sent))
        src = [surface(src_lang, c) for c in sent]
        tgt = [surface(tgt_lang, sent[k]) for k in order]
        pairs.append((src, tgt))
        links.append(frozenset((int(k), j) for j, k in enumerate(order)))
    return ParallelCorpus(src_lang, tgt_lang, pairs, links)


def make_bijective_parallel(n_types: int = 20, n_sentences: int = 200, min_len: int = 3, max_len: int = 8,
                            seed: int = 0) -> tuple[ParallelCorpus, Dictionary]:
    """Parallel corpus where source type k always translates to target type k, in shuffled order.

    Tokens within a sentence are distinct, so every co-occurrence is informative.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_sentences):
        length = int(rng.integers(min_len, max_len + 1))
        types = rng.choice(n_types, size=length, replace=False)
        src = [f"s{t:02d}" for t in types]
        tgt = [f"t{t:02d}" for t in rng.permutation(types)]
        pairs.append((src, tgt))
    gold = Dictionary(frozenset((LangWord("xx", f"s{t:02d}"), LangWord("yy", f"t{t:02d}")) for t in range(n_types)))
    return ParallelCorpus("xx", "yy", pairs), gold
