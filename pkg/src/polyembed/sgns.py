"""Skipgram with negative sampling.

The trainer works on a flat :class:`TokenStream`: token ids for every corpus
position, the sentence bounds of each position, and optional cross-sentence
links used by the bilingual objective.  For a center position ``p`` it
predicts every in-sentence neighbour ``p+k`` (``1 <= |k| <= window``) and,
for each linked position ``a``, the tokens at ``a+k`` for ``|k| <= window``.
Positions holding out-of-vocabulary tokens keep their slot but never take
part in a pair.

Two execution modes exist.  ``workers=1`` is a single-threaded loop and is
bit-reproducible for a given seed.  ``workers>1`` runs hogwild-style shards
that update shared matrices without locking; results are then reproducible
only statistically.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numba
import numpy as np

logger = logging.getLogger(__name__)

_LCG_MUL = np.uint64(25214903917)
_LCG_ADD = np.uint64(11)


@dataclass
class SgnsParams:
    dim: int = 512
    window: int = 5
    epochs: int = 10
    negatives: int = 5
    min_count: int = 5
    initial_lr: float = 0.025
    seed: int = 0
    noise_power: float = 0.75
    subsample: float = 0.0  # frequent-word threshold; 0 disables
    workers: int = 1

    def __post_init__(self):
        for name in ("dim", "window", "epochs", "negatives", "min_count", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.subsample < 0:
            raise ValueError("subsample must be non-negative")


@dataclass
class Vocabulary:
    tokens: list
    counts: np.ndarray
    noise: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index


def build_vocab(sentences: Iterable[Sequence[Hashable]], min_count: int = 5, noise_power: float = 0.75) -> Vocabulary:
    """Tokens seen at least ``min_count`` times, most frequent first.

    Ties in frequency are broken by the token's natural ordering.  ``noise``
    is the negative-sampling distribution, counts raised to ``noise_power``.
    """
    counts = Counter()
    for sent in sentences:
        counts.update(sent)
    if not counts:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    kept = sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))
    c = np.array([counts[t] for t in kept], dtype=np.float64)
    if len(kept):
        noise = c ** noise_power
        noise /= noise.sum()
    else:
        noise = np.empty(0)
    return Vocabulary(kept, c.astype(np.int64), noise)


@dataclass
class TokenStream:
    ids: np.ndarray  # int64, -1 for out-of-vocabulary
    sent_start: np.ndarray  # per position, first index of its sentence
    sent_end: np.ndarray  # per position, one past the last index
    link_ptr: np.ndarray  # CSR offsets into link_pos, length len(ids) + 1
    link_pos: np.ndarray

    def __len__(self):
        return len(self.ids)

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sequence[Hashable]], vocab: Vocabulary, links=None) -> "TokenStream":
        """``links`` maps a global position to the global positions aligned with it."""
        ids, start, end = [], [], []
        for sent in sentences:
            s = len(ids)
            e = s + len(sent)
            for tok in sent:
                ids.append(vocab.index.get(tok, -1))
            start.extend([s] * len(sent))
            end.extend([e] * len(sent))
        n = len(ids)
        ptr = np.zeros(n + 1, dtype=np.int64)
        pos: list[int] = []
        if links:
            for p in range(n):
                targets = sorted(links.get(p, ()))
                pos.extend(targets)
                ptr[p + 1] = len(pos)
        return cls(
            np.array(ids, dtype=np.int64),
            np.array(start, dtype=np.int64),
            np.array(end, dtype=np.int64),
            ptr,
            np.array(pos, dtype=np.int64),
        )


@dataclass
class SgnsModel:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    epoch_losses: list[float]
    pair_counts: list[int]

    def vector(self, token) -> np.ndarray:
        return self.input_vectors[self.vocab.index[token]]


@numba.njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)


@numba.njit(cache=True)
def _log_sigmoid(x):
    if x >= 0:
        return -np.log1p(np.exp(-x))
    return x - np.log1p(np.exp(x))


@numba.njit(cache=True)
def sgns_loss(w_in, w_out, center, context, negs, n_neg):
    """Negative log-likelihood of one (center, context, negatives) triple.

    Negatives equal to the context token are ignored.
    """
    v = w_in[center]
    loss = -_log_sigmoid(np.dot(v, w_out[context]))
    for t in range(n_neg):
        if negs[t] == context:
            continue
        loss -= _log_sigmoid(-np.dot(v, w_out[negs[t]]))
    return loss


@numba.njit(cache=True)
def sgns_grad(w_in, w_out, center, context, negs, n_neg, g_in, g_out):
    """Gradient of :func:`sgns_loss`.

    ``g_in`` receives d loss / d w_in[center].  Row 0 of ``g_out`` is the
    gradient for w_out[context] and row ``t + 1`` for w_out[negs[t]]; a row
    for a skipped negative is zero.  Returns the loss.
    """
    v = w_in[center]
    dim = v.shape[0]
    for k in range(dim):
        g_in[k] = 0.0
    s = np.dot(v, w_out[context])
    loss = -_log_sigmoid(s)
    coef = _sigmoid(s) - 1.0
    for k in range(dim):
        g_in[k] += coef * w_out[context, k]
        g_out[0, k] = coef * v[k]
    for t in range(n_neg):
        w = negs[t]
        if w == context:
            for k in range(dim):
                g_out[t + 1, k] = 0.0
            continue
        s = np.dot(v, w_out[w])
        loss -= _log_sigmoid(-s)
        coef = _sigmoid(s)
        for k in range(dim):
            g_in[k] += coef * w_out[w, k]
            g_out[t + 1, k] = coef * v[k]
    return loss


@numba.njit(cache=True)
def _step(w_in, w_out, center, context, negs, n_neg, lr, g_in, g_out):
    loss = sgns_grad(w_in, w_out, center, context, negs, n_neg, g_in, g_out)
    dim = w_in.shape[1]
    for k in range(dim):
        w_out[context, k] -= lr * g_out[0, k]
    for t in range(n_neg):
        w = negs[t]
        for k in range(dim):
            w_out[w, k] -= lr * g_out[t + 1, k]
    for k in range(dim):
        w_in[center, k] -= lr * g_in[k]
    return loss


@numba.njit(cache=True)
def _draw(state, cum):
    state = state * _LCG_MUL + _LCG_ADD
    u = (state >> np.uint64(11)) * (1.0 / 9007199254740992.0)
    idx = np.searchsorted(cum, u, side="right")
    if idx >= cum.shape[0]:
        idx = cum.shape[0] - 1
    return state, idx


@numba.njit(cache=True)
def _uniform(state):
    state = state * _LCG_MUL + _LCG_ADD
    return state, (state >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True)
def _train_range(w_in, w_out, ids, sent_start, sent_end, link_ptr, link_pos, lo, hi, window, n_neg, cum,
                 keep_prob, use_subsample, lr0, done, total, state, negs, g_in, g_out, stats):
    """One pass over positions [lo, hi).  Returns (rng state, visits done).

    ``stats[0]`` accumulates loss and ``stats[1]`` the pair count.
    """
    for p in range(lo, hi):
        c = ids[p]
        if c < 0:
            continue
        lr = lr0 * (1.0 - 0.99 * done / total)
        done += 1
        if use_subsample:
            state, u = _uniform(state)
            if u > keep_prob[c]:
                continue
        s = sent_start[p]
        e = sent_end[p]
        for k in range(-window, window + 1):
            q = p + k
            if k == 0 or q < s or q >= e:
                continue
            ctx = ids[q]
            if ctx < 0:
                continue
            for t in range(n_neg):
                state, nidx = _draw(state, cum)
                negs[t] = nidx
            stats[0] += _step(w_in, w_out, c, ctx, negs, n_neg, lr, g_in, g_out)
            stats[1] += 1.0
        for l in range(link_ptr[p], link_ptr[p + 1]):
            a = link_pos[l]
            s2 = sent_start[a]
            e2 = sent_end[a]
            for k in range(-window, window + 1):
                q = a + k
                if q < s2 or q >= e2:
                    continue
                ctx = ids[q]
                if ctx < 0:
                    continue
                for t in range(n_neg):
                    state, nidx = _draw(state, cum)
                negs[t] = nidx
                stats[0] += _step(w_in, w_out, c, ctx, negs, n_neg, lr, g_in, g_out)
                stats[1] += 1.0
    return state, done


@numba.njit(cache=True)
def _train_serial(w_in, w_out, ids, sent_start, sent_end, link_ptr, link_pos, epochs, window, n_neg, cum,
                  keep_prob, use_subsample, lr0, seed, losses, pairs):
    dim = w_in.shape[1]
    negs = np.zeros(n_neg, dtype=np.int64)
    g_in = np.zeros(dim)
    g_out = np.zeros((n_neg + 1, dim))
    n_valid = 0
    for p in range(ids.shape[0]):
        if ids[p] >= 0:
            n_valid += 1
    total = max(1, n_valid * epochs)
    state = np.uint64(seed) * np.uint64(2654435761) + np.uint64(1)
    done = 0
    stats = np.zeros(2)
    for ep in range(epochs):
        stats[0] = 0.0
        stats[1] = 0.0
        state, done = _train_range(w_in, w_out, ids, sent_start, sent_end, link_ptr, link_pos, 0, ids.shape[0],
                                   window, n_neg, cum, keep_prob, use_subsample, lr0, done, total, state, negs,
                                   g_in, g_out, stats)
        losses[ep] = stats[0] / max(stats[1], 1.0)
        pairs[ep] = stats[1]


@numba.njit(cache=True, parallel=True)
def _train_hogwild(w_in, w_out, ids, sent_start, sent_end, link_ptr, link_pos, epochs, window, n_neg, cum,
                   keep_prob, use_subsample, lr0, seed, losses, pairs, bounds):
    n_shards = bounds.shape[0] - 1
    dim = w_in.shape[1]
    n_valid = 0
    for p in range(ids.shape[0]):
        if ids[p] >= 0:
            n_valid += 1
    shard_loss = np.zeros((epochs, n_shards))
    shard_pairs = np.zeros((epochs, n_shards))
    for sh in numba.prange(n_shards):
        lo = bounds[sh]
        hi = bounds[sh + 1]
        negs = np.zeros(n_neg, dtype=np.int64)
        g_in = np.zeros(dim)
        g_out = np.zeros((n_neg + 1, dim))
        stats = np.zeros(2)
        shard_valid = 0
        for p in range(lo, hi):
            if ids[p] >= 0:
                shard_valid += 1
        total = max(1, shard_valid * epochs)
        state = np.uint64(seed + sh) * np.uint64(2654435761) + np.uint64(1)
        done = 0
        for ep in range(epochs):
            stats[0] = 0.0
            stats[1] = 0.0
            state, done = _train_range(w_in, w_out, ids, sent_start, sent_end, link_ptr, link_pos, lo, hi,
                                       window, n_neg, cum, keep_prob, use_subsample, lr0, done, total, state,
                                       negs, g_in, g_out, stats)
            shard_loss[ep, sh] = stats[0]
            shard_pairs[ep, sh] = stats[1]
    for ep in range(epochs):
        pairs[ep] = shard_pairs[ep].sum()
        losses[ep] = shard_loss[ep].sum() / max(pairs[ep], 1.0)


@numba.njit(cache=True)
def _collect_pairs(ids, sent_start, sent_end, link_ptr, link_pos, window):
    buf = []
    for p in range(ids.shape[0]):
        c = ids[p]
        if c < 0:
            continue
        s = sent_start[p]
        e = sent_end[p]
        for k in range(-window, window + 1):
            q = p + k
            if k == 0 or q < s or q >= e or ids[q] < 0:
                continue
            buf.append((p, q))
        for l in range(link_ptr[p], link_ptr[p + 1]):
            a = link_pos[l]
            for k in range(-window, window + 1):
                q = a + k
                if q < sent_start[a] or q >= sent_end[a] or ids[q] < 0:
                    continue
                buf.append((p, q))
    n = len(buf)
    out = np.empty((n, 2), dtype=np.int64)
    for i in range(n):
        out[i, 0] = buf[i][0]
        out[i, 1] = buf[i][1]
    return out


def training_pairs(stream: TokenStream, window: int) -> list[tuple[int, int]]:
    """(center position, context position) pairs one epoch visits, in visit order."""
    arr = _collect_pairs(stream.ids, stream.sent_start, stream.sent_end, stream.link_ptr, stream.link_pos, window)
    return [tuple(map(int, row)) for row in arr]


def _keep_probabilities(vocab: Vocabulary, threshold: float) -> np.ndarray:
    if threshold <= 0:
        return np.ones(len(vocab))
    freq = vocab.counts / vocab.counts.sum()
    return np.minimum(1.0, np.sqrt(threshold / freq) + threshold / freq)


def train_stream(stream: TokenStream, vocab: Vocabulary, params: SgnsParams) -> SgnsModel:
    if len(vocab) == 0 or not np.any(stream.ids >= 0):
        raise ValueError("no in-vocabulary tokens to train on (is min_count too high?)")
    rng = np.random.default_rng(params.seed)
    w_in = (rng.random((len(vocab), params.dim)) - 0.5) / params.dim
    w_out = np.zeros((len(vocab), params.dim))
    cum = np.cumsum(vocab.noise)
    cum[-1] = 1.0
    keep = _keep_probabilities(vocab, params.subsample)
    losses = np.zeros(params.epochs)
    pairs = np.zeros(params.epochs)
    args = (w_in, w_out, stream.ids, stream.sent_start, stream.sent_end, stream.link_ptr, stream.link_pos,
            params.epochs, params.window, params.negatives, cum, keep, params.subsample > 0,
            params.initial_lr, params.seed, losses, pairs)
    if params.workers == 1:
        _train_serial(*args)
    else:
        # shard on sentence boundaries
        starts = np.unique(stream.sent_start)
        cuts = [0]
        for sh in range(1, params.workers):
            target = len(stream) * sh // params.workers
            k = np.searchsorted(starts, target)
            cuts.append(int(starts[min(k, len(starts) - 1)]))
        cuts.append(len(stream))
        bounds = np.array(sorted(set(cuts)), dtype=np.int64)
        numba.set_num_threads(min(params.workers, numba.config.NUMBA_NUM_THREADS))
        _train_hogwild(*args, bounds)
    if not (np.all(np.isfinite(w_in)) and np.all(np.isfinite(w_out))):
        raise FloatingPointError("SGNS training diverged (non-finite parameters)")
    for ep, (loss, n) in enumerate(zip(losses, pairs), 1):
        logger.debug("sgns epoch %d: %d pairs, mean loss %.5f", ep, n, loss)
    return SgnsModel(vocab, w_in, w_out, losses.tolist(), [int(p) for p in pairs])


def train_sgns(sentences: Sequence[Sequence[Hashable]], params: SgnsParams) -> SgnsModel:
    """Train skipgram vectors on tokenized sentences (words, cluster ids, ...)."""
    vocab = build_vocab(sentences, params.min_count, params.noise_power)
    if len(vocab) == 0:
        raise ValueError(f"every token occurs fewer than min_count={params.min_count} times")
    stream = TokenStream.from_sentences(sentences, vocab)
    return train_stream(stream, vocab, params)
