"""Project every language into the English space through pairwise CCA.

For each language m, CCA on dictionary-paired vectors yields ``T_m`` (for m)
and ``T_en`` (for English).  A word v of m is mapped to
``T_en^-1 T_m E^m(v)`` (on centered vectors by default); English vectors are
kept as they are.  All outputs are unit-normalized after projection.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from typing import Mapping, Sequence

import numpy as np

from ..core import Dictionary, EmbeddingSet, LangWord, MonoCorpus, merge_embeddings, normalize_unit
from ..linalg import cca_fit
from ..sgns import SgnsParams, train_sgns

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12


def train_monolingual(corpora: Sequence[MonoCorpus], params: SgnsParams) -> dict[str, EmbeddingSet]:
    """Independent skipgram embeddings per language, raw (not normalized)."""
    out = {}
    for i, corpus in enumerate(corpora):
        model = train_sgns(corpus.sentences, dataclasses.replace(params, seed=params.seed + i))
        keys = [LangWord(corpus.lang, t) for t in model.vocab.tokens]
        out[corpus.lang] = EmbeddingSet(keys, model.input_vectors, dim=params.dim)
    return out


def _paired_rows(dicts: Sequence[Dictionary], anchor: str, lang: str, src: EmbeddingSet, en: EmbeddingSet):
    pairs = set()
    for d in dicts:
        for a, b in d.pairs:
            if a.lang == lang and b.lang == anchor:
                a, b = b, a
            if a.lang == anchor and b.lang == lang and a in en and b in src:
                pairs.add((a, b))
    return sorted(pairs)


def multicca_train(
    mono_embeddings: Mapping[str, EmbeddingSet],
    dicts: Sequence[Dictionary],
    reg: float | None = None,
    anchor: str = "en",
    min_rows_fraction: float = 0.25,
    center: bool = True,
) -> EmbeddingSet:
    """Union of the English embeddings and every other language mapped into them.

    With ``center=True`` the map is affine: vectors are centered on the mean
    of the language's dictionary rows before projection and shifted by the
    English rows' mean afterwards, matching the centering the CCA itself
    uses.  ``center=False`` applies the purely linear map.
    """
    if anchor not in mono_embeddings:
        raise ValueError(f"no monolingual embeddings for the anchor language {anchor!r}")
    for d in dicts:
        langs = d.languages
        if len(d) and (anchor not in langs or len(langs) != 2):
            raise ValueError(f"dictionary over {sorted(langs)} does not pair {anchor!r} with exactly one language")
    en = mono_embeddings[anchor]
    dim = en.dim
    parts = [en]
    for lang in sorted(mono_embeddings):
        if lang == anchor:
            continue
        src = mono_embeddings[lang]
        if src.dim != dim:
            raise ValueError(f"{lang} embeddings have dim {src.dim}, {anchor} has {dim}")
        pairs = _paired_rows(dicts, anchor, lang, src, en)
        if not pairs:
            warnings.warn(f"no usable {anchor}-{lang} dictionary pairs; {lang} left out", stacklevel=2)
            continue
        floor = max(2, int(np.ceil(dim * min_rows_fraction)))
        if len(pairs) < floor:
            raise ValueError(f"{lang}: {len(pairs)} dictionary rows, need at least {floor} for a stable CCA")
        X = np.array([src[b] for _, b in pairs])
        Y = np.array([en[a] for a, _ in pairs])
        cca = cca_fit(X, Y, reg)
        t_src = cca.proj_x.T
        t_en = cca.proj_y.T
        cond = np.linalg.cond(t_en)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise np.linalg.LinAlgError(f"{lang}: English-side projection is singular (condition {cond:.3g})")
        if center:
            mapped = np.linalg.solve(t_en, t_src @ (src.vectors - cca.mean_x).T).T + cca.mean_y
        else:
            mapped = np.linalg.solve(t_en, t_src @ src.vectors.T).T
        logger.info("multicca %s: %d rows, top correlation %.4f", lang, len(pairs), cca.correlations[0])
        parts.append(EmbeddingSet(src.keys, mapped, dim=dim))
    return normalize_unit(merge_embeddings(parts))
