"""Regenerate the small evaluation fixtures shipped in src/polyembed/data/.

Forty synthetic concepts each get one word in en, it and da.  Translations
share a base vector plus small noise; concepts 0-19 feed the dev splits and
20-39 the test splits, so the splits never share a word.
"""

import json
import sys
from pathlib import Path

import numpy as np

from polyembed.core import EmbeddingSet, LangWord, save_embeddings
from polyembed.linalg import average_ranks

LANGS = ["en", "it", "da"]
TAGS = ["noun.animal", "noun.artifact", "noun.plant", "verb.motion"]
DIM = 6
N_CONCEPTS = 40


def word(lang, c):
    return LangWord(lang, f"{lang}w{c:02d}")


def main(out: Path):
    rng = np.random.default_rng(2016)
    out.mkdir(parents=True, exist_ok=True)
    labels = ["animal" if c % 2 == 0 else "artifact" for c in range(N_CONCEPTS)]
    base = rng.standard_normal((N_CONCEPTS, DIM))
    base[:, 0] += np.where(np.array(labels) == "animal", 2.0, -2.0)
    keys, rows = [], []
    for c in range(N_CONCEPTS):
        for lang in LANGS:
            keys.append(word(lang, c))
            rows.append(base[c] + 0.05 * rng.standard_normal(DIM))
    emb = EmbeddingSet(keys, np.array(rows))
    save_embeddings(emb, out / "fixture_embeddings.emb")

    def unit(v):
        return v / np.linalg.norm(v)

    splits = {"dev": range(0, 20), "test": range(20, 40)}
    tasks = []
    for mode, concepts in splits.items():
        concepts = list(concepts)
        # cross-lingual similarity: dev scores follow cosine ranks exactly, test scores are perturbed
        pairs = [(concepts[i], concepts[j]) for i in range(0, 20, 2) for j in range(i + 1, min(i + 4, 20), 2)]
        cos = np.array([unit(emb[word("en", a)]) @ unit(emb[word("it", b)]) for a, b in pairs])
        human = average_ranks(cos)
        if mode == "test":
            human = human + rng.normal(0, 2.0, len(human))
        with open(out / f"wordsim.{mode}.tsv", "w", encoding="utf-8") as f:
            for (a, b), h in zip(pairs, human):
                f.write(f"{word('en', a)}\t{word('it', b)}\t{h:.4f}\n")
        for other in ("it", "da"):
            with open(out / f"translation-en-{other}.{mode}.tsv", "w", encoding="utf-8") as f:
                for c in concepts:
                    f.write(f"{word('en', c)}\t{word(other, c)}\n")
        with open(out / f"supersense.{mode}.tsv", "w", encoding="utf-8") as f:
            for c in concepts:
                counts = rng.integers(0, 6, len(TAGS))
                counts[c % len(TAGS)] += 3
                for lang in LANGS:
                    for tag, n in zip(TAGS, counts):
                        if n:
                            f.write(f"{word(lang, c)}\t{tag}\t{int(n)}\n")

    def documents(concepts, n_docs, seed):
        r = np.random.default_rng(seed)
        lines = []
        for _ in range(n_docs):
            label = ["animal", "artifact"][int(r.integers(2))]
            lang = ["en", "it"][int(r.integers(2))]
            pool = [c for c in concepts if labels[c] == label]
            toks = [word(lang, int(c)).surface for c in r.choice(pool, size=5)]
            lines.append(f"{label}\t{lang}\t{' '.join(toks)}\n")
        return lines

    all_concepts = list(range(N_CONCEPTS))
    (out / "docs.train.tsv").write_text("".join(documents(all_concepts, 40, 1)), encoding="utf-8")
    (out / "docs.dev.tsv").write_text("".join(documents(all_concepts, 20, 2)), encoding="utf-8")
    (out / "docs.test.tsv").write_text("".join(documents(all_concepts, 20, 3)), encoding="utf-8")

    def task(tid, metric, langs, stem, train=None):
        entry = {"id": tid, "metric": metric, "languages": langs,
                 "splits": {m: f"{stem}.{m}.tsv" for m in ("dev", "test")}}
        if train:
            entry["train"] = train
        tasks.append(entry)

    task("wordsim", "word-similarity", ["en", "it"], "wordsim")
    task("translation-en-it", "word-translation", ["en", "it"], "translation-en-it")
    task("translation-en-da", "word-translation", ["en", "da"], "translation-en-da")
    task("qvec-en", "qvec", ["en"], "supersense")
    task("qvec-cca-en", "qvec-cca", ["en"], "supersense")
    task("multiqvec-en-it", "qvec", ["en", "it"], "supersense")
    task("multiqvec-cca-en-it", "qvec-cca", ["en", "it"], "supersense")
    task("multiqvec-cca-en-it-da", "qvec-cca", ["en", "it", "da"], "supersense")
    task("docclass-en-it", "doc-classification", ["en", "it"], "docs", train="docs.train.tsv")
    (out / "tasks.json").write_text(json.dumps({"tasks": tasks}, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "src/polyembed/data")
