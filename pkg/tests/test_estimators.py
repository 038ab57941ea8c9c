import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import subspace_angles

from oracles import UnionFind
from polyembed.core import Dictionary, EmbeddingSet, LangWord, MonoCorpus, ParallelCorpus, normalize_unit
from polyembed.estimators import (
    MAX_CLUSTER_SIZE_12,
    MAX_CLUSTER_SIZE_59,
    bilingual_layout,
    build_alignment_matrix,
    build_pmi_matrix,
    build_translation_graph,
    cluster_components,
    invariance_train,
    multicca_train,
    multicluster_train,
    multiskip_train,
)
from polyembed.eval import TranslationDataset, eval_word_translation
from polyembed.sgns import SgnsParams, TokenStream, build_vocab, train_sgns, training_pairs

W = LangWord
SMALL = SgnsParams(dim=8, epochs=2, min_count=1, seed=3)


def D(*pairs):
    return Dictionary(frozenset(pairs))


def random_dicts(seed, n_nodes=50):
    rng = np.random.default_rng(seed)
    langs = ["en", "it", "da"]
    words = [W(langs[i % 3], f"w{i}") for i in range(int(rng.integers(2, n_nodes + 1)))]
    pairs = set()
    for _ in range(int(rng.integers(0, 2 * len(words)))):
        a, b = rng.choice(len(words), 2, replace=False)
        if words[a].lang != words[b].lang:
            pairs.add((words[a], words[b]))
    return [D(*pairs)], words


# --- translation graph ----------------------------------------------------

def test_graph_single_pair():
    g = build_translation_graph([D((W("en", "dog"), W("it", "cane")))])
    assert len(g.nodes) == 2 and len(g.edges) == 1


def test_graph_empty():
    g = build_translation_graph([])
    assert g.nodes == [] and g.edges == set()


@pytest.mark.parametrize("seed", range(10))
def test_graph_matches_set_oracle(seed):
    dicts, _ = random_dicts(seed)
    g = build_translation_graph(dicts)
    nodes = {w for d in dicts for p in d.pairs for w in p}
    edges = {frozenset(p) for d in dicts for p in d.pairs}
    assert set(g.nodes) == nodes and g.edges == edges


# --- clustering -----------------------------------------------------------

def test_chain_is_one_cluster():
    a, b, c = W("en", "a"), W("it", "b"), W("da", "c")
    assign = cluster_components(build_translation_graph([D((a, b)), D((b, c))]))
    assert len(assign.sizes) == 1 and assign.sizes[0] == 3


def test_no_edges_gives_singletons():
    words = [W("en", f"w{i}") for i in range(4)]
    assign = cluster_components(build_translation_graph([])).add_singletons(words)
    assert sorted(assign.sizes.values()) == [1, 1, 1, 1]


def test_cluster_ids_follow_discovery_order():
    d = D((W("it", "x"), W("en", "z")), (W("da", "a"), W("it", "y")))
    assign = cluster_components(build_translation_graph([d]))
    assert assign[W("da", "a")] == 0 and assign[W("it", "y")] == 0
    assert assign[W("en", "z")] == 1


def test_cap_splits_a_star():
    hub = W("en", "hub")
    spokes = [W("it", f"s{i}") for i in range(5)]
    assign = cluster_components(build_translation_graph([D(*[(hub, s) for s in spokes])]), max_size=2)
    assert max(assign.sizes.values()) <= 2
    assert len(assign) == 6
    with pytest.raises(ValueError):
        cluster_components(build_translation_graph([]), max_size=0)


@given(st.integers(0, 100_000), st.integers(1, 8))
@settings(max_examples=60, deadline=None)
def test_components_match_union_find_and_cap_holds(seed, cap):
    dicts, _ = random_dicts(seed)
    g = build_translation_graph(dicts)
    uf = UnionFind(g.nodes)
    for e in g.edges:
        a, b = tuple(e)
        uf.union(a, b)
    assign = cluster_components(g)
    assert {frozenset(m) for m in assign.members().values()} == uf.partition()
    capped = cluster_components(g, max_size=cap)
    assert set(capped.clusters) == set(g.nodes)
    assert all(1 <= s <= cap for s in capped.sizes.values())
    assert sum(capped.sizes.values()) == len(g.nodes)
    # a capped cluster never straddles two true components
    for members in capped.members().values():
        assert len({uf.find(w) for w in members}) == 1


def test_cluster_cap_defaults():
    assert (MAX_CLUSTER_SIZE_12, MAX_CLUSTER_SIZE_59) == (1000, 10000)


# --- multiCluster ---------------------------------------------------------

def _toy_corpora():
    rng = np.random.default_rng(0)
    corpora = []
    for lang in ("en", "it"):
        corpora.append(MonoCorpus(lang, [[f"{lang}{int(t)}" for t in rng.integers(0, 10, 6)] for _ in range(60)]))
    return corpora


def test_multicluster_gives_identical_vectors_within_a_cluster():
    corpora = _toy_corpora()
    d = D(*[(W("en", f"en{i}"), W("it", f"it{i}")) for i in range(5)])
    emb = multicluster_train(corpora, [d], SMALL)
    for i in range(5):
        a, b = emb[W("en", f"en{i}")], emb[W("it", f"it{i}")]
        assert a.tobytes() == b.tobytes()
    # words outside the dictionary still get (distinct) vectors
    assert W("en", "en7") in emb and W("it", "it7") in emb
    assert emb[W("en", "en7")].tobytes() != emb[W("it", "it7")].tobytes()
    np.testing.assert_allclose(np.linalg.norm(emb.vectors, axis=1), 1.0, atol=1e-12)


def test_multicluster_empty_stream_after_min_count():
    corpora = [MonoCorpus("en", [["a", "b"]])]
    with pytest.raises(ValueError):
        multicluster_train(corpora, [], SgnsParams(dim=4, min_count=5))


# --- multiCCA -------------------------------------------------------------

def _random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _rotated_pair(seed=0, n=200, dim=10):
    rng = np.random.default_rng(seed)
    E = rng.standard_normal((n, dim))
    Q = _random_orthogonal(rng, dim)
    en = EmbeddingSet([W("en", f"w{i}") for i in range(n)], E)
    it = EmbeddingSet([W("it", f"w{i}") for i in range(n)], E @ Q)
    return en, it


def test_multicca_keeps_english_normalized_input():
    en, it = _rotated_pair()
    d = D(*[(W("en", f"w{i}"), W("it", f"w{i}")) for i in range(150)])
    out = multicca_train({"en": en, "it": it}, [d])
    ref = normalize_unit(en)
    for k in en.keys:
        assert out[k].tobytes() == ref[k].tobytes()
        np.testing.assert_allclose(out[k], en[k] / np.linalg.norm(en[k]), rtol=1e-15)


def test_multicca_recovers_an_orthogonal_rotation():
    en, it = _rotated_pair()
    d = D(*[(W("en", f"w{i}"), W("it", f"w{i}")) for i in range(150)])
    out = multicca_train({"en": en, "it": it}, [d])
    held = [(W("en", f"w{i}"), W("it", f"w{i}")) for i in range(150, 200)]
    report = eval_word_translation(out, TranslationDataset(held))
    assert report.score == 100.0
    cosines = [float(out[a] @ out[b]) for a, b in held]
    assert np.mean(cosines) > 0.99


def test_multicca_is_invariant_to_a_shared_rotation():
    rng = np.random.default_rng(5)
    en = EmbeddingSet([W("en", f"w{i}") for i in range(80)], rng.standard_normal((80, 6)))
    it = EmbeddingSet([W("it", f"v{i}") for i in range(80)], rng.standard_normal((80, 6)))
    d = D(*[(W("en", f"w{i}"), W("it", f"v{i}")) for i in range(60)])
    R = _random_orthogonal(rng, 6)
    rot = {k: EmbeddingSet(e.keys, e.vectors @ R) for k, e in {"en": en, "it": it}.items()}
    a = multicca_train({"en": en, "it": it}, [d])
    b = multicca_train(rot, [d])
    assert a.keys == b.keys
    np.testing.assert_allclose(a.vectors @ a.vectors.T, b.vectors @ b.vectors.T, atol=1e-6)


def test_multicca_empty_dictionary_drops_the_language():
    en, it = _rotated_pair()
    with pytest.warns(UserWarning, match="it"):
        out = multicca_train({"en": en, "it": it}, [Dictionary(frozenset())])
    assert out.languages == {"en"}


def test_multicca_too_few_rows():
    en, it = _rotated_pair(dim=12)
    d = D((W("en", "w0"), W("it", "w0")), (W("en", "w1"), W("it", "w1")))
    with pytest.raises(ValueError, match="rows"):
        multicca_train({"en": en, "it": it}, [d])


def test_multicca_rejects_non_english_dictionary():
    en, it = _rotated_pair()
    d = D((W("it", "w0"), W("da", "w0")))
    with pytest.raises(ValueError):
        multicca_train({"en": en, "it": it}, [d])


def test_multicca_uses_every_translation_as_a_row():
    from polyembed.estimators.multicca import _paired_rows

    en, it = _rotated_pair()
    d = D((W("en", "w0"), W("it", "w0")), (W("en", "w0"), W("it", "w1")), (W("it", "w2"), W("en", "w2")))
    rows = _paired_rows([d], "en", "it", it, en)
    assert len(rows) == 3


# --- multiSkip ------------------------------------------------------------

def test_one_token_pair_has_only_cross_lingual_pairs():
    pc = ParallelCorpus("en", "it", [(["a"], ["x"])], [frozenset({(0, 0)})])
    sents, links = bilingual_layout([pc])
    vocab = build_vocab(sents, 1)
    pairs = training_pairs(TokenStream.from_sentences(sents, vocab, links), 5)
    assert sorted(pairs) == [(0, 1), (1, 0)]


def test_two_sentence_fixture_pairs_match_hand_enumeration():
    pc = ParallelCorpus(
        "en", "it",
        [(["a", "b"], ["x", "y", "z"]), (["c"], ["w"])],
        [frozenset({(0, 1), (1, 2)}), frozenset()],
    )
    sents, links = bilingual_layout([pc])
    # global positions: a0 b1 | x2 y3 z4 | c5 | w6
    assert sents == [[W("en", "a"), W("en", "b")], [W("it", "x"), W("it", "y"), W("it", "z")],
                     [W("en", "c")], [W("it", "w")]]
    vocab = build_vocab(sents, 1)
    pairs = training_pairs(TokenStream.from_sentences(sents, vocab, links), 1)
    mono = [(0, 1), (1, 0), (2, 3), (3, 2), (3, 4), (4, 3)]
    # a-y: a sees x,y,z around y; y sees a,b around a
    # b-z: b sees y,z around z; z sees a,b around b
    bi = [(0, 2), (0, 3), (0, 4), (3, 0), (3, 1), (1, 3), (1, 4), (4, 0), (4, 1)]
    assert sorted(pairs) == sorted(mono + bi)


def test_all_empty_alignments_equal_the_monolingual_run():
    rng = np.random.default_rng(2)
    pairs = [([f"s{int(t)}" for t in rng.integers(0, 6, 4)], [f"t{int(t)}" for t in rng.integers(0, 6, 5)])
             for _ in range(40)]
    pc = ParallelCorpus("en", "it", pairs, [frozenset()] * len(pairs))
    params = SgnsParams(dim=6, epochs=3, min_count=1, seed=9)
    a = multiskip_train([pc], params)
    aligned = ParallelCorpus("en", "it", pairs, [frozenset({(0, 0)})] * len(pairs))
    b = multiskip_train([aligned], params, bilingual=False)
    assert a.keys == b.keys and a.vectors.tobytes() == b.vectors.tobytes()
    # and both equal plain SGNS on the interleaved sentences
    sents = [s for src, tgt in pairs for s in ([W("en", w) for w in src], [W("it", w) for w in tgt])]
    model = train_sgns(sents, params)
    raw = model.input_vectors / np.linalg.norm(model.input_vectors, axis=1, keepdims=True)
    for i, tok in enumerate(model.vocab.tokens):
        assert a[tok].tobytes() == raw[i].tobytes()


def test_multiskip_derives_missing_alignments():
    from polyembed.synthetic import make_bijective_parallel

    corpus, gold = make_bijective_parallel(n_sentences=100)
    emb = multiskip_train([corpus], SgnsParams(dim=8, epochs=2, min_count=1, seed=1), model1_iterations=5)
    assert emb.languages == {"xx", "yy"}
    with pytest.raises(ValueError):
        multiskip_train([corpus], SMALL, model1_iterations=None)


# --- translation-invariant factorization ----------------------------------

def test_pmi_hand_counted_fixture():
    X, index = build_pmi_matrix([MonoCorpus("en", [["a", "b", "a", "b"]])], window=1, min_count=1)
    assert index == [W("en", "a"), W("en", "b")]
    # cooc(a,b) = 3, marginals 3 and 3, total 6
    assert abs(X[0, 1] - math.log(3 * 6 / (3 * 3))) < 1e-10
    assert X[0, 0] == 0.0 and np.array_equal(X, X.T)


def test_pmi_separate_sentences_do_not_cooccur():
    X, index = build_pmi_matrix([MonoCorpus("en", [["a", "b"], ["c", "d"]])], window=3, min_count=1)
    i = {w.surface: k for k, w in enumerate(index)}
    assert X[i["a"], i["c"]] == 0.0 and X[i["b"], i["d"]] == 0.0
    assert X[i["a"], i["b"]] > 0.0


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_pmi_is_symmetric_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    corpora = [MonoCorpus(lang, [[f"w{int(t)}" for t in rng.integers(0, 8, 6)] for _ in range(10)])
               for lang in ("en", "it")]
    X, index = build_pmi_matrix(corpora, window=2, min_count=2)
    assert np.array_equal(X, X.T) and np.all(X >= 0)


def test_pmi_empty_vocabulary():
    with pytest.raises(ValueError):
        build_pmi_matrix([MonoCorpus("en", [["a"]])], min_count=5)


def test_alignment_matrix_counts_and_normalizes():
    dog, cane, cat = W("en", "dog"), W("it", "cane"), W("en", "cat")
    pc = ParallelCorpus("en", "it", [(["dog"], ["cane"]), (["dog", "cat"], ["cane"])],
                        [frozenset({(0, 0)}), frozenset({(0, 0)})])
    index = [cat, dog, cane]
    A = build_alignment_matrix([pc], index)
    assert A[1, 2] == 1.0 and A[2, 1] == 1.0
    assert np.all(A[0] == 0.0)


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_alignment_rows_sum_to_zero_or_one(seed):
    rng = np.random.default_rng(seed)
    pairs, links = [], []
    for _ in range(15):
        src = [f"s{int(t)}" for t in rng.integers(0, 6, 3)]
        tgt = [f"t{int(t)}" for t in rng.integers(0, 6, 3)]
        pairs.append((src, tgt))
        links.append(frozenset((int(i), int(j)) for i, j in rng.integers(0, 3, (2, 2))))
    pc = ParallelCorpus("en", "it", pairs, links)
    index = sorted({W("en", f"s{i}") for i in range(4)} | {W("it", f"t{i}") for i in range(6)})
    sums = build_alignment_matrix([pc], index).sum(axis=1)
    assert all(s == 0.0 or abs(s - 1) <= 1e-9 for s in sums)


def test_alignment_matrix_skips_unaligned_corpus():
    pc = ParallelCorpus("en", "it", [(["a"], ["b"])])
    with pytest.warns(UserWarning):
        A = build_alignment_matrix([pc], [W("en", "a"), W("it", "b")])
    assert not A.any()


def test_invariance_identity_alignment_spans_top_singular_subspace():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((40, 40))
    X = B @ B.T
    index = [W("en", f"w{i}") for i in range(40)]
    d = 5
    emb, res = invariance_train(X, np.eye(40), index, d=d, iterations=500)
    U, s, _ = np.linalg.svd(X)
    assert np.max(subspace_angles(res.U, U[:, :d])) < 1e-3
    assert res.objective == pytest.approx(4 * np.sum(s[d:] ** 2), abs=1e-6)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(res.history, res.history[1:]))
    np.testing.assert_allclose(np.linalg.norm(emb.vectors, axis=1), 1.0, atol=1e-12)


def test_invariance_objective_non_increasing_with_real_alignments():
    rng = np.random.default_rng(1)
    X = np.abs(rng.standard_normal((12, 12)))
    X = X + X.T
    A = rng.random((12, 12))
    A /= A.sum(axis=1, keepdims=True)
    _, res = invariance_train(X, A, [W("en", f"w{i}") for i in range(12)], d=3, iterations=50)
    h = res.history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(h, h[1:]))


def test_invariance_shape_errors():
    with pytest.raises(ValueError):
        invariance_train(np.eye(3), np.eye(4), [W("en", "a")] * 3, d=1)
