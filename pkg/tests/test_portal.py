import json
from itertools import chain, combinations

import numpy as np
import pytest
from fastapi.testclient import TestClient
from hypothesis import given
from hypothesis import strategies as st

from polyembed.core import EmbeddingSet, LangWord, load_embeddings, save_embeddings
from polyembed.eval import build_linguistic_matrix, eval_word_translation, multiqvec, read_translation_dataset
from polyembed.portal import cli_run
from polyembed.portal.service import create_app
from polyembed.portal.tasks import DATA_DIR_ENV, compatible_tasks, default_data_dir, load_tasks, run_task

DATA = default_data_dir()
FIXTURE = DATA / "fixture_embeddings.emb"


@pytest.fixture(scope="module")
def tasks():
    return load_tasks(DATA)


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(DATA, storage_dir=tmp_path / "store", max_upload_bytes=200_000))


def upload(client, text, name="e.txt"):
    return client.post("/api/embeddings", files={"file": (name, text.encode("utf-8"), "text/plain")})


def restricted_text(langs):
    emb = load_embeddings(FIXTURE)
    sub = emb.restrict([k for k in emb.keys if k.lang in langs])
    lines = [f"{len(sub)} {sub.dim}"] + [" ".join([str(k)] + [format(x, ".17g") for x in sub[k]]) for k in sorted(sub.keys)]
    return "\n".join(lines) + "\n"


# --- task manifest --------------------------------------------------------

def test_manifest_splits_are_disjoint(tasks):
    for task in tasks.values():
        dev = set(task.path("dev").read_text(encoding="utf-8").splitlines())
        test = set(task.path("test").read_text(encoding="utf-8").splitlines())
        assert dev and test and not dev & test
        if task.metric != "doc-classification":
            words = lambda lines: {f for line in lines for f in line.split("\t")[:2] if ":" in f}
            assert not words(dev) & words(test)


def test_data_dir_env_var(monkeypatch, tmp_path):
    monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
    assert default_data_dir() == tmp_path


def all_subsets(items):
    items = sorted(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def test_compatibility_is_the_subset_relation_on_every_fixture(tasks):
    for langs in all_subsets({"en", "it", "da", "de"}):
        got = {t.id for t in compatible_tasks(tasks, langs)}
        assert got == {t.id for t in tasks.values() if set(t.required_languages) <= set(langs)}


@given(st.sets(st.sampled_from(["en", "it", "da", "fr", "sv"])))
def test_compatibility_property(langs):
    tasks = load_tasks(DATA)
    for t in tasks.values():
        assert t.compatible_with(langs) == all(lang in langs for lang in t.required_languages)


# --- HTTP service ---------------------------------------------------------

def test_upload_scans_languages(client):
    r = upload(client, "2 2\nen:dog 1 0\nit:cane 0 1\n")
    assert r.status_code == 200
    body = r.json()
    assert body["languages"] == ["en", "it"] and body["dim"] == 2 and body["entry_count"] == 2
    assert set(body) == {"embedding_id", "languages", "dim", "entry_count"}


@pytest.mark.parametrize("text,line", [("", 1), ("2 2\nen:dog 1 0\nit:cane 0\n", 3), ("1 2\nen:a 1 x\n", 2)])
def test_malformed_upload_is_400_with_line(client, text, line):
    r = upload(client, text)
    assert r.status_code == 400
    assert r.json()["detail"]["line"] == line


def test_oversized_upload_is_413(client):
    r = upload(client, "1 1\nen:a 1\n" + "#" * 300_000)
    assert r.status_code == 413


def test_unknown_id_is_404(client):
    assert client.get("/api/embeddings/nope/tasks").status_code == 404
    r = client.post("/api/evaluate", json={"embedding_id": "nope", "task_ids": ["wordsim"], "mode": "dev"})
    assert r.status_code == 404


def test_english_only_embedding_excludes_cross_lingual_tasks(client, tasks):
    eid = upload(client, restricted_text({"en"})).json()["embedding_id"]
    listed = {t["id"] for t in client.get(f"/api/embeddings/{eid}/tasks").json()["tasks"]}
    assert listed == {t.id for t in tasks.values() if t.required_languages == {"en"}}
    r = client.post("/api/evaluate", json={"embedding_id": eid, "task_ids": ["translation-en-it"], "mode": "dev"})
    assert r.status_code == 409


def test_all_languages_list_every_task(client, tasks):
    eid = upload(client, FIXTURE.read_text(encoding="utf-8")).json()["embedding_id"]
    listed = client.get(f"/api/embeddings/{eid}/tasks").json()["tasks"]
    assert {t["id"] for t in listed} == set(tasks)
    assert all(set(t) >= {"id", "metric", "required_languages", "splits"} for t in listed)


def test_bad_mode_is_422(client):
    eid = upload(client, FIXTURE.read_text(encoding="utf-8")).json()["embedding_id"]
    r = client.post("/api/evaluate", json={"embedding_id": eid, "task_ids": ["wordsim"], "mode": "final"})
    assert r.status_code == 422


def test_evaluate_dev_and_test_and_repeatability(client, tasks):
    eid = upload(client, FIXTURE.read_text(encoding="utf-8")).json()["embedding_id"]
    req = {"embedding_id": eid, "task_ids": ["wordsim", "translation-en-it", "qvec-en"], "mode": "dev"}
    first = client.post("/api/evaluate", json=req)
    assert first.status_code == 200
    body = first.json()
    assert body["mode"] == "dev" and body["task_ids"] == req["task_ids"]
    scores = {r["task_id"]: r for r in body["results"]}
    assert scores["wordsim"]["score"] == pytest.approx(100.0)
    assert set(scores["qvec-en"]) == {"task_id", "metric", "score", "coverage", "count", "skipped"}
    assert client.post("/api/evaluate", json=req).json() == body
    test_body = client.post("/api/evaluate", json={**req, "mode": "test"}).json()
    assert test_body["results"] != body["results"]
    # scores equal a direct library computation on the same split
    emb = load_embeddings(FIXTURE)
    direct = eval_word_translation(emb, read_translation_dataset(tasks["translation-en-it"].path("test")))
    got = {r["task_id"]: r for r in test_body["results"]}["translation-en-it"]
    assert got["score"] == direct.score and got["count"] == direct.count


def test_registry_persists_and_never_mutates(tmp_path):
    store = tmp_path / "store"
    app = create_app(DATA, storage_dir=store)
    c = TestClient(app)
    text = FIXTURE.read_text(encoding="utf-8")
    eid = upload(c, text).json()["embedding_id"]
    before = app.state.registry.get(eid).vectors.copy()
    c.post("/api/evaluate", json={"embedding_id": eid, "task_ids": sorted(app.state.tasks), "mode": "dev"})
    assert np.array_equal(app.state.registry.get(eid).vectors, before)
    reloaded = TestClient(create_app(DATA, storage_dir=store))
    assert reloaded.get(f"/api/embeddings/{eid}/tasks").status_code == 200


def test_run_task_rejects_unknown_mode(tasks):
    with pytest.raises(ValueError):
        run_task(load_embeddings(FIXTURE), tasks["wordsim"], "final")


# --- CLI ------------------------------------------------------------------

def test_cli_eval_task_prints_score_line(capsys):
    assert cli_run(["eval", "--embeddings", str(FIXTURE), "--task", "wordsim-dev"]) == 0
    score, cov, n = capsys.readouterr().out.split()
    assert float(score) == pytest.approx(100.0) and float(cov) == 1.0 and int(n) > 0


def test_cli_eval_metric_and_data(capsys, tasks):
    path = tasks["qvec-en"].path("dev")
    assert cli_run(["eval", "--embeddings", str(FIXTURE), "--metric", "qvec", "--data", str(path),
                    "--languages", "en"]) == 0
    direct = multiqvec(load_embeddings(FIXTURE), build_linguistic_matrix(path, {"en"}), {"en"})
    assert capsys.readouterr().out.strip() == str(direct)


def test_cli_unknown_flag_exits_2(capsys):
    assert cli_run(["eval", "--embeddings", "x", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_cli_unknown_subcommand_exits_2():
    assert cli_run(["frobnicate"]) == 2


def test_cli_unknown_task_exits_2(capsys):
    assert cli_run(["eval", "--embeddings", str(FIXTURE), "--task", "nope"]) == 2


def test_cli_missing_file_exits_1(tmp_path):
    assert cli_run(["eval", "--embeddings", str(tmp_path / "missing"), "--task", "wordsim"]) == 1


def _write_corpora(tmp_path):
    rng = np.random.default_rng(0)
    paths = {}
    for lang in ("en", "it"):
        p = tmp_path / f"{lang}.txt"
        p.write_text("\n".join(" ".join(f"{lang}{int(t)}" for t in rng.integers(0, 12, 7)) for _ in range(80)) + "\n",
                     encoding="utf-8")
        paths[lang] = p
    d = tmp_path / "en-it.dict"
    d.write_text("".join(f"en:en{i}\tit:it{i}\n" for i in range(12)), encoding="utf-8")
    return paths, d


def test_cli_config_file_merges_with_flags_winning(tmp_path):
    paths, d = _write_corpora(tmp_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dim": 5, "epochs": 1, "min_count": 1, "dict": [str(d)]}), encoding="utf-8")
    out = tmp_path / "o.emb"
    argv = ["train-multicluster", "--config", str(cfg), "--corpus", f"en={paths['en']}", "--corpus",
            f"it={paths['it']}", "--out", str(out), "--dim", "4"]
    assert cli_run(argv) == 0
    emb = load_embeddings(out)
    assert emb.dim == 4
    assert emb[LangWord("en", "en3")].tobytes() == emb[LangWord("it", "it3")].tobytes()


def test_cli_intersect_and_correlate(tmp_path, capsys):
    a = EmbeddingSet([LangWord("en", "a"), LangWord("en", "b")], [[1.0], [2.0]])
    b = EmbeddingSet([LangWord("en", "b"), LangWord("it", "c")], [[1.0], [2.0]])
    save_embeddings(a, tmp_path / "a")
    save_embeddings(b, tmp_path / "b")
    assert cli_run(["intersect", "--embeddings", str(tmp_path / "a"), str(tmp_path / "b"),
                    "--out", str(tmp_path / "common")]) == 0
    assert (tmp_path / "common").read_text() == "en:b\n"
    scores = tmp_path / "scores.csv"
    scores.write_text("qvec,doc\n1,2\n2,4\n3,7\n", encoding="utf-8")
    capsys.readouterr()
    assert cli_run(["correlate", "--scores", str(scores), "--intrinsic", "qvec", "--extrinsic", "doc"]) == 0
    assert "0.99" in capsys.readouterr().out
