"""Evaluation task manifests and task execution.

A data directory holds ``tasks.json``::

    {"tasks": [
      {"id": "wordsim", "metric": "word-similarity", "languages": ["en", "it"],
       "splits": {"dev": "wordsim.dev.tsv", "test": "wordsim.test.tsv"}},
      {"id": "docclass", "metric": "doc-classification", "languages": ["en", "it"],
       "train": "docs.train.tsv", "splits": {"dev": "docs.dev.tsv", "test": "docs.test.tsv"}}
    ]}

Paths are relative to the data directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from ..core import EmbeddingSet
from ..eval import (
    ScoreReport,
    build_linguistic_matrix,
    eval_doc_classification,
    eval_word_similarity,
    eval_word_translation,
    multiqvec,
    multiqvec_cca,
    read_documents,
    read_similarity_dataset,
    read_translation_dataset,
)

MODES = ("dev", "test")
METRICS = ("word-similarity", "word-translation", "qvec", "qvec-cca", "doc-classification")
DATA_DIR_ENV = "POLYEMBED_DATA_DIR"


def default_data_dir() -> Path:
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data"


@dataclass(frozen=True)
class TaskDescriptor:
    id: str
    metric: str
    required_languages: frozenset[str]
    splits: dict = field(hash=False)
    train: str | None = None
    root: Path = field(default=Path("."), hash=False, compare=False)

    def path(self, mode: str) -> Path:
        return self.root / self.splits[mode]

    def compatible_with(self, languages) -> bool:
        return self.required_languages <= set(languages)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "metric": self.metric,
            "required_languages": sorted(self.required_languages),
            "splits": dict(self.splits),
        }


def load_tasks(data_dir=None) -> dict[str, TaskDescriptor]:
    root = Path(data_dir) if data_dir is not None else default_data_dir()
    manifest = json.loads((root / "tasks.json").read_text(encoding="utf-8"))
    tasks = {}
    for entry in manifest["tasks"]:
        if entry["metric"] not in METRICS:
            raise ValueError(f"task {entry['id']}: unknown metric {entry['metric']!r}")
        splits = entry["splits"]
        if set(splits) != set(MODES):
            raise ValueError(f"task {entry['id']}: needs exactly the splits {MODES}")
        for mode in MODES:
            if not (root / splits[mode]).is_file():
                raise FileNotFoundError(f"task {entry['id']}: missing {mode} split {splits[mode]}")
        if entry["id"] in tasks:
            raise ValueError(f"duplicate task id {entry['id']!r}")
        tasks[entry["id"]] = TaskDescriptor(
            entry["id"], entry["metric"], frozenset(entry["languages"]), dict(splits), entry.get("train"), root
        )
    return tasks


def compatible_tasks(tasks: dict[str, TaskDescriptor], languages) -> list[TaskDescriptor]:
    return [t for _, t in sorted(tasks.items()) if t.compatible_with(languages)]


@lru_cache(maxsize=64)
def _dataset(metric: str, path: str, languages: frozenset[str]):
    if metric == "word-similarity":
        return read_similarity_dataset(path)
    if metric == "word-translation":
        return read_translation_dataset(path)
    if metric in ("qvec", "qvec-cca"):
        return build_linguistic_matrix(path, languages)
    return read_documents(path)


def run_task(emb: EmbeddingSet, task: TaskDescriptor, mode: str = "dev") -> ScoreReport:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    data = _dataset(task.metric, str(task.path(mode)), task.required_languages)
    if task.metric == "word-similarity":
        return eval_word_similarity(emb, data, metric=task.metric)
    if task.metric == "word-translation":
        return eval_word_translation(emb, data, metric=task.metric)
    if task.metric == "qvec":
        return multiqvec(emb, data, task.required_languages, metric=task.metric)
    if task.metric == "qvec-cca":
        return multiqvec_cca(emb, data, task.required_languages, metric=task.metric)
    if task.train is None:
        raise ValueError(f"task {task.id} has no training split")
    train = _dataset(task.metric, str(task.root / task.train), task.required_languages)
    return eval_doc_classification(emb, train, data, metric=task.metric)
