"""HTTP evaluation service: upload embeddings, list compatible tasks, evaluate.

Endpoints (JSON over HTTP/1.1):

* ``POST /api/embeddings`` multipart field ``file``
* ``GET /api/embeddings/{embedding_id}/tasks``
* ``POST /api/evaluate`` with ``{"embedding_id", "task_ids", "mode"}``
"""

from __future__ import annotations

import logging
import threading
import uuid
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, File, HTTPException, UploadFile
from pydantic import BaseModel

from ..core import EmbeddingSet, FormatError, load_embeddings, parse_embeddings, save_embeddings
from .tasks import load_tasks, run_task

logger = logging.getLogger(__name__)

DEFAULT_MAX_UPLOAD = 64 * 1024 * 1024


class EvaluateRequest(BaseModel):
    embedding_id: str
    task_ids: list[str]
    mode: Literal["dev", "test"] = "dev"


class Registry:
    """Uploaded embedding sets, optionally mirrored to one file per id."""

    def __init__(self, storage_dir=None):
        self._sets: dict[str, EmbeddingSet] = {}
        self._lock = threading.Lock()
        self.storage_dir = Path(storage_dir) if storage_dir is not None else None
        if self.storage_dir is not None:
            self.storage_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.storage_dir.glob("*.emb")):
                self._sets[path.stem] = load_embeddings(path)

    def add(self, emb: EmbeddingSet) -> str:
        key = uuid.uuid4().hex
        with self._lock:
            if self.storage_dir is not None:
                save_embeddings(emb, self.storage_dir / f"{key}.emb")
            self._sets[key] = emb
        return key

    def get(self, key: str) -> EmbeddingSet | None:
        return self._sets.get(key)


def create_app(data_dir=None, storage_dir=None, max_upload_bytes: int = DEFAULT_MAX_UPLOAD) -> FastAPI:
    tasks = load_tasks(data_dir)
    registry = Registry(storage_dir)
    app = FastAPI(title="polyembed evaluation service")
    app.state.registry = registry
    app.state.tasks = tasks

    def lookup(embedding_id: str) -> EmbeddingSet:
        emb = registry.get(embedding_id)
        if emb is None:
            raise HTTPException(404, detail={"error": f"unknown embedding id {embedding_id!r}"})
        return emb

    @app.post("/api/embeddings")
    async def upload(file: UploadFile = File(...)):
        raw = await file.read(max_upload_bytes + 1)
        if len(raw) > max_upload_bytes:
            raise HTTPException(413, detail={"error": f"upload exceeds {max_upload_bytes} bytes"})
        if not raw.strip():
            raise HTTPException(400, detail={"error": "empty embedding file", "line": 1})
        try:
            emb = parse_embeddings(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise HTTPException(400, detail={"error": f"invalid UTF-8: {exc}", "line": None}) from None
        except FormatError as exc:
            raise HTTPException(400, detail={"error": exc.message, "line": exc.line}) from None
        if len(emb) == 0:
            raise HTTPException(400, detail={"error": "embedding file has no entries", "line": 1})
        key = registry.add(emb)
        logger.info("stored embeddings %s: %d entries, dim %d", key, len(emb), emb.dim)
        return {
            "embedding_id": key,
            "languages": sorted(emb.languages),
            "dim": emb.dim,
            "entry_count": len(emb),
        }

    @app.get("/api/embeddings/{embedding_id}/tasks")
    def list_tasks(embedding_id: str):
        emb = lookup(embedding_id)
        compatible = [t.as_dict() for _, t in sorted(tasks.items()) if t.compatible_with(emb.languages)]
        return {"embedding_id": embedding_id, "tasks": compatible}

    @app.post("/api/evaluate")
    def evaluate(req: EvaluateRequest):
        emb = lookup(req.embedding_id)
        selected = []
        for task_id in req.task_ids:
            task = tasks.get(task_id)
            if task is None:
                raise HTTPException(404, detail={"error": f"unknown task {task_id!r}"})
            if not task.compatible_with(emb.languages):
                missing = sorted(task.required_languages - emb.languages)
                raise HTTPException(409, detail={"error": f"task {task_id!r} needs languages {missing}"})
            selected.append(task)
        results = []
        for task in selected:
            try:
                report = run_task(emb, task, req.mode)
            except ValueError as exc:
                raise HTTPException(422, detail={"error": f"task {task.id!r}: {exc}"}) from None
            results.append({"task_id": task.id, **report.as_dict()})
        return {
            "embedding_id": req.embedding_id,
            "task_ids": list(req.task_ids),
            "mode": req.mode,
            "results": results,
        }

    return app
