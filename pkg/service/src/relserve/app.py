"""HTTP endpoints.

    POST /train     {"train_file", "val_file"?, "learning_rate", "epochs",
                     "max_source_length", "max_target_length", "batch_size",
                     "scheduler", "optimizer", "seed"}   -> {"job_id"}
    GET  /train/<id>                                     -> job status/metrics
    POST /generate  {"inputs": [...], "decoding": {...}} -> {"outputs": [...]}

Responses to /generate are position-aligned with the inputs.  Malformed
training files are a 400 with line diagnostics; generation during an active
training job (or with no checkpoint loaded) is a 409.
"""

from __future__ import annotations

import itertools
import logging
import threading
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .data import DataFileError, read_pairs
from .decoding import Decoding
from .engine import Engine, EngineBusy, NoModelLoaded
from .training import TrainSettings

log = logging.getLogger(__name__)


class TrainRequest(BaseModel):
    train_file: str
    val_file: str | None = None
    learning_rate: float = Field(8e-5, gt=0)
    epochs: int = Field(10, ge=0)
    max_source_length: int = Field(1024, gt=0)
    max_target_length: int = Field(128, gt=0)
    batch_size: int = Field(4, gt=0)
    scheduler: Literal["linear"] = "linear"
    optimizer: Literal["adamw"] = "adamw"
    seed: int = 0


class DecodingRequest(BaseModel):
    strategy: Literal["greedy", "topk_nucleus"] = "greedy"
    top_k: int = Field(20, ge=1)
    top_p: float = Field(0.95, gt=0.0, le=1.0)
    max_new_tokens: int = Field(128, ge=1)
    seed: int | None = None


class GenerateRequest(BaseModel):
    inputs: list[str]
    decoding: DecodingRequest = DecodingRequest()


class Job:
    def __init__(self, job_id: str):
        self.job_id = job_id
        self.status = "queued"
        self.metrics: dict = {"train_loss": [], "val_loss": []}
        self.error: str | None = None

    def to_dict(self) -> dict:
        payload = {"job_id": self.job_id, "status": self.status,
                   "metrics": self.metrics}
        if self.error is not None:
            payload["error"] = self.error
        return payload


def create_app(checkpoint_dir: str, max_batch_size: int = 16) -> FastAPI:
    app = FastAPI(title="relserve")
    engine = Engine(checkpoint_dir, max_batch_size=max_batch_size)
    jobs: dict[str, Job] = {}
    counter = itertools.count(1)
    app.state.engine = engine

    @app.get("/health")
    def health():
        return {"status": "ok", "model_loaded": engine.model is not None,
                "training": engine.training_active.is_set()}

    @app.post("/train")
    def start_train(request: TrainRequest):
        # validate the files up front so schema problems are a synchronous 400
        try:
            read_pairs(request.train_file)
            if request.val_file:
                read_pairs(request.val_file)
        except DataFileError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if engine.training_active.is_set():
            raise HTTPException(status_code=409,
                                detail="a training job is already running")
        job = Job(f"job-{next(counter)}")
        jobs[job.job_id] = job
        settings = TrainSettings(**request.model_dump())

        def run():
            job.status = "running"
            try:
                metrics = engine.run_training(settings)
                job.metrics = metrics.to_dict()
                job.status = "finished"
            except Exception as exc:  # surfaced via GET /train/<id>
                log.exception("training job %s failed", job.job_id)
                job.error = str(exc)
                job.status = "failed"

        threading.Thread(target=run, daemon=True).start()
        return {"job_id": job.job_id}

    @app.get("/train/{job_id}")
    def train_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job.to_dict()

    @app.post("/generate")
    def generate(request: GenerateRequest):
        decoding = Decoding(**request.decoding.model_dump())
        try:
            outputs = engine.generate(request.inputs, decoding)
        except (EngineBusy, NoModelLoaded) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return {"outputs": outputs}

    return app
