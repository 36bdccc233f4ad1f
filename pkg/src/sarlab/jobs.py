"""Asynchronous job execution for the REST service.

Jobs run on a bounded thread pool (the engine releases the GIL in its hot
loops).  Results land in a content-addressed directory keyed by the config
hash, so resubmitting an identical config can reuse the finished result;
such jobs are flagged cached.  Failed jobs never touch other jobs' results.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from sarlab import engine
from sarlab.config import (ConfigError, build_grid_literal, config_hash,
                           parse_dataset_spec, parse_pipeline_config,
                           parse_reconstruct_config)
from sarlab.sarb import read_sarb, read_sarb_meta, write_sarb

JOB_TYPES = ("simulate", "reconstruct", "pipeline", "dataset", "psf")
_TRANSITIONS = {"queued": {"running", "failed", "done"},
                "running": {"done", "failed"},
                "done": set(), "failed": set()}


class JobError(ValueError):
    pass


@dataclass
class Job:
    id: str
    type: str
    status: str = "queued"
    progress: float = 0.0
    config_hash: str = ""
    result_path: str | None = None
    error: str | None = None
    cached: bool = False
    created_at: float = field(default_factory=time.time)

    def as_dict(self) -> dict:
        return {"id": self.id, "type": self.type, "status": self.status,
                "progress": self.progress, "config_hash": self.config_hash,
                "result": self.result_path, "error": self.error,
                "cached": self.cached}


class JobManager:
    def __init__(self, data_dir: str, workers: int | None = None):
        self.data_dir = data_dir
        os.makedirs(os.path.join(data_dir, "results"), exist_ok=True)
        n = workers or int(os.environ.get("SARLAB_WORKERS", "0")) \
            or os.cpu_count() or 1
        self._pool = ThreadPoolExecutor(max_workers=n)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def _set_status(self, job: Job, status: str):
        with self._lock:
            if status != job.status and status not in _TRANSITIONS[job.status]:
                raise JobError(f"illegal transition {job.status} -> {status}")
            job.status = status

    def _set_progress(self, job: Job, frac: float):
        with self._lock:
            job.progress = min(1.0, max(job.progress, float(frac)))

    def submit(self, job_type: str, config: dict) -> Job:
        """Validate, register, and enqueue a job; returns it immediately.

        Validation happens here so schema violations surface synchronously.
        A finished result under the same config hash short-circuits the run
        (the job is created done and flagged cached).
        """
        if job_type not in JOB_TYPES:
            raise ConfigError(f"unknown job type {job_type!r}", "type")
        if job_type == "dataset":
            parse_dataset_spec(config)
        elif job_type == "reconstruct":
            parse_reconstruct_config(config)
        else:
            parse_pipeline_config(config)
        chash = config_hash({"type": job_type, "config": config})
        job = Job(id=uuid.uuid4().hex, type=job_type, config_hash=chash)
        with self._lock:
            self._jobs[job.id] = job

        done_path = self._finished_result(chash)
        if done_path:
            job.cached = True
            job.result_path = done_path
            self._set_progress(job, 1.0)
            self._set_status(job, "done")
            return job

        self._pool.submit(self._run, job, job_type, config)
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def shutdown(self):
        self._pool.shutdown(wait=False, cancel_futures=True)

    def _result_dir(self, chash: str) -> str:
        d = os.path.join(self.data_dir, "results", chash)
        os.makedirs(d, exist_ok=True)
        return d

    def _finished_result(self, chash: str) -> str | None:
        d = os.path.join(self.data_dir, "results", chash)
        for name in ("result.sarb", "report.json",
                     os.path.join("dataset", "dataset.json")):
            p = os.path.join(d, name)
            if os.path.exists(p):
                return p
        return None

    def _run(self, job: Job, job_type: str, config: dict):
        try:
            self._set_status(job, "running")
            progress = lambda f: self._set_progress(job, f)  # noqa: E731
            out_dir = self._result_dir(job.config_hash)
            if job_type == "pipeline":
                arrays, meta = engine.run_pipeline(config, progress=progress)
                path = os.path.join(out_dir, "result.sarb")
                write_sarb(path, arrays, meta)
            elif job_type == "simulate":
                cfg = parse_pipeline_config(config)
                arrays, meta = engine.simulate_to_arrays(cfg, progress=progress)
                path = os.path.join(out_dir, "result.sarb")
                write_sarb(path, arrays, meta)
            elif job_type == "reconstruct":
                path = self._run_reconstruct(config, out_dir, progress)
            elif job_type == "psf":
                report = engine.run_psf(config, progress=progress)
                path = os.path.join(out_dir, "report.json")
                with open(path, "w") as f:
                    json.dump(report, f, indent=2)
            else:  # dataset
                from sarlab.dataset import generate_dataset
                ds_dir = os.path.join(out_dir, "dataset")
                manifest = generate_dataset(config, ds_dir, progress=progress)
                path = os.path.join(ds_dir, "dataset.json")
                if manifest.get("failed"):
                    raise RuntimeError(f"dataset generation failed for "
                                       f"indices {manifest['failed']}")
            job.result_path = path
            self._set_progress(job, 1.0)
            self._set_status(job, "done")
        except Exception as e:  # noqa: BLE001 - job isolation boundary
            job.error = f"{type(e).__name__}: {e}"
            try:
                self._set_status(job, "failed")
            except JobError:
                pass

    def _run_reconstruct(self, config: dict, out_dir: str, progress) -> str:
        cfg = parse_reconstruct_config(config)
        if cfg.echo_job is not None:
            src = self.get(cfg.echo_job)
            if src is None or src.status != "done" or not src.result_path:
                raise ConfigError("echo_job is not a completed job", "echo_job")
            echo_path = src.result_path
        else:
            echo_path = cfg.echo_path
        echo = engine.echo_from_arrays(read_sarb(echo_path),
                                       read_sarb_meta(echo_path))
        grid = build_grid_literal(cfg.grid)
        image, stages = engine.reconstruct_image(
            echo, grid, cfg.algo, cfg.recon,
            keep_kspace=cfg.recon.keep_kspace, progress=progress)
        path = os.path.join(out_dir, "result.sarb")
        write_sarb(path, engine.image_to_arrays(image, stages),
                   {"algorithm": cfg.algo, "axes": list(image.axis_names)})
        return path
