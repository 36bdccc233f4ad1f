"""REST job service exposing simulate/reconstruct/pipeline/dataset/psf.

HTTP/1.1 JSON API under /api/v1: POST /jobs, GET /jobs/{id},
GET /jobs/{id}/result (SARB or JSON bytes), GET /jobs/{id}/image (PNG),
GET /presets, GET /metrics/resolution.  Long-running work goes through the
asynchronous job model; only the resolution math and presets are synchronous.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from sarlab.analysis import AnalysisError, cylindrical_resolution, \
    planar_resolution
from sarlab.config import ConfigError
from sarlab.constants import C
from sarlab.jobs import JOB_TYPES, JobManager
from sarlab.presets import build_presets
from sarlab.render import RenderError, render_image
from sarlab.sarb import read_sarb


class JobRequest(BaseModel):
    type: str
    config: dict


class JobView(BaseModel):
    id: str
    type: str
    status: str
    progress: float
    config_hash: str
    result: Optional[str] = None
    error: Optional[str] = None
    cached: bool = False


def create_app(data_dir: str | None = None,
               workers: int | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("SARLAB_DATA_DIR") \
        or os.path.join(os.getcwd(), "sarlab-data")
    manager = JobManager(data_dir, workers=workers)
    app = FastAPI(title="sarlab", version="0.1.0")
    app.state.jobs = manager
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def _job_or_404(job_id: str):
        job = manager.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job id {job_id!r}")
        return job

    @app.post("/api/v1/jobs", response_model=JobView, status_code=202)
    def create_job(req: JobRequest):
        if req.type not in JOB_TYPES:
            raise HTTPException(400, detail={
                "message": f"unknown job type {req.type!r}",
                "field": "type"})
        try:
            job = manager.submit(req.type, req.config)
        except ConfigError as e:
            raise HTTPException(400, detail={
                "message": str(e), "field": e.field_path}) from e
        return JobView(**job.as_dict())

    @app.get("/api/v1/jobs/{job_id}", response_model=JobView)
    def job_status(job_id: str):
        return JobView(**_job_or_404(job_id).as_dict())

    @app.get("/api/v1/jobs/{job_id}/result")
    def job_result(job_id: str):
        job = _job_or_404(job_id)
        if job.status != "done" or not job.result_path:
            raise HTTPException(409, f"job {job_id} is {job.status}")
        with open(job.result_path, "rb") as f:
            blob = f.read()
        media = "application/json" if job.result_path.endswith(".json") \
            else "application/octet-stream"
        return Response(content=blob, media_type=media)

    @app.get("/api/v1/jobs/{job_id}/image")
    def job_image(job_id: str, mode: str = "mip", axis: int = 0,
                  index: int = 0, dr: float = 40.0):
        job = _job_or_404(job_id)
        if job.status != "done" or not job.result_path:
            raise HTTPException(409, f"job {job_id} is {job.status}")
        if not job.result_path.endswith(".sarb"):
            raise HTTPException(400, "job result holds no image volume")
        arrays = read_sarb(job.result_path, names=["image"])
        try:
            png = render_image(arrays["image"], mode=mode, axis=axis,
                               index=index, dynamic_range_db=dr)
        except RenderError as e:
            raise HTTPException(400, str(e)) from e
        return Response(content=png, media_type="image/png")

    @app.get("/api/v1/presets")
    def presets():
        return build_presets()

    @app.get("/api/v1/metrics/resolution")
    def resolution(geometry: str = "planar",
                   b: Optional[float] = None,
                   fc: Optional[float] = None,
                   lambda_c: Optional[float] = None,
                   zref: Optional[float] = None,
                   dx: float = 0.0, dy: float = 0.0,
                   fmin: Optional[float] = None,
                   fmax: Optional[float] = None,
                   r0: Optional[float] = None):
        if lambda_c is None and fc is not None and fc > 0:
            lambda_c = C / fc
        try:
            if geometry in ("planar", "linear"):
                if b is None or b <= 0:
                    raise HTTPException(400, detail={
                        "message": "bandwidth b is required and positive",
                        "field": "b"})
                report = planar_resolution(lambda_c or 1.0, zref or 1.0,
                                           dx if lambda_c and zref else 0.0,
                                           dy if lambda_c and zref else 0.0,
                                           b)
            elif geometry in ("cylindrical", "circular"):
                if fmin is None or fmax is None:
                    raise HTTPException(400, detail={
                        "message": "fmin and fmax are required",
                        "field": "fmin"})
                k_min = 2.0 * np.pi * fmin / C
                k_max = 2.0 * np.pi * fmax / C
                lam = lambda_c or C / (0.5 * (fmin + fmax))
                report = cylindrical_resolution(lam, r0 or 1.0,
                                                dy if r0 else 0.0,
                                                k_min, k_max)
            else:
                raise HTTPException(400, detail={
                    "message": f"unknown geometry {geometry!r}",
                    "field": "geometry"})
        except AnalysisError as e:
            raise HTTPException(400, detail={"message": str(e),
                                             "field": geometry}) from e
        return report.as_dict()

    frontend = os.environ.get("SARLAB_FRONTEND_DIR") or os.path.join(
        os.path.dirname(os.path.dirname(os.path.dirname(
            os.path.abspath(__file__)))), "frontend", "dist")
    if os.path.isdir(frontend):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend, html=True),
                  name="frontend")

    return app
