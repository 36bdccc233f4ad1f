import json
import time

import pytest
from fastapi.testclient import TestClient

from sarlab.sarb import read_sarb_bytes
from sarlab.service import create_app


def pipeline_config(n_el=16, nf=8):
    return {
        "waveform": {"type": "fmcw", "f0": 92e9, "K": 4e13, "Tc": 1e-4,
                     "Tr": 1.2e-4, "Nc": 1, "fS": 2e6, "Nf": nf},
        "aperture": {"kind": "linear", "Ny": n_el, "dy": 8e-4, "Z0": 0.1},
        "scene": {"points": [{"xyz": [0.0, 1e-3, 2e-3]}]},
        "grid": {"y": {"min": -5e-3, "max": 5e-3, "count": 16},
                 "z": {"min": -5e-3, "max": 5e-3, "count": 16}},
        "algo": "rma-linear",
    }


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path), workers=2)
    with TestClient(app) as c:
        yield c


def wait_done(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        job = client.get(f"/api/v1/jobs/{job_id}").json()
        if job["status"] in ("done", "failed"):
            return job
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} did not finish")


class TestJobs:
    def test_pipeline_job_lifecycle(self, client):
        r = client.post("/api/v1/jobs",
                        json={"type": "pipeline", "config": pipeline_config()})
        assert r.status_code == 202
        job_id = r.json()["id"]
        assert r.json()["status"] in ("queued", "running", "done")
        job = wait_done(client, job_id)
        assert job["status"] == "done"
        assert job["progress"] == pytest.approx(1.0)
        blob = client.get(f"/api/v1/jobs/{job_id}/result")
        assert blob.status_code == 200
        arrays = read_sarb_bytes(blob.content)
        assert arrays["image"].shape == (16, 16)

    def test_missing_aperture_400_names_field(self, client):
        cfg = pipeline_config()
        del cfg["aperture"]
        r = client.post("/api/v1/jobs", json={"type": "pipeline", "config": cfg})
        assert r.status_code == 400
        assert "aperture" in json.dumps(r.json())

    def test_two_identical_submissions_distinct_ids(self, client):
        cfg = pipeline_config()
        a = client.post("/api/v1/jobs", json={"type": "pipeline", "config": cfg})
        b = client.post("/api/v1/jobs", json={"type": "pipeline", "config": cfg})
        assert a.json()["id"] != b.json()["id"]

    def test_cached_result_flagged(self, client):
        cfg = pipeline_config()
        a = client.post("/api/v1/jobs",
                        json={"type": "pipeline", "config": cfg}).json()
        wait_done(client, a["id"])
        b = client.post("/api/v1/jobs",
                        json={"type": "pipeline", "config": cfg}).json()
        assert b["status"] == "done"
        assert b["cached"] is True

    def test_unknown_job_404(self, client):
        assert client.get("/api/v1/jobs/deadbeef").status_code == 404

    def test_failed_job_isolated(self, client):
        bad = pipeline_config()
        # scatterer exactly on the first aperture element
        bad["scene"] = {"points": [{"xyz": [0.0, -7.5 * 8e-4, 0.1]}]}
        r1 = client.post("/api/v1/jobs", json={"type": "pipeline", "config": bad})
        good = client.post("/api/v1/jobs",
                           json={"type": "pipeline", "config": pipeline_config()})
        j1 = wait_done(client, r1.json()["id"])
        j2 = wait_done(client, good.json()["id"])
        assert j1["status"] == "failed" and j1["error"]
        assert j2["status"] == "done"

    def test_malformed_json_survived(self, client):
        r = client.post("/api/v1/jobs", content=b"{not json",
                        headers={"content-type": "application/json"})
        assert r.status_code in (400, 422)
        assert client.get("/api/v1/presets").status_code == 200

    def test_simulate_then_reconstruct_job(self, client):
        cfg = pipeline_config()
        sim = client.post("/api/v1/jobs",
                          json={"type": "simulate", "config": cfg}).json()
        wait_done(client, sim["id"])
        rec_cfg = {"echo_job": sim["id"], "algo": "rma-linear",
                   "grid": cfg["grid"]}
        rec = client.post("/api/v1/jobs",
                          json={"type": "reconstruct", "config": rec_cfg}).json()
        job = wait_done(client, rec["id"])
        assert job["status"] == "done"
        arrays = read_sarb_bytes(
            client.get(f"/api/v1/jobs/{rec['id']}/result").content)
        assert arrays["image"].shape == (16, 16)

    def test_psf_job_returns_report(self, client):
        cfg = pipeline_config(n_el=32, nf=16)
        cfg["grid"] = {"y": {"min": -8e-3, "max": 8e-3, "count": 81},
                       "z": {"min": -40e-3, "max": 40e-3, "count": 81}}
        r = client.post("/api/v1/jobs", json={"type": "psf", "config": cfg})
        job = wait_done(client, r.json()["id"])
        assert job["status"] == "done"
        report = client.get(f"/api/v1/jobs/{job['id']}/result").json()
        assert "predicted" in report and "measured" in report


class TestImages:
    def finished_job(self, client):
        r = client.post("/api/v1/jobs",
                        json={"type": "pipeline", "config": pipeline_config()})
        return wait_done(client, r.json()["id"])

    def test_png_rendered_and_deterministic(self, client):
        job = self.finished_job(client)
        a = client.get(f"/api/v1/jobs/{job['id']}/image?mode=mip&axis=0&dr=40")
        b = client.get(f"/api/v1/jobs/{job['id']}/image?mode=mip&axis=0&dr=40")
        assert a.status_code == 200
        assert a.headers["content-type"] == "image/png"
        assert a.content == b.content
        assert a.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_out_of_range_slice_400(self, client):
        job = self.finished_job(client)
        r = client.get(f"/api/v1/jobs/{job['id']}/image"
                       "?mode=slice&axis=0&index=999")
        assert r.status_code == 400


class TestSyncEndpoints:
    def test_presets_gallery(self, client):
        presets = client.get("/api/v1/presets").json()
        ids = {p["id"] for p in presets}
        assert len(presets) >= 5
        assert {"fig5a", "fig5b", "fig5c", "fig5d"} <= ids
        for p in presets:
            assert {"waveform", "aperture", "scene", "grid",
                    "algo"} <= set(p["config"])

    def test_resolution_planar_dz(self, client):
        r = client.get("/api/v1/metrics/resolution?geometry=planar&b=10e9")
        assert r.status_code == 200
        assert r.json()["predicted"]["dz"] == pytest.approx(14.990e-3, rel=1e-4)

    def test_resolution_missing_b_400(self, client):
        r = client.get("/api/v1/metrics/resolution?geometry=planar")
        assert r.status_code == 400

    def test_resolution_cross_range_from_carrier(self, client):
        r = client.get("/api/v1/metrics/resolution?geometry=linear"
                       "&b=10e9&fc=435e9&zref=0.1&dy=21.88e-3")
        got = r.json()["predicted"]
        assert got["dy"] == pytest.approx(1.575e-3, rel=1e-3)
        assert got["dz"] == pytest.approx(14.990e-3, rel=1e-4)

    def test_resolution_cylindrical_drho(self, client):
        r = client.get("/api/v1/metrics/resolution"
                       "?geometry=cylindrical&fmin=430e9&fmax=440e9")
        assert r.status_code == 200
        assert r.json()["predicted"]["drho"] == pytest.approx(0.1316e-3,
                                                              rel=1e-3)

    def test_resolution_nonpositive_400(self, client):
        r = client.get("/api/v1/metrics/resolution?geometry=planar&b=-5")
        assert r.status_code == 400


class TestCliServiceParity:
    def test_pipeline_bytes_identical(self, client, tmp_path):
        """CLI and service runs of the same config produce identical SARB."""
        from sarlab.cli import main
        cfg = pipeline_config()
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out_path = tmp_path / "cli.sarb"
        assert main(["pipeline", "--config", str(cfg_path),
                     "--out", str(out_path)]) == 0

        r = client.post("/api/v1/jobs",
                        json={"type": "pipeline", "config": cfg})
        job = wait_done(client, r.json()["id"])
        blob = client.get(f"/api/v1/jobs/{job['id']}/result").content
        assert out_path.read_bytes() == blob
