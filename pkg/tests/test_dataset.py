import json

import numpy as np
import pytest

from sarlab.config import parse_dataset_spec
from sarlab.dataset import generate_dataset, plan_samples, sample_relpath
from sarlab.sarb import read_sarb


def tiny_spec(base_seed=7, n_train=6, n_test=2, hr_mode="rasterize"):
    return {
        "base_seed": base_seed,
        "n_train": n_train,
        "n_test": n_test,
        "waveform": {"type": "fmcw", "f0": 92e9, "K": 4e13, "Tc": 1e-4,
                     "Tr": 1.2e-4, "Nc": 1, "fS": 2e6, "Nf": 8},
        "aperture": {"kind": "linear", "Ny": 16, "dy": 8e-4, "Z0": 0.1},
        "scene_random": {"n_points": 2, "n_points_max": 4,
                         "bounds": [[-2e-3, -4e-3, -4e-3],
                                    [2e-3, 4e-3, 4e-3]]},
        "grid": {"y": {"min": -5e-3, "max": 5e-3, "count": 16},
                 "z": {"min": -5e-3, "max": 5e-3, "count": 16}},
        "algo": "rma-linear",
        "sigma_vox": 1.0,
        "hr_mode": hr_mode,
    }


class TestGenerate:
    def test_deterministic_across_runs_and_workers(self, tmp_path):
        m1 = generate_dataset(tiny_spec(), tmp_path / "a", workers=1)
        m2 = generate_dataset(tiny_spec(), tmp_path / "b", workers=4)
        d1 = [(e["index"], e["sha256"]) for split in ("train", "test")
              for e in m1["samples"][split]]
        d2 = [(e["index"], e["sha256"]) for split in ("train", "test")
              for e in m2["samples"][split]]
        assert d1 == d2
        assert not m1["failed"] and not m2["failed"]

    def test_different_seed_changes_digests(self, tmp_path):
        m1 = generate_dataset(tiny_spec(base_seed=7), tmp_path / "a")
        m2 = generate_dataset(tiny_spec(base_seed=8), tmp_path / "b")
        assert (m1["samples"]["train"][0]["sha256"]
                != m2["samples"]["train"][0]["sha256"])

    def test_sample_contents(self, tmp_path):
        manifest = generate_dataset(tiny_spec(n_train=2, n_test=1), tmp_path / "d")
        entry = manifest["samples"]["train"][0]
        arrays = read_sarb(tmp_path / "d" / entry["path"])
        assert set(arrays) == {"lr_image", "hr_label", "scene", "config_hash"}
        assert arrays["lr_image"].shape == (16, 16)
        assert arrays["lr_image"].dtype == np.complex128
        assert arrays["hr_label"].shape == (16, 16)
        assert arrays["scene"].shape[1] == 5
        assert arrays["config_hash"].dtype == np.int64

    def test_lr_and_hr_share_grid_shape_simulated(self, tmp_path):
        spec = tiny_spec(n_train=1, n_test=0, hr_mode="simulate")
        spec["aperture_hr"] = {"kind": "linear", "Ny": 32, "dy": 8e-4,
                               "Z0": 0.1}
        manifest = generate_dataset(spec, tmp_path / "d")
        entry = manifest["samples"]["train"][0]
        arrays = read_sarb(tmp_path / "d" / entry["path"])
        assert arrays["hr_label"].shape == arrays["lr_image"].shape
        assert arrays["hr_label"].dtype == np.complex128

    def test_manifest_schema(self, tmp_path):
        generate_dataset(tiny_spec(n_train=2, n_test=1), tmp_path / "d")
        manifest = json.loads((tmp_path / "d" / "dataset.json").read_text())
        assert manifest["schema"] == 1
        assert manifest["counts"] == {"train": 2, "test": 1}
        assert manifest["base_seed"] == 7
        assert len(manifest["samples"]["train"]) == 2

    def test_test_seeds_follow_train_block(self):
        spec = parse_dataset_spec(tiny_spec(base_seed=100, n_train=5, n_test=3))
        jobs = plan_samples(spec)
        train_seeds = [s for sp, i, s in jobs if sp == "train"]
        test_seeds = [s for sp, i, s in jobs if sp == "test"]
        assert train_seeds == [100, 101, 102, 103, 104]
        assert test_seeds == [105, 106, 107]

    def test_unwritable_dir_fails(self, tmp_path):
        target = tmp_path / "f"
        target.write_text("a file, not a directory")
        with pytest.raises(OSError):
            generate_dataset(tiny_spec(n_train=1, n_test=0), target)


class TestScale:
    def test_paper_scale_spec_accepted_and_sharded(self):
        spec = parse_dataset_spec(tiny_spec(n_train=20000, n_test=3000))
        jobs = plan_samples(spec)
        assert len(jobs) == 23000
        # sharding: 1000 samples per directory
        assert sample_relpath("train", 0) == "train/shard_000/sample_000000.sarb"
        assert sample_relpath("train", 19999).startswith("train/shard_019/")
        assert sample_relpath("test", 2999).startswith("test/shard_002/")
