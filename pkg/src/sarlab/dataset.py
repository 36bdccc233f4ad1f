"""Seeded LR/HR dataset generation for supervised image processing.

Each sample i draws its scene from seed base_seed + i (test samples continue
after the training block), simulates the low-resolution echo, reconstructs
the LR image, renders the high-resolution label (rasterized ground truth by
default, or a simulated high-end system), and lands in its own SARB file.
Samples depend only on (spec, index), so any worker count and any run order
produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from sarlab import engine
from sarlab.config import (DatasetSpecConfig, build_aperture, build_grid_literal,
                           build_waveform, config_hash, parse_dataset_spec)
from sarlab.forward import add_noise, simulate_echo
from sarlab.scene import random_scene, rasterize_ground_truth, scene_to_array
from sarlab.sarb import write_sarb

SCHEMA_VERSION = 1
SHARD_SIZE = 1000


def sample_relpath(split: str, index: int) -> str:
    return os.path.join(split, f"shard_{index // SHARD_SIZE:03d}",
                        f"sample_{index:06d}.sarb")


def _build_sample_scene(spec: DatasetSpecConfig, seed: int):
    """Scene for one sample: point count drawn from the configured range."""
    from sarlab.config import _load_mesh
    master = np.random.default_rng(seed)
    rnd = spec.scene_random
    lo = rnd.n_points
    hi = rnd.n_points_max if rnd.n_points_max is not None else rnd.n_points
    n_points = int(master.integers(lo, hi + 1))
    scene_seed = int(master.integers(2**63))
    noise_seed = int(master.integers(2**63))
    library = [(_load_mesh(m), m.spacing) for m in rnd.meshes] or None
    scene = random_scene(scene_seed, n_points, np.asarray(rnd.bounds),
                         mesh_library=library)
    return scene, noise_seed


def generate_sample(spec_raw: dict, out_dir: str, split: str, index: int,
                    seed: int) -> dict:
    """Generate and persist one sample; returns its manifest entry."""
    spec = parse_dataset_spec(spec_raw)
    scene, noise_seed = _build_sample_scene(spec, seed)
    grid = build_grid_literal(spec.grid)
    spec_hash = config_hash(spec_raw)

    _, _, _, freq = build_waveform(spec.waveform)
    aperture = build_aperture(spec.aperture)
    echo = simulate_echo(aperture, scene, freq)
    if spec.noise is not None and spec.noise.snr_db is not None:
        echo = add_noise(echo, spec.noise.snr_db, noise_seed)
    lr_image, _ = engine.reconstruct_image(echo, grid, spec.algo)

    if spec.hr_mode == "rasterize":
        hr = rasterize_ground_truth(scene, grid, sigma_vox=spec.sigma_vox,
                                    strict=False).voxels
    else:
        _, _, _, freq_hr = build_waveform(spec.waveform_hr or spec.waveform)
        ap_hr = build_aperture(spec.aperture_hr or spec.aperture)
        echo_hr = simulate_echo(ap_hr, scene, freq_hr)
        hr = engine.reconstruct_image(echo_hr, grid, spec.algo)[0].voxels

    arrays = {
        "lr_image": lr_image.voxels,
        "hr_label": hr,
        "scene": scene_to_array(scene),
        "config_hash": np.frombuffer(bytes.fromhex(spec_hash[:16]),
                                     dtype="<i8").copy(),
    }
    rel = sample_relpath(split, index)
    path = os.path.join(out_dir, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    write_sarb(path, arrays, {"split": split, "index": index, "seed": seed})
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    return {"index": index, "path": rel.replace(os.sep, "/"),
            "seed": seed, "sha256": digest}


def _worker(args):
    spec_raw, out_dir, split, index, seed = args
    try:
        return split, index, generate_sample(spec_raw, out_dir, split, index, seed), None
    except Exception as e:  # noqa: BLE001 - recorded in the manifest
        return split, index, None, f"{type(e).__name__}: {e}"


def plan_samples(spec: DatasetSpecConfig) -> list[tuple[str, int, int]]:
    """(split, index, seed) for every sample; test seeds follow the train block."""
    jobs = [("train", i, spec.base_seed + i) for i in range(spec.n_train)]
    jobs += [("test", j, spec.base_seed + spec.n_train + j)
             for j in range(spec.n_test)]
    return jobs


def generate_dataset(spec_raw: dict, out_dir: str, workers: int = 1,
                     progress=None) -> dict:
    """Generate all samples and write the dataset.json manifest.

    Parallel across samples (each worker writes its own file); the manifest
    is assembled single-threaded after all workers finish.  Failed indices
    are recorded in the manifest instead of aborting the run.
    """
    spec = parse_dataset_spec(spec_raw)
    os.makedirs(out_dir, exist_ok=True)
    jobs = plan_samples(spec)
    args = [(spec_raw, out_dir, split, idx, seed) for split, idx, seed in jobs]

    results: dict[str, list] = {"train": [], "test": []}
    failed = []
    done = 0
    if workers > 1 and len(args) > 1:
        # spawn: forking a process with live JIT thread pools is unsafe
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            for split, idx, entry, err in pool.map(_worker, args):
                done += 1
                if progress is not None:
                    progress(done / len(args))
                if err is None:
                    results[split].append(entry)
                else:
                    failed.append({"split": split, "index": idx, "error": err})
    else:
        for a in args:
            split, idx, entry, err = _worker(a)
            done += 1
            if progress is not None:
                progress(done / max(1, len(args)))
            if err is None:
                results[split].append(entry)
            else:
                failed.append({"split": split, "index": idx, "error": err})

    for split in results:
        results[split].sort(key=lambda e: e["index"])
    manifest = {
        "schema": SCHEMA_VERSION,
        "counts": {"train": spec.n_train, "test": spec.n_test},
        "base_seed": spec.base_seed,
        "spec_hash": config_hash(spec_raw),
        "samples": results,
        "failed": failed,
    }
    with open(os.path.join(out_dir, "dataset.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return manifest
