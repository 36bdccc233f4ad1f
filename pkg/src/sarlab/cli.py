"""sarlab command line: thin wrappers over the pipeline engine.

Subcommands: simulate, reconstruct, dataset, psf, info, serve.  All heavy
lifting happens in sarlab.engine / sarlab.dataset, the same code paths the
REST service calls, so CLI and service runs with equal configs produce
bit-identical SARB output.
"""

from __future__ import annotations

import argparse
import json
import sys

from sarlab import __version__


def _load_json(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def cmd_simulate(args) -> int:
    from sarlab.config import parse_pipeline_config
    from sarlab.engine import simulate_to_arrays
    from sarlab.sarb import write_sarb
    cfg = parse_pipeline_config(_load_json(args.config))
    arrays, meta = simulate_to_arrays(cfg)
    write_sarb(args.out, arrays, meta)
    print(f"wrote {args.out}: echo {arrays['echo'].shape}")
    return 0


def cmd_reconstruct(args) -> int:
    from sarlab.config import build_grid_literal, parse_reconstruct_config
    from sarlab.engine import echo_from_arrays, image_to_arrays, \
        reconstruct_image
    from sarlab.sarb import read_sarb, read_sarb_meta, write_sarb
    raw = {"echo_path": args.echo, "grid": _load_json(args.grid),
           "algo": args.algo}
    if args.keep_kspace:
        raw["recon"] = {"keep_kspace": True}
    cfg = parse_reconstruct_config(raw)
    echo = echo_from_arrays(read_sarb(args.echo), read_sarb_meta(args.echo))
    grid = build_grid_literal(cfg.grid)
    image, stages = reconstruct_image(echo, grid, cfg.algo, cfg.recon,
                                      keep_kspace=args.keep_kspace)
    write_sarb(args.out, image_to_arrays(image, stages),
               {"algorithm": cfg.algo, "axes": list(image.axis_names)})
    print(f"wrote {args.out}: image {image.voxels.shape}")
    return 0


def cmd_pipeline(args) -> int:
    from sarlab.engine import run_pipeline
    from sarlab.sarb import write_sarb
    arrays, meta = run_pipeline(_load_json(args.config),
                                keep_kspace=args.keep_kspace or None)
    write_sarb(args.out, arrays, meta)
    print(f"wrote {args.out}: image {arrays['image'].shape}")
    return 0


def cmd_dataset(args) -> int:
    from sarlab.dataset import generate_dataset
    spec = _load_json(args.spec)
    if args.seed is not None:
        spec["base_seed"] = args.seed
    manifest = generate_dataset(spec, args.out_dir, workers=args.workers)
    n_ok = sum(len(v) for v in manifest["samples"].values())
    print(f"generated {n_ok} samples in {args.out_dir}")
    if manifest["failed"]:
        print(f"FAILED indices: {manifest['failed']}", file=sys.stderr)
        return 1
    return 0


def cmd_psf(args) -> int:
    from sarlab.engine import run_psf
    report = run_psf(_load_json(args.config))
    with open(args.report, "w") as f:
        json.dump(report, f, indent=2)
    print(json.dumps(report, indent=2))
    return 0


def cmd_info(args) -> int:
    from sarlab.sarb import info_sarb, read_sarb_meta
    for entry in info_sarb(args.path):
        shape = "x".join(str(s) for s in entry["shape"]) or "scalar"
        print(f"{entry['name']:24s} {entry['dtype']:5s} [{shape}]")
    meta = read_sarb_meta(args.path)
    if meta:
        print(f"meta: {json.dumps(meta, sort_keys=True)[:200]}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from sarlab.service import create_app
    app = create_app(data_dir=args.data_dir, workers=args.workers)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sarlab",
                                description="near-field SAR laboratory")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="synthesize an echo container")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("reconstruct", help="image an echo container")
    s.add_argument("--algo", required=True,
                   choices=["bpa", "rma-linear", "rma-planar", "rma-circular",
                            "rma-cylindrical"])
    s.add_argument("--echo", required=True)
    s.add_argument("--grid", required=True, help="grid JSON file")
    s.add_argument("--out", required=True)
    s.add_argument("--keep-kspace", action="store_true")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("pipeline", help="simulate + reconstruct in one run")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--keep-kspace", action="store_true")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("dataset", help="generate a labeled LR/HR dataset")
    s.add_argument("--spec", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_dataset)

    s = sub.add_parser("psf", help="measure point-spread widths vs theory")
    s.add_argument("--config", required=True)
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_psf)

    s = sub.add_parser("info", help="list arrays in a SARB container")
    s.add_argument("path")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("serve", help="run the REST job service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--data-dir", default=None)
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
