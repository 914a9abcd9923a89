"""Command-line interface.

Subcommands: refine, fuse, backproject, gen-affinity, eval, bench.
Exit codes: 0 success, 1 usage error, 2 data or file-format error.

Only the standard library is imported at module level; the numeric modules
load inside the handlers so a --threads cap can be exported to the process
environment before numpy initializes its thread pools.
"""

import argparse
import json
import os
import sys

_THREAD_ENV_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage problems; route them to exit 1.
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _shape(text):
    """Parse WIDTHxHEIGHT (e.g. 1216x352) into an (H, W) tuple."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    try:
        width, height = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"shape dimensions must be positive: {text!r}")
    return (height, width)


def build_parser():
    parser = _Parser(
        prog="depthprop",
        description="Confidence-weighted depth fusion, back-projection, and "
        "dilated accelerated spatial propagation for sparse depth completion.",
    )
    parser.add_argument(
        "--threads",
        type=_positive_int,
        help="cap internal data parallelism (default: hardware parallelism)",
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    refine = commands.add_parser(
        "refine", help="refine a coarse depth map by spatial propagation"
    )
    refine.add_argument("--affinity", required=True, help="affinity field (.aff container)")
    refine.add_argument("--input", help="sparse depth PNG (anchor and/or coarse fill source)")
    refine.add_argument(
        "--coarse",
        help="coarse dense depth PNG; defaults to a nearest-valid fill of --input",
    )
    refine.add_argument("--output", required=True, help="refined depth PNG to write")
    refine.add_argument("--schedule", default="c2", choices=("c1", "c2", "c4"))
    refine.add_argument("--iterations", type=_positive_int, default=12)
    refine.add_argument(
        "--anchor",
        action="store_true",
        help="reset valid pixels of --input after every iteration",
    )
    refine.add_argument("--engine", default="accelerated", choices=("accelerated", "naive"))
    refine.set_defaults(func=_cmd_refine)

    fuse = commands.add_parser(
        "fuse", help="confidence-weighted fusion of two depth predictions"
    )
    fuse.add_argument("--depth-cd", required=True, help="first depth PNG")
    fuse.add_argument("--depth-dd", required=True, help="second depth PNG")
    fuse.add_argument("--conf-cd", required=True, help="first confidence plane container")
    fuse.add_argument("--conf-dd", required=True, help="second confidence plane container")
    fuse.add_argument("--output", required=True, help="fused depth PNG to write")
    fuse.set_defaults(func=_cmd_fuse)

    backproject = commands.add_parser(
        "backproject", help="back-project a depth map into a 3D position map"
    )
    backproject.add_argument("--input", required=True, help="depth PNG")
    backproject.add_argument("--output", required=True, help="position map plane container")
    backproject.add_argument("--calib", help="KITTI calibration text file (P2 row)")
    backproject.add_argument("--fx", type=float)
    backproject.add_argument("--fy", type=float)
    backproject.add_argument("--u0", type=float)
    backproject.add_argument("--v0", type=float)
    backproject.set_defaults(func=_cmd_backproject)

    gen = commands.add_parser(
        "gen-affinity", help="build color-similarity affinities from an image"
    )
    gen.add_argument("--image", required=True, help="RGB guidance image")
    gen.add_argument("--kernel", type=_positive_int, default=3)
    gen.add_argument("--sigma", type=float, default=0.1)
    gen.add_argument("--output", required=True, help="affinity container to write")
    gen.set_defaults(func=_cmd_gen_affinity)

    evaluate = commands.add_parser("eval", help="KITTI depth-completion metrics")
    evaluate.add_argument("--pred", required=True, help="predicted depth PNG")
    evaluate.add_argument("--gt", required=True, help="ground-truth depth PNG")
    evaluate.set_defaults(func=_cmd_eval)

    bench = commands.add_parser(
        "bench", help="time the propagation engines on synthetic inputs"
    )
    bench.add_argument("--shape", type=_shape, default=(352, 1216), help="WIDTHxHEIGHT")
    bench.add_argument("--schedule", default="c2", choices=("c1", "c2", "c4"))
    bench.add_argument("--iterations", type=_positive_int, default=12)
    bench.add_argument("--impl", default="both", choices=("naive", "accelerated", "both"))
    bench.add_argument("--runs", type=_positive_int, default=5)
    bench.add_argument("--warmup", type=_positive_int, default=2)
    bench.add_argument("--seed", type=int, default=2024)
    bench.add_argument("--json", dest="json_path", help="write the report as JSON")
    bench.set_defaults(func=_cmd_bench)

    return parser


def _load_coarse(args):
    from . import io
    from .grids import nearest_fill

    sparse = io.read_depth_png(args.input) if args.input else None
    if args.coarse:
        coarse = io.read_depth_png(args.coarse)
    else:
        if sparse is None:
            raise UsageError("refine needs --coarse and/or --input")
        coarse = nearest_fill(sparse)
    return coarse, sparse


def _cmd_refine(args):
    from . import io
    from .propagation import PropagationConfig, propagate_accelerated, propagate_naive, schedule_c

    if args.anchor and not args.input:
        raise UsageError("--anchor requires --input (the sparse map to anchor to)")
    field = io.read_affinity(args.affinity)
    coarse, sparse = _load_coarse(args)
    config = PropagationConfig(
        schedule=schedule_c(args.schedule, args.iterations),
        anchor_valid=args.anchor,
        anchor_source=sparse if args.anchor else None,
    )
    engine = propagate_naive if args.engine == "naive" else propagate_accelerated
    refined = engine(coarse, field, config)
    io.write_depth_png(refined, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_fuse(args):
    from . import io
    from .fusion import fuse

    def one_plane(path):
        container = io.read_planes(path)
        if container.plane_count != 1:
            raise ValueError(
                f"{path}: expected a single confidence plane, found "
                f"{container.plane_count}"
            )
        return container.planes[0]

    fused = fuse(
        io.read_depth_png(args.depth_cd),
        io.read_depth_png(args.depth_dd),
        one_plane(args.conf_cd),
        one_plane(args.conf_dd),
    )
    io.write_depth_png(fused, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_backproject(args):
    from . import io
    from .geometry import CameraIntrinsics, back_project

    import numpy as np

    manual = [args.fx, args.fy, args.u0, args.v0]
    if args.calib and any(v is not None for v in manual):
        raise UsageError("give either --calib or all of --fx --fy --u0 --v0, not both")
    if args.calib:
        intrinsics = io.read_kitti_calib(args.calib)
    elif all(v is not None for v in manual):
        intrinsics = CameraIntrinsics(fx=args.fx, fy=args.fy, u0=args.u0, v0=args.v0)
    else:
        raise UsageError("intrinsics required: --calib FILE or all of --fx --fy --u0 --v0")
    position = back_project(io.read_depth_png(args.input), intrinsics)
    container = io.PlaneContainer(planes=np.stack([position.x, position.y, position.z]))
    io.write_planes(container, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_gen_affinity(args):
    from . import io
    from .affinity import guided_affinity

    field = guided_affinity(
        io.read_image_rgb(args.image), kernel_size=args.kernel, sigma=args.sigma
    )
    io.write_affinity(field, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_eval(args):
    from . import io
    from .metrics import evaluate

    report = evaluate(io.read_depth_png(args.pred), io.read_depth_png(args.gt))
    machine = " ".join(f"{key}={value:.6f}" for key, value in report.as_dict().items())
    print(machine)
    print()
    print(f"{'metric':<8}{'value':>14}  unit")
    print(f"{'RMSE':<8}{report.rmse:>14.3f}  mm")
    print(f"{'MAE':<8}{report.mae:>14.3f}  mm")
    print(f"{'iRMSE':<8}{report.irmse:>14.3f}  1/km")
    print(f"{'iMAE':<8}{report.imae:>14.3f}  1/km")
    print(f"{'pixels':<8}{report.valid_count:>14d}  evaluated")
    return 0


def _cmd_bench(args):
    from .bench import run_bench, run_pair
    from .propagation import schedule_c

    schedule = schedule_c(args.schedule, args.iterations)
    options = dict(warmup=args.warmup, runs=args.runs, seed=args.seed)
    payload = {"results": []}
    if args.impl == "both":
        naive, accel, max_rel = run_pair(args.shape, schedule, **options)
        results = [naive, accel]
        payload["speedup"] = naive.median_seconds / accel.median_seconds
        payload["max_relative_difference"] = max_rel
    else:
        results = [run_bench(args.shape, schedule, args.impl, **options)]
    for result in results:
        height, width = result.grid_shape
        print(
            f"{result.label:<12} {width}x{height}  schedule {result.schedule}  "
            f"median {result.median_seconds:.6f} s over {result.runs} runs"
        )
        payload["results"].append(result.as_dict())
    if args.impl == "both":
        print(
            f"speedup      {payload['speedup']:.2f}x  "
            f"(max relative output difference {payload['max_relative_difference']:.2e})"
        )
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
        print(f"wrote {args.json_path}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.threads:
        for name in _THREAD_ENV_VARS:
            os.environ[name] = str(args.threads)

    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
