"""``gridmask`` command line.

Exit status: 0 on success, 1 when some work failed at runtime, 2 for usage
errors. All randomness comes from ``--seed``.
"""
from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys

import numpy as np

from . import io as gio
from .augment import SchedulePolicy, Variant, augment_batch
from .failure_sim import METHODS, SimScenario, sweep
from .masks import ConfigError, GridConfig, GridSpec, keep_ratio, render_mask

IMAGE_EXTS = (".png", ".pgm", ".ppm", ".pnm")


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text}") from None


def _int_pair(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B: {text}")
    return vals[0], vals[1]


def _ramp(text: str) -> tuple[float, int]:
    try:
        p, end = text.split(",")
        return float(p), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,END: {text}") from None


def _add_geometry(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--r", type=float, required=required)
    p.add_argument("--d", type=int, required=required)
    p.add_argument("--dx", type=int, default=0)
    p.add_argument("--dy", type=int, default=0)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--h", type=int, required=required)
    p.add_argument("--w", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridmask", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("augment", help="apply GridMask to a directory of images")
    a.add_argument("--in", dest="inp", required=True, help="input directory or image file")
    a.add_argument("--out", required=True, help="output directory")
    a.add_argument("--seed", type=_u64, default=0)
    a.add_argument("--r", type=float, default=0.6)
    a.add_argument("--d-min", type=int, default=96)
    a.add_argument("--d-max", type=int, default=224)
    a.add_argument("--rotate", action=argparse.BooleanOptionalAction, default=True)
    a.add_argument("--variant", default="standard", help="standard, reversed or random:PU")
    sched = a.add_mutually_exclusive_group()
    sched.add_argument("--p", type=float, help="constant application probability")
    sched.add_argument("--ramp", type=_ramp, help="linear ramp P,END (default 0.8,240)")
    a.add_argument("--epoch", type=int, help="epoch for the ramp schedule")
    a.add_argument("--fill", choices=("zero", "mean"), default="zero")
    a.add_argument("--jobs", type=int, default=1)

    pv = sub.add_parser("preview", help="render one mask as a gray/black image")
    _add_geometry(pv, required=True)
    pv.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="failure-case statistics sweep, written as CSV")
    s.add_argument("--methods", default=",".join(METHODS))
    s.add_argument("--xs", type=_int_list, required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--image-side", type=int, default=224)
    s.add_argument("--object-range", type=_int_pair, default=(40, 160))
    s.add_argument("--keep", type=float, default=0.75)
    s.add_argument("--threshold", type=float, default=0.99)
    s.add_argument("--gridmask-size", choices=("unit", "drop"), default="unit",
                   help="whether [x, 2x] sizes the GridMask unit or its dropped square")
    s.add_argument("--seed", type=_u64, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)

    k = sub.add_parser("keep-ratio", help="print the keep ratio of a mask")
    k.add_argument("--mask", help="mask image; nonzero pixels count as kept")
    _add_geometry(k, required=False)
    return parser


def _policy(args) -> SchedulePolicy:
    if args.p is not None:
        return SchedulePolicy.constant(args.p)
    if args.epoch is None:
        raise UsageError("give --p, or --epoch for the ramp schedule")
    upper, end = args.ramp if args.ramp is not None else (0.8, 240)
    return SchedulePolicy.ramp(upper, end)


def _list_images(inp: str) -> list[str]:
    if os.path.isfile(inp):
        return [inp]
    if not os.path.isdir(inp):
        raise UsageError(f"input not found: {inp}")
    return sorted(
        os.path.join(inp, n) for n in os.listdir(inp)
        if n.lower().endswith(IMAGE_EXTS) and os.path.isfile(os.path.join(inp, n))
    )


def _mean_fill(image: np.ndarray) -> np.ndarray:
    return np.rint(image.reshape(-1, image.shape[2]).mean(axis=0)).astype(image.dtype)


def run_augment(args) -> int:
    config = GridConfig(args.r, args.d_min, args.d_max, args.rotate)
    policy = _policy(args)
    variant = Variant.parse(args.variant)
    if args.epoch is not None and args.epoch < 0:
        raise UsageError("--epoch must be >= 0")
    paths = _list_images(args.inp)
    os.makedirs(args.out, exist_ok=True)

    images, load_errors = [], {}
    for i, path in enumerate(paths):
        try:
            images.append(gio.load_image(path))
        except (OSError, gio.ImageIOError) as exc:
            load_errors[i] = exc
            images.append(None)

    fill = _mean_fill if args.fill == "mean" else 0
    # unreadable files stay in the list as None so every file keeps its stream index
    outputs, errors = augment_batch(
        args.seed, images, config, policy, args.epoch or 0, variant, fill, args.jobs
    )
    errors.update(load_errors)

    masked = 0
    for i, path in enumerate(paths):
        if i in errors:
            print(f"error: {path}: {errors[i]}", file=sys.stderr)
            continue
        dest = os.path.join(args.out, os.path.basename(path))
        try:
            if outputs[i] is images[i]:
                shutil.copyfile(path, dest)
            else:
                gio.save_image(outputs[i], dest)
                masked += 1
        except (OSError, gio.ImageIOError) as exc:
            print(f"error: {dest}: {exc}", file=sys.stderr)
            errors[i] = exc
    done = len(paths) - len(errors)
    print(f"processed {done}/{len(paths)} images: {masked} masked, {done - masked} unchanged, "
          f"{len(errors)} failed")
    return 1 if errors else 0


def run_preview(args) -> int:
    spec = GridSpec(args.r, args.d, args.dx, args.dy, args.angle % 360.0)
    mask = render_mask(spec, args.h, args.w)
    gio.save_image(gio.render_mask_preview(mask), args.out)
    print(f"wrote {args.h}x{args.w} preview to {args.out} (keep ratio {keep_ratio(mask):.6f})")
    return 0


def run_simulate(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise UsageError(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
    if not args.xs:
        raise UsageError("--xs must list at least one size")
    scenario = SimScenario(
        image_side=args.image_side,
        object_side_range=args.object_range,
        target_keep=args.keep,
        trials=args.trials,
        failure_threshold=args.threshold,
        gridmask_size=args.gridmask_size,
    )

    def report(row):
        print(f"{row.method:>12} x={row.x:<4d} p_fail={row.p_fail:.4f} "
              f"removed={row.p_removed:.4f} reserved={row.p_reserved:.4f}")

    rows = sweep(args.seed, scenario, methods, args.xs, jobs=args.jobs, progress=report)
    gio.write_stats_csv([gio.StatsRow.from_stats(r, args.seed) for r in rows], args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def run_keep_ratio(args) -> int:
    if args.mask:
        mask = gio.mask_from_image(gio.load_image(args.mask))
    else:
        missing = [f"--{n}" for n in ("r", "d", "h", "w") if getattr(args, n) is None]
        if missing:
            raise UsageError(f"give --mask or the geometry flags (missing {' '.join(missing)})")
        spec = GridSpec(args.r, args.d, args.dx, args.dy, args.angle % 360.0)
        mask = render_mask(spec, args.h, args.w)
    print(f"{keep_ratio(mask):.6f}")
    return 0


COMMANDS = {
    "augment": run_augment,
    "preview": run_preview,
    "simulate": run_simulate,
    "keep-ratio": run_keep_ratio,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"gridmask {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, gio.ImageIOError) as exc:
        print(f"gridmask {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
