"""Command-line front end: ``track``, ``eval``, ``sweep`` and ``synth``.

Exit codes: 0 success, 1 I/O or parse failure, 2 bad arguments.
Set ``BYTEADAPT_LOG=debug|info`` for diagnostics on stderr.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import dataclasses
import logging
import os
from pathlib import Path
import sys

from . import metrics, mot_io, synth
from .tracker import MODES, TrackerConfig, run_sequence, Tracker

log = logging.getLogger("byteadapt")

SWEEP_HEADER = "mode,threshold,mota,idf1,fp,fn,idsw\n"


class ConfigError(ValueError):
    """Bad tracker configuration file or value."""


# --- config files ---------------------------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(TrackerConfig)}


def _coerce(key, text, where):
    if key not in _FIELDS:
        raise ConfigError(f"{where}: unknown config key {key!r}")
    default = _FIELDS[key].default
    try:
        if key == "mode":
            return text
        if isinstance(default, bool):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if isinstance(default, tuple):
            return tuple(float(x) for x in text.split(","))
        if isinstance(default, int):
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key}: {exc}") from None


def read_config(path):
    """Parse a flat ``key = value`` file with optional ``[sequence.<name>]`` sections.

    Returns ``(global_overrides, {sequence_name: overrides})``.
    """
    base, per_seq = {}, {}
    target = base
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            where = f"{path}:{line_no}"
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if not section.startswith("sequence."):
                    raise ConfigError(f"{where}: unknown section [{section}]")
                target = per_seq.setdefault(section[len("sequence."):], {})
                continue
            if "=" not in line:
                raise ConfigError(f"{where}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            target[key] = _coerce(key, value, where)
    return base, per_seq


def build_config(file_overrides, seq_overrides, flags):
    """Defaults < config file < sequence section < command-line flags."""
    values = {**file_overrides, **seq_overrides, **flags}
    try:
        return TrackerConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# --- argument types -------------------------------------------------------

def parse_grid(text):
    """``start:stop:step`` -> list of thresholds, inclusive of ``stop``."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 0.1:0.9:0.1, got {text!r}") from None
    if step <= 0 or start > stop or not (0.0 <= start and stop <= 1.0):
        raise argparse.ArgumentTypeError(f"grid must have 0 <= start <= stop <= 1 and step > 0, got {text!r}")
    values = []
    k = 0
    while True:
        t = round(start + k * step, 10)
        if t > stop + 1e-9:
            break
        values.append(t)
        k += 1
    return values


def unit_interval(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {value}")
    return value


# --- commands -------------------------------------------------------------

def _track_one(config, seq, output, threshold_log):
    tracker = Tracker(config)
    results = run_sequence(config, seq.detections_by_frame, seq.frame_count, tracker=tracker)
    mot_io.write_results(output, results)
    if threshold_log is not None:
        text = "frame,threshold,n_high,n_low\n" + "".join(
            f"{f},{t:.6f},{nh},{nl}\n" for f, t, nh, nl in tracker.threshold_log)
        mot_io.atomic_write_text(threshold_log, text)
    if seq.clamped_scores:
        log.warning("%s: clamped %d scores into [0, 1]", seq.name, seq.clamped_scores)
    log.info("%s: %d frames, %d output rows", seq.name, len(results),
             sum(len(r.outputs) for r in results))
    return output


def _track_job(args):
    config, dataset, name, output, threshold_log = args
    seq = mot_io.load_sequence(dataset, name)
    return _track_one(config, seq, output, threshold_log)


def _needs_threshold(mode, file_cfg, seq_cfg):
    return mode in ("sort", "byte-fixed") and "fixed_threshold" not in {**file_cfg, **seq_cfg}


def cmd_track(args, parser):
    if args.detections is None and args.dataset is None:
        parser.error("one of --detections or --dataset is required")
    if args.detections is not None and args.dataset is not None:
        parser.error("--detections and --dataset are mutually exclusive")
    file_cfg, per_seq = read_config(args.config) if args.config else ({}, {})
    flags = {"mode": args.mode}
    if args.threshold is not None:
        flags["fixed_threshold"] = args.threshold

    if args.detections is not None:
        if _needs_threshold(args.mode, file_cfg, {}) and args.threshold is None:
            parser.error(f"--threshold is required with --mode {args.mode}")
        config = build_config(file_cfg, {}, flags)
        seq = mot_io.read_detections(args.detections)
        _track_one(config, seq, args.output, args.log_thresholds)
        return 0

    names = args.sequence or mot_io.discover_sequences(args.dataset)
    if not names:
        raise FileNotFoundError(f"no sequences with det/det.txt under {args.dataset}")
    jobs = []
    for name in names:
        seq_cfg = per_seq.get(name, {})
        if _needs_threshold(args.mode, file_cfg, seq_cfg) and args.threshold is None:
            parser.error(f"--threshold is required with --mode {args.mode} (no fixed_threshold for {name})")
        config = build_config(file_cfg, seq_cfg, flags)
        if len(names) == 1 and not args.output.endswith(os.sep) and not Path(args.output).is_dir():
            output = args.output
            trace = args.log_thresholds
        else:
            output = str(Path(args.output) / f"{name}.txt")
            trace = str(Path(args.log_thresholds) / f"{name}.csv") if args.log_thresholds else None
        jobs.append((config, args.dataset, name, output, trace))
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(_track_job, jobs))
    else:
        for job in jobs:
            _track_job(job)
    return 0


def cmd_eval(args, parser):
    gt = mot_io.read_ground_truth(args.gt)
    results = mot_io.read_results(args.results)
    report = metrics.evaluate(gt, results, args.iou_gate)
    sys.stdout.write(report.as_kv() if args.format == "kv" else report.as_table())
    return 0


def _sweep_job(job):
    config, detections, frame_count, gt, iou_gate = job
    results = run_sequence(config, detections, frame_count)
    return metrics.evaluate(gt, results, iou_gate)


def _sweep_row(mode, threshold, r):
    return f"{mode},{threshold},{r.mota:.6f},{r.idf1:.6f},{r.fp},{r.fn},{r.id_switches}\n"


def cmd_sweep(args, parser):
    file_cfg, _ = read_config(args.config) if args.config else ({}, {})
    seq = mot_io.read_detections(args.detections)
    gt = mot_io.read_ground_truth(args.gt)
    frame_count = max(seq.frame_count, max(gt, default=0))
    jobs = [(build_config(file_cfg, {}, {"mode": "byte-fixed", "fixed_threshold": t}),
             seq.detections_by_frame, frame_count, gt, args.iou_gate) for t in args.grid]
    jobs.append((build_config(file_cfg, {}, {"mode": "byte-adaptive"}),
                 seq.detections_by_frame, frame_count, gt, args.iou_gate))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_sweep_job, jobs))
    else:
        reports = [_sweep_job(job) for job in jobs]
    rows = [_sweep_row("byte-fixed", f"{t:g}", r) for t, r in zip(args.grid, reports)]
    rows.append(_sweep_row("adaptive", "NA", reports[-1]))
    mot_io.atomic_write_text(args.output, SWEEP_HEADER + "".join(rows))
    return 0


def cmd_synth(args, parser):
    spec = synth.preset(args.preset, args.seed)
    synth.write_sequence(args.output_dir, spec)
    return 0


# --- entry point ----------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="byteadapt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="run the tracker on detections")
    p.add_argument("--detections")
    p.add_argument("--dataset")
    p.add_argument("--sequence", action="append", help="sequence name under --dataset (repeatable)")
    p.add_argument("--mode", choices=MODES, default="byte-adaptive")
    p.add_argument("--threshold", type=unit_interval, help="split threshold for byte-fixed/sort")
    p.add_argument("--output", required=True)
    p.add_argument("--config")
    p.add_argument("--log-thresholds", help="write frame,threshold,n_high,n_low CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score results against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--results", required=True)
    p.add_argument("--iou-gate", type=float, default=0.5)
    p.add_argument("--format", choices=("table", "kv"), default="table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="fixed-threshold grid plus one adaptive run")
    p.add_argument("--detections", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0.1:0.9:0.1"))
    p.add_argument("--output", required=True)
    p.add_argument("--config")
    p.add_argument("--iou-gate", type=float, default=0.5)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic MOT sequence")
    p.add_argument("--preset", choices=synth.PRESETS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def _setup_logging():
    level = os.environ.get("BYTEADAPT_LOG", "").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING) if level else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args, parser)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"byteadapt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
