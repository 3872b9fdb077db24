"""Deterministic synthetic scenarios with banded detection confidences.

Objects move linearly and are clipped to the arena; an object whose clipped
box is empty is absent. Each present object is detected with probability
``detect_prob``, perturbed by Gaussian noise on all four box coordinates and
scored uniformly in ``true_score_range``, or in an occlusion window's own
range while that window is active. Clutter boxes arrive Poisson-distributed
per frame, placed uniformly, sized like a random ground-truth box of the
frame, and scored in ``clutter_score_range``.

Random numbers come from numpy's ``PCG64`` bit generator seeded with
``spec.seed``. Draws happen in a fixed order (per frame: per object detect
flag, 4 noise values and score; then the clutter count and per clutter box
size index, position and score), and every object consumes its draws even
when absent. Geometry is rounded to 2 decimals and scores to 6, matching the
MOT text formats, so a file round trip is lossless.
"""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mot_io
from .geometry import BBox
from .tracker import Detection

OCCLUDED_VISIBILITY = 0.3


@dataclass(frozen=True)
class ObjectMotion:
    start: BBox
    velocity: tuple  # (vx, vy) pixels/frame


@dataclass(frozen=True)
class OcclusionWindow:
    object_id: int  # 1-based, same as the ground-truth id
    first: int
    last: int
    score_range: tuple


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    n_objects: int
    frames: int
    arena: tuple = (1920.0, 1080.0)
    motion: tuple = ()
    noise_sigma: float = 0.0
    detect_prob: float = 1.0
    occlusion_windows: tuple = ()
    clutter_rate: float = 0.0
    clutter_score_range: tuple = (0.05, 0.3)
    true_score_range: tuple = (0.8, 1.0)
    name: str = "custom"

    def validate(self):
        def score_range(label, r):
            lo, hi = r
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"{label} must satisfy 0 <= lo <= hi <= 1, got {r}")

        if self.frames < 1:
            raise ValueError(f"frames must be >= 1, got {self.frames}")
        if len(self.motion) != self.n_objects:
            raise ValueError(f"motion has {len(self.motion)} entries for {self.n_objects} objects")
        if not (self.arena[0] > 0 and self.arena[1] > 0):
            raise ValueError(f"arena must be positive, got {self.arena}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= self.detect_prob <= 1.0:
            raise ValueError("detect_prob must be in [0, 1]")
        if self.clutter_rate < 0:
            raise ValueError("clutter_rate must be >= 0")
        score_range("true_score_range", self.true_score_range)
        score_range("clutter_score_range", self.clutter_score_range)
        for w in self.occlusion_windows:
            score_range("occlusion score_range", w.score_range)
            if not 1 <= w.object_id <= self.n_objects:
                raise ValueError(f"occlusion window for unknown object {w.object_id}")
            if not 1 <= w.first <= w.last:
                raise ValueError(f"bad occlusion frame range {w.first}-{w.last}")
        return self


def _gt_box(m, frame, arena):
    left = m.start.left + m.velocity[0] * (frame - 1)
    top = m.start.top + m.velocity[1] * (frame - 1)
    x1, y1 = max(left, 0.0), max(top, 0.0)
    x2 = min(left + m.start.width, arena[0])
    y2 = min(top + m.start.height, arena[1])
    if x2 - x1 <= 0 or y2 - y1 <= 0:
        return None
    return BBox(round(x1, 2), round(y1, 2), round(x2 - x1, 2), round(y2 - y1, 2))


def _uniform(lo, hi, u):
    return round(lo + u * (hi - lo), 6)


def generate(spec):
    """Return ``(gt_by_frame, detections_by_frame)`` for frames ``1..spec.frames``."""
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    windows = {}
    for w in spec.occlusion_windows:
        for f in range(w.first, w.last + 1):
            windows[w.object_id, f] = w.score_range
    default_sizes = [(m.start.width, m.start.height) for m in spec.motion] or [(40.0, 100.0)]
    W, H = spec.arena

    gt_by_frame, dets_by_frame = {}, {}
    for frame in range(1, spec.frames + 1):
        gts, dets = [], []
        for k, m in enumerate(spec.motion):
            oid = k + 1
            u_detect = rng.random()
            noise = rng.normal(0.0, spec.noise_sigma, 4) if spec.noise_sigma > 0 else np.zeros(4)
            u_score = rng.random()
            box = _gt_box(m, frame, spec.arena)
            if box is None:
                continue
            occluded = (oid, frame) in windows
            gts.append(mot_io.GTBox(oid, box, OCCLUDED_VISIBILITY if occluded else 1.0))
            if u_detect >= spec.detect_prob:
                continue
            lo, hi = windows.get((oid, frame), spec.true_score_range)
            det_box = BBox(round(box.left + noise[0], 2), round(box.top + noise[1], 2),
                           round(max(box.width + noise[2], 1.0), 2), round(max(box.height + noise[3], 1.0), 2))
            dets.append(Detection(frame, det_box, _uniform(lo, hi, u_score)))

        sizes = [(g.bbox.width, g.bbox.height) for g in gts] or default_sizes
        lo, hi = spec.clutter_score_range
        for _ in range(int(rng.poisson(spec.clutter_rate)) if spec.clutter_rate > 0 else 0):
            w, h = sizes[int(rng.integers(len(sizes)))]
            x = rng.uniform(0.0, max(W - w, 0.0))
            y = rng.uniform(0.0, max(H - h, 0.0))
            dets.append(Detection(frame, BBox(round(x, 2), round(y, 2), w, h), _uniform(lo, hi, rng.random())))

        gt_by_frame[frame] = gts
        dets_by_frame[frame] = dets
    return gt_by_frame, dets_by_frame


def _lane_motion(rng, n_objects, arena, per_lane, speed, height=(70.0, 90.0), enter_frac=0.0):
    """Objects on horizontal lanes; same-lane objects start in separate segments.

    A fraction ``enter_frac`` of objects starts outside the arena and walks in.
    """
    W, H = arena
    n_lanes = -(-n_objects // per_lane)
    lane_h = H / n_lanes
    seg_w = W / per_lane
    motions = []
    for k in range(n_objects):
        lane, seg = divmod(k, per_lane)
        h = float(rng.uniform(*height))
        h = min(h, 0.9 * lane_h)
        w = h * float(rng.uniform(0.35, 0.45))
        vx = float(rng.uniform(*speed)) * (1 if rng.random() < 0.5 else -1)
        vy = float(rng.uniform(-0.02, 0.02))
        top = lane * lane_h + (lane_h - h) / 2
        if rng.random() < enter_frac:
            # start just outside the edge the object walks in from
            left = -w - float(rng.uniform(0, 120)) if vx > 0 else W + float(rng.uniform(0, 120))
        else:
            left = seg * seg_w + seg_w / 2 - w / 2 + float(rng.uniform(-40, 40))
        motions.append(ObjectMotion(BBox(round(left, 2), round(top, 2), round(w, 2), round(h, 2)),
                                    (round(vx, 3), round(vy, 3))))
    return tuple(motions)


def _windows(rng, n_objects, frames, per_object, span, score_range, earliest=25, young=None):
    """``per_object`` windows of ``span`` frames for every object.

    With ``young=(a, b)`` the first window of each odd-numbered object starts
    in ``[a, b)``, i.e. before its motion estimate has settled. Window sets
    are redrawn until every frame keeps at least one object unoccluded.
    """
    while True:
        out = []
        for oid in range(1, n_objects + 1):
            starts = [int(rng.integers(*young))] if young and oid % 2 == 1 else []
            while len(starts) < per_object:
                s = int(rng.integers(earliest, frames - span))
                if all(abs(s - t) > span + 5 for t in starts):
                    starts.append(s)
            out.extend(OcclusionWindow(oid, s, s + span - 1, score_range) for s in sorted(starts))
        covered = {}
        for w in out:
            for f in range(w.first, w.last + 1):
                covered[f] = covered.get(f, 0) + 1
        if max(covered.values(), default=0) < n_objects:
            return tuple(out)


PRESETS = ("clean", "occlusion-dip", "dense-clutter", "mot20-like")


def preset(name, seed=0):
    """Seed-pinned scenario.

    ``clean``
        10 objects, 200 frames, always detected, 0.5 px noise, no clutter,
        true scores in [0.8, 1.0].
    ``occlusion-dip``
        ``clean`` plus two 15-frame occlusion windows per object with scores
        in [0.35, 0.5]. Odd-numbered objects are occluded within their first
        8 frames, while their velocity estimate is still poor.
    ``dense-clutter``
        20 objects, detect_prob 0.95, 1 px noise, 10 clutter boxes/frame
        scored in [0.05, 0.3].
    ``mot20-like``
        40 objects sharing lanes (so they cross), lower true scores
        [0.5, 0.9], three occlusion windows per object at [0.15, 0.35],
        4 clutter boxes/frame in [0.05, 0.25].
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    arena = (1920.0, 1080.0)
    if name == "clean":
        return ScenarioSpec(seed=seed, n_objects=10, frames=200, arena=arena,
                            motion=_lane_motion(rng, 10, arena, 1, (1.0, 4.0)),
                            noise_sigma=0.5, detect_prob=1.0, clutter_rate=0.0,
                            true_score_range=(0.8, 1.0), name=name)
    if name == "occlusion-dip":
        base = preset("clean", seed)
        return ScenarioSpec(**{**base.__dict__, "name": name,
                               "occlusion_windows": _windows(rng, 10, 200, 2, 15, (0.35, 0.5),
                                                             young=(3, 8))})
    if name == "dense-clutter":
        return ScenarioSpec(seed=seed, n_objects=20, frames=200, arena=arena,
                            motion=_lane_motion(rng, 20, arena, 2, (0.5, 2.0)),
                            noise_sigma=1.0, detect_prob=0.95, clutter_rate=10.0,
                            clutter_score_range=(0.05, 0.3), true_score_range=(0.8, 1.0), name=name)
    if name == "mot20-like":
        return ScenarioSpec(seed=seed, n_objects=40, frames=200, arena=arena,
                            motion=_lane_motion(rng, 40, arena, 4, (0.5, 2.5)),
                            noise_sigma=1.5, detect_prob=0.9, clutter_rate=4.0,
                            occlusion_windows=_windows(rng, 40, 200, 3, 12, (0.15, 0.35)),
                            clutter_score_range=(0.05, 0.25), true_score_range=(0.5, 0.9), name=name)
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def write_sequence(out_dir, spec, gt_by_frame=None, dets_by_frame=None):
    """Write ``det/det.txt``, ``gt/gt.txt`` and ``seqinfo.ini`` under ``out_dir``."""
    if gt_by_frame is None:
        gt_by_frame, dets_by_frame = generate(spec)
    out = Path(out_dir)
    mot_io.write_detections(out / "det" / "det.txt", dets_by_frame)
    mot_io.write_ground_truth(out / "gt" / "gt.txt", gt_by_frame)
    mot_io.write_seqinfo(out / "seqinfo.ini", spec.name, spec.frames,
                         width=int(spec.arena[0]), height=int(spec.arena[1]))
    return out
