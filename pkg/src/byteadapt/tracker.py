"""Two-round tracking-by-detection with a per-frame confidence split.

Each frame the tracker predicts every live track, splits the detections into
high and low confidence, matches tracked and lost tracks against the high
set, then gives tracks that were being followed a second chance against the
low set. Newborn (tentative) tracks get their own small round against
leftover high detections. Three modes are supported:

``sort``
    Detections below ``fixed_threshold`` are discarded and there is no second
    round.
``byte-fixed``
    Split at ``fixed_threshold``.
``byte-adaptive``
    Split at the steepest drop of the frame's sorted scores.
"""
from collections import namedtuple
from dataclasses import dataclass, field
from enum import Enum
import logging

import numpy as np

from . import threshold as thr
from .assignment import solve
from .geometry import BBox, boxes_to_array, iou_matrix, to_state_vector
from .kalman import KalmanFilter, KalmanState

log = logging.getLogger(__name__)

MODES = ("sort", "byte-fixed", "byte-adaptive")


class TrackStatus(Enum):
    TENTATIVE = "tentative"
    TRACKED = "tracked"
    LOST = "lost"
    REMOVED = "removed"


ALLOWED_TRANSITIONS = {
    (TrackStatus.TENTATIVE, TrackStatus.TRACKED),
    (TrackStatus.TENTATIVE, TrackStatus.REMOVED),
    (TrackStatus.TRACKED, TrackStatus.TRACKED),
    (TrackStatus.TRACKED, TrackStatus.LOST),
    (TrackStatus.LOST, TrackStatus.TRACKED),
    (TrackStatus.LOST, TrackStatus.REMOVED),
}


class FrameOrderError(ValueError):
    """Frames were not presented in strictly increasing order."""


class FrameMismatchError(ValueError):
    """A detection was passed to a frame it does not belong to."""


@dataclass(frozen=True)
class Detection:
    frame: int
    bbox: BBox
    score: float
    source_line: int = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score must be in [0, 1], got {self.score}")


TrackOutput = namedtuple("TrackOutput", "id bbox score")


@dataclass
class FrameResult:
    frame: int
    outputs: list = field(default_factory=list)


@dataclass
class TrackerConfig:
    mode: str = "byte-adaptive"
    fixed_threshold: float = 0.6
    score_floor: float = 0.1
    first_match_gate: float = 0.8
    second_match_gate: float = 0.5
    tentative_match_gate: float = 0.3
    track_buffer: int = 30
    min_box_area: float = 10.0
    new_track_margin: float = 0.1
    weight_position: float = 1.0 / 20
    weight_velocity: float = 1.0 / 160
    handle_tentative: bool = True
    adaptive_band: tuple = (0.0, 1.0)
    adaptive_new_track_margin: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("first_match_gate", "second_match_gate", "tentative_match_gate", "fixed_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if int(self.track_buffer) != self.track_buffer or self.track_buffer < 1:
            raise ValueError(f"track_buffer must be an integer >= 1, got {self.track_buffer}")
        lo, hi = self.adaptive_band
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"adaptive_band must satisfy 0 <= lo <= hi <= 1, got {self.adaptive_band}")
        self.adaptive_band = (float(lo), float(hi))


class Track:
    """One identity followed through the sequence."""

    def __init__(self, track_id, mean, covariance, detection, status):
        self.id = track_id
        self.mean = mean
        self.covariance = covariance
        self.status = status
        self.score = detection.score
        self.last_update_frame = detection.frame
        self.start_frame = detection.frame
        self.frames_since_update = 0
        self.age = 0

    @property
    def state(self):
        return KalmanState(self.mean, self.covariance)

    def predicted_tlwh(self):
        return _mean_to_tlwh(self.mean[None])[0]

    def __repr__(self):
        return f"Track(id={self.id}, status={self.status.value}, since_update={self.frames_since_update})"


def _mean_to_tlwh(means):
    """Kalman means -> tlwh rows; negative sizes become zero so IoU is 0."""
    h = np.maximum(means[:, 3], 0.0)
    w = np.maximum(means[:, 2] * means[:, 3], 0.0)
    out = np.empty((len(means), 4))
    out[:, 0] = means[:, 0] - w / 2
    out[:, 1] = means[:, 1] - h / 2
    out[:, 2] = w
    out[:, 3] = h
    return out


class Tracker:
    """Stateful per-sequence tracker. Feed frames in increasing order to :meth:`step`.

    ``on_transition(frame, track_id, old_status, new_status)`` is called for
    every status change, including Tracked -> Tracked re-confirmations.
    """

    def __init__(self, config=None, on_transition=None):
        self.config = config or TrackerConfig()
        self.kf = KalmanFilter(self.config.weight_position, self.config.weight_velocity)
        self.on_transition = on_transition
        self.tracks = []
        self.threshold_log = []
        self._next_id = 1
        self._first_frame = None
        self._last_frame = None

    def step(self, frame, detections):
        """Process one frame and return the confirmed tracks it produces."""
        frame = int(frame)
        if self._last_frame is not None and frame <= self._last_frame:
            raise FrameOrderError(f"frame {frame} does not follow frame {self._last_frame}")
        for d in detections:
            if d.frame != frame:
                raise FrameMismatchError(f"detection for frame {d.frame} passed to frame {frame}")
        if self._last_frame is not None:
            for gap in range(self._last_frame + 1, frame):
                self._advance(gap, [])
        if self._first_frame is None:
            self._first_frame = frame
        return self._advance(frame, list(detections))

    def _set_status(self, frame, track, status):
        if self.on_transition is not None:
            self.on_transition(frame, track.id, track.status, status)
        track.status = status

    def _split(self, dets):
        cfg = self.config
        scores = [d.score for d in dets]
        if cfg.mode == "byte-adaptive":
            split = thr.split_scores(scores, thr.ADAPTIVE, cfg.adaptive_band)
        else:
            split = thr.split_scores(scores, thr.Fixed(cfg.fixed_threshold))
        high = [dets[i] for i in split.high]
        low = [dets[i] for i in split.low] if cfg.mode != "sort" else []
        return split, high, low

    def _associate(self, tracks, boxes, dets, gate):
        """Match ``tracks`` (with predicted ``boxes``) to ``dets`` on 1 - IoU."""
        if not tracks or not dets:
            return [], list(range(len(tracks))), list(range(len(dets)))
        cost = 1.0 - iou_matrix(boxes, boxes_to_array([d.bbox for d in dets]))
        res = solve(cost, gate)
        return res.matches, res.unmatched_rows, res.unmatched_cols

    def _advance(self, frame, detections):
        cfg = self.config
        dets = [d for d in detections if d.score >= cfg.score_floor and d.bbox.area() >= cfg.min_box_area]
        split, high, low = self._split(dets)
        self.threshold_log.append((frame, split.threshold, len(split.high), len(split.low)))

        live = self.tracks
        predicted = {}
        if live:
            means, covs = self.kf.predict_many(
                np.stack([t.mean for t in live]), np.stack([t.covariance for t in live]))
            for t, m, p in zip(live, means, covs):
                t.mean, t.covariance = m, p
                t.age += 1
            predicted = dict(zip((t.id for t in live), _mean_to_tlwh(means)))

        updates = []  # (track, detection)
        matched = set()

        def boxes_of(tracks):
            return np.array([predicted[t.id] for t in tracks]).reshape(-1, 4)

        # first round: tracks being followed (and lost ones) against the high set
        pool_status = {TrackStatus.TRACKED, TrackStatus.LOST}
        if not cfg.handle_tentative:
            pool_status.add(TrackStatus.TENTATIVE)
        pool = [t for t in live if t.status in pool_status]
        pairs, _, free_high = self._associate(pool, boxes_of(pool), high, cfg.first_match_gate)
        for i, j in pairs:
            updates.append((pool[i], high[j]))
            matched.add(pool[i].id)
        high_left = [high[j] for j in free_high]

        # second round: only tracks that were Tracked coming into this frame
        if cfg.mode != "sort" and low:
            second = [t for t in pool if t.id not in matched and t.status is TrackStatus.TRACKED]
            pairs, _, _ = self._associate(second, boxes_of(second), low, cfg.second_match_gate)
            for i, j in pairs:
                updates.append((second[i], low[j]))
                matched.add(second[i].id)

        # newborn tracks: confirm against leftover high detections, or drop
        if cfg.handle_tentative:
            tentative = [t for t in live if t.status is TrackStatus.TENTATIVE]
            pairs, _, free = self._associate(tentative, boxes_of(tentative), high_left, cfg.tentative_match_gate)
            for i, j in pairs:
                updates.append((tentative[i], high_left[j]))
                matched.add(tentative[i].id)
            high_left = [high_left[j] for j in free]

        if updates:
            tracks = [t for t, _ in updates]
            z = np.array([to_state_vector(d.bbox) for _, d in updates])
            means, covs = self.kf.update_many(
                np.stack([t.mean for t in tracks]), np.stack([t.covariance for t in tracks]), z)
            for (t, d), m, p in zip(updates, means, covs):
                t.mean, t.covariance = m, p
                t.score = d.score
                t.last_update_frame = frame
                t.frames_since_update = 0
                self._set_status(frame, t, TrackStatus.TRACKED)

        for t in live:
            if t.id in matched:
                continue
            t.frames_since_update += 1
            if t.status is TrackStatus.TENTATIVE:
                self._set_status(frame, t, TrackStatus.REMOVED)
            elif t.status is TrackStatus.TRACKED:
                self._set_status(frame, t, TrackStatus.LOST)
            if t.status is TrackStatus.LOST and t.frames_since_update > cfg.track_buffer:
                self._set_status(frame, t, TrackStatus.REMOVED)
        self.tracks = [t for t in live if t.status is not TrackStatus.REMOVED]

        margin = cfg.adaptive_new_track_margin if cfg.mode == "byte-adaptive" else cfg.new_track_margin
        birth_gate = split.threshold + margin
        born_status = TrackStatus.TRACKED if frame == self._first_frame else TrackStatus.TENTATIVE
        for d in high_left:
            if d.score < birth_gate or not d.bbox.height > 0:
                continue
            state = self.kf.initiate(to_state_vector(d.bbox))
            self.tracks.append(Track(self._next_id, state.mean, state.covariance, d, born_status))
            self._next_id += 1

        outputs = []
        for t in self.tracks:
            if t.status is not TrackStatus.TRACKED:
                continue
            box = BBox(*_mean_to_tlwh(t.mean[None])[0])
            if box.area() >= cfg.min_box_area:
                outputs.append(TrackOutput(t.id, box, t.score))
        outputs.sort(key=lambda o: o.id)
        self._last_frame = frame
        return FrameResult(frame, outputs)


def run_sequence(config, detections_by_frame, frame_count=None, tracker=None):
    """Track a whole sequence; returns one :class:`FrameResult` per frame from 1.

    Frames missing from ``detections_by_frame`` are processed with no
    detections.
    """
    tracker = tracker or Tracker(config)
    last = max(detections_by_frame, default=0)
    if frame_count is not None:
        last = max(last, frame_count)
    results = []
    for frame in range(1, last + 1):
        try:
            results.append(tracker.step(frame, detections_by_frame.get(frame, [])))
        except (ValueError, ArithmeticError) as exc:
            raise type(exc)(f"frame {frame}: {exc}") from exc
    return results
