from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from byteadapt import mot_io
from byteadapt.geometry import BBox
from byteadapt.tracker import (ALLOWED_TRANSITIONS, MODES, Detection, FrameMismatchError, FrameOrderError,
                               Tracker, TrackerConfig, TrackStatus, run_sequence)
from conftest import det


def ids_by_frame(results):
    return [[o.id for o in r.outputs] for r in results]


def occluded_object_stream():
    """Static object at 0.9 for 5 frames then 0.4 for 2; a 0.9 distractor elsewhere."""
    frames = {}
    for f in range(1, 8):
        score = 0.9 if f <= 5 else 0.4
        frames[f] = [det(f, 100, 100, 40, 100, score), det(f, 600, 300, 40, 100, 0.9)]
    return frames


@pytest.mark.parametrize("mode", ["sort", "byte-fixed"])
def test_cold_start_fixed_modes(mode):
    d = [det(1, 10, 20, 30, 40, 0.9), det(1, 200, 20, 30, 40, 0.85)]
    out = Tracker(TrackerConfig(mode=mode)).step(1, d).outputs
    assert [o.id for o in out] == [1, 2]
    assert [o.bbox for o in out] == [x.bbox for x in d]


def test_cold_start_adaptive_keeps_only_the_upper_side():
    # two scores always split between them, and the 0.85 box lands in the low set
    d = [det(1, 10, 20, 30, 40, 0.9), det(1, 200, 20, 30, 40, 0.85)]
    out = Tracker(TrackerConfig(mode="byte-adaptive")).step(1, d).outputs
    assert [(o.id, o.bbox) for o in out] == [(1, d[0].bbox)]


def test_cold_start_adaptive_single_band():
    d = [det(1, 10, 20, 30, 40, 0.9), det(1, 200, 20, 30, 40, 0.88), det(1, 400, 20, 30, 40, 0.2)]
    out = Tracker(TrackerConfig(mode="byte-adaptive")).step(1, d).outputs
    assert [o.id for o in out] == [1, 2]


def test_second_association_keeps_identity():
    results = run_sequence(TrackerConfig(mode="byte-adaptive"), occluded_object_stream())
    target = [[o.id for o in r.outputs if o.bbox.left < 300] for r in results]
    assert target == [[1]] * 7


def test_sort_loses_the_dimmed_object():
    statuses = {}
    tracker = Tracker(TrackerConfig(mode="sort", fixed_threshold=0.6),
                      on_transition=lambda f, tid, old, new: statuses.__setitem__((f, tid), new))
    results = run_sequence(tracker.config, occluded_object_stream(), tracker=tracker)
    target = [[o.id for o in r.outputs if o.bbox.left < 300] for r in results]
    assert target == [[1]] * 5 + [[], []]
    assert statuses[6, 1] is TrackStatus.LOST


def test_frame_errors():
    tr = Tracker()
    tr.step(3, [])
    with pytest.raises(FrameOrderError):
        tr.step(3, [])
    with pytest.raises(FrameMismatchError):
        tr.step(4, [det(5, 0, 0, 10, 10, 0.9)])
    with pytest.raises(ValueError, match="frame 2"):
        run_sequence(TrackerConfig(), {1: [], 2: [det(1, 0, 0, 10, 10, 0.9)]})


def test_config_validation():
    with pytest.raises(ValueError):
        TrackerConfig(mode="deepsort")
    with pytest.raises(ValueError):
        TrackerConfig(first_match_gate=1.5)
    with pytest.raises(ValueError):
        TrackerConfig(track_buffer=0)


def test_empty_stream():
    results = run_sequence(TrackerConfig(), {}, frame_count=5)
    assert [r.frame for r in results] == [1, 2, 3, 4, 5]
    assert all(r.outputs == [] for r in results)


@pytest.mark.parametrize("mode", MODES)
def test_stationary_detections_keep_ids(mode):
    boxes = [(10, 10, 40, 100, 0.95), (300, 50, 40, 100, 0.92), (600, 400, 50, 120, 0.9),
             (900, 400, 50, 120, 0.2)]
    stream = {f: [det(f, *b) for b in boxes] for f in range(1, 31)}
    results = run_sequence(TrackerConfig(mode=mode, fixed_threshold=0.5), stream)
    assert ids_by_frame(results) == [[1, 2, 3]] * 30


def test_adaptive_splits_a_lone_band_at_its_widest_gap():
    boxes = [(10, 10, 40, 100, 0.95), (300, 50, 40, 100, 0.92), (600, 400, 50, 120, 0.9)]
    stream = {f: [det(f, *b) for b in boxes] for f in range(1, 11)}
    results = run_sequence(TrackerConfig(mode="byte-adaptive"), stream)
    assert ids_by_frame(results) == [[1]] * 10


def test_gaps_are_empty_frames():
    tracker = Tracker(TrackerConfig(mode="byte-fixed", track_buffer=3))
    tracker.step(1, [det(1, 10, 10, 40, 100, 0.9)])
    assert [o.id for o in tracker.step(3, [det(3, 10, 10, 40, 100, 0.9)]).outputs] == [1]
    tracker.step(8, [])
    assert tracker.tracks == []
    assert [o.id for o in tracker.step(9, [det(9, 10, 10, 40, 100, 0.9)]).outputs] == []


def test_filters_floor_and_area():
    d = [det(1, 0, 0, 40, 100, 0.05), det(1, 200, 0, 3, 3, 0.9), det(1, 400, 0, 40, 100, 0.9)]
    out = Tracker(TrackerConfig(mode="byte-fixed")).step(1, d).outputs
    assert [o.bbox.left for o in out] == [400]


def test_tentative_birth_needs_confirmation():
    tracker = Tracker(TrackerConfig(mode="byte-fixed"))
    tracker.step(1, [det(1, 10, 10, 40, 100, 0.9)])
    r2 = tracker.step(2, [det(2, 10, 10, 40, 100, 0.9), det(2, 500, 10, 40, 100, 0.9)])
    assert [o.id for o in r2.outputs] == [1]
    r3 = tracker.step(3, [det(3, 10, 10, 40, 100, 0.9), det(3, 500, 10, 40, 100, 0.9)])
    assert [o.id for o in r3.outputs] == [1, 2]


def test_tentative_dropped_when_unmatched():
    tracker = Tracker(TrackerConfig(mode="byte-fixed"))
    tracker.step(1, [])
    tracker.step(2, [det(2, 10, 10, 40, 100, 0.9)])
    tracker.step(3, [])
    tracker.step(4, [det(4, 10, 10, 40, 100, 0.9)])
    r = tracker.step(5, [det(5, 10, 10, 40, 100, 0.9)])
    assert [o.id for o in r.outputs] == [2]


def test_birth_margin_in_fixed_mode():
    out = Tracker(TrackerConfig(mode="byte-fixed", fixed_threshold=0.6)).step(
        1, [det(1, 0, 0, 40, 100, 0.65), det(1, 200, 0, 40, 100, 0.75)]).outputs
    assert [o.bbox.left for o in out] == [200]


@st.composite
def random_streams(draw):
    n_frames = draw(st.integers(1, 25))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    stream = {}
    centers = rng.uniform(0, 400, (6, 2))
    for f in range(1, n_frames + 1):
        centers += rng.normal(0, 4, centers.shape)
        dets = []
        for cx, cy in centers:
            if rng.random() < 0.8:
                dets.append(Detection(f, BBox(round(cx, 2), round(cy, 2), 30.0, 60.0), round(float(rng.random()), 3)))
        stream[f] = dets
    return stream


@settings(max_examples=40, deadline=None)
@given(random_streams(), st.sampled_from(MODES), st.integers(1, 5))
def test_lifecycle_invariants(stream, mode, buffer):
    transitions = []
    cfg = TrackerConfig(mode=mode, fixed_threshold=0.5, track_buffer=buffer)
    tracker = Tracker(cfg, on_transition=lambda *a: transitions.append(a))
    seen_ids = set()
    born_from_low = []
    for f in sorted(stream):
        before = {t.id for t in tracker.tracks}
        result = tracker.step(f, stream[f])
        log = tracker.threshold_log[-1]
        for t in tracker.tracks:
            assert t.frames_since_update <= buffer
            if t.status is TrackStatus.LOST:
                assert t.frames_since_update >= 1
            assert (t.frames_since_update == 0) == (t.last_update_frame == f)
            if t.id not in before:
                assert t.id not in seen_ids
                born_from_low.append(t.score < log[1])
        seen_ids |= {t.id for t in tracker.tracks}
        ids = [o.id for o in result.outputs]
        assert len(ids) == len(set(ids))
        assert all(o.bbox.area() >= cfg.min_box_area for o in result.outputs)
    assert not any(born_from_low)
    for _, _, old, new in transitions:
        assert (old, new) in ALLOWED_TRANSITIONS


@settings(max_examples=30, deadline=None)
@given(random_streams(), st.sampled_from(MODES))
def test_deterministic_output(stream, mode):
    cfg = TrackerConfig(mode=mode, fixed_threshold=0.5)
    a = mot_io.format_results(run_sequence(cfg, stream))
    b = mot_io.format_results(run_sequence(cfg, stream))
    assert a == b


@settings(max_examples=30, deadline=None)
@given(random_streams())
def test_mode_collapse_when_nothing_is_low(stream):
    lifted = {f: [Detection(d.frame, d.bbox, 0.7 + 0.3 * d.score) for d in ds] for f, ds in stream.items()}
    cfg = dict(fixed_threshold=0.7)
    sort = run_sequence(TrackerConfig(mode="sort", **cfg), lifted)
    fixed = run_sequence(TrackerConfig(mode="byte-fixed", **cfg), lifted)
    assert mot_io.format_results(sort) == mot_io.format_results(fixed)


def test_no_second_round_for_lost_tracks():
    # frame 3 leaves the track Lost; the 0.4 box on frame 4 may not revive it
    stream = {
        1: [det(1, 100, 100, 40, 100, 0.9), det(1, 600, 100, 40, 100, 0.9)],
        2: [det(2, 100, 100, 40, 100, 0.9), det(2, 600, 100, 40, 100, 0.9)],
        3: [det(3, 600, 100, 40, 100, 0.9)],
        4: [det(4, 100, 100, 40, 100, 0.4), det(4, 600, 100, 40, 100, 0.9)],
    }
    results = run_sequence(TrackerConfig(mode="byte-fixed"), stream)
    assert ids_by_frame(results) == [[1, 2], [1, 2], [2], [2]]


def test_handle_tentative_off_uses_plain_two_rounds():
    tracker = Tracker(TrackerConfig(mode="byte-fixed", handle_tentative=False))
    tracker.step(1, [])
    tracker.step(2, [det(2, 10, 10, 40, 100, 0.9)])
    r = tracker.step(3, [det(3, 10, 10, 40, 100, 0.9)])
    assert [o.id for o in r.outputs] == [1]
