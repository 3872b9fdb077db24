"""MOT Challenge text formats.

Detections (``det.txt``)::

    frame,id,bb_left,bb_top,bb_width,bb_height,conf[,x,y,z]

Ground truth (``gt.txt``)::

    frame,id,bb_left,bb_top,bb_width,bb_height,flag,class,visibility

Tracker results are written as
``frame,id,left,top,width,height,conf,-1,-1,-1`` with two decimals for
geometry, six for the confidence and ``\\n`` line endings, so the output is
byte-reproducible. A sequence directory follows the MOTChallenge layout
``<seq>/det/det.txt``, ``<seq>/gt/gt.txt`` and ``<seq>/seqinfo.ini``.
"""
import configparser
from collections import namedtuple
from dataclasses import dataclass, field
import os
from pathlib import Path
import tempfile

from .geometry import BBox
from .tracker import Detection, FrameResult, TrackOutput

GTBox = namedtuple("GTBox", "id bbox visibility")

PEDESTRIAN = 1


class MOTFormatError(ValueError):
    """A line of a MOT text file could not be parsed."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


@dataclass
class SequenceData:
    name: str
    frame_count: int = 0
    detections_by_frame: dict = field(default_factory=dict)
    ground_truth_by_frame: dict = None
    frame_rate: float = None
    clamped_scores: int = 0


def _rows(path, min_fields):
    with open(path, newline="") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < min_fields:
                raise MOTFormatError(path, line_no, f"expected at least {min_fields} fields, got {len(parts)}")
            yield line_no, parts


def _frame(path, line_no, text):
    try:
        value = float(text)
    except ValueError:
        raise MOTFormatError(path, line_no, f"bad frame number {text!r}") from None
    if value != int(value) or value < 1:
        raise MOTFormatError(path, line_no, f"frame must be a positive integer, got {text!r}")
    return int(value)


def _floats(path, line_no, fields):
    try:
        return [float(x) for x in fields]
    except ValueError as exc:
        raise MOTFormatError(path, line_no, str(exc)) from None


def _box(path, line_no, fields):
    left, top, w, h = _floats(path, line_no, fields)
    if w < 0 or h < 0:
        raise MOTFormatError(path, line_no, f"negative box size {w} x {h}")
    return BBox(left, top, w, h)


def _fill_frames(by_frame, frame_count):
    return {f: by_frame.get(f, []) for f in range(1, frame_count + 1)}


def read_detections(path, frame_count=None):
    """Parse a ``det.txt``; scores outside [0, 1] are clamped and counted."""
    path = str(path)
    by_frame = {}
    clamped = 0
    for line_no, parts in _rows(path, 7):
        frame = _frame(path, line_no, parts[0])
        bbox = _box(path, line_no, parts[2:6])
        (score,) = _floats(path, line_no, parts[6:7])
        if not 0.0 <= score <= 1.0:
            clamped += 1
            score = min(max(score, 0.0), 1.0)
        by_frame.setdefault(frame, []).append(Detection(frame, bbox, score, line_no))
    n = max(by_frame, default=0)
    if frame_count is not None:
        n = max(n, frame_count)
    return SequenceData(
        name=Path(path).stem,
        frame_count=n,
        detections_by_frame=_fill_frames(by_frame, n),
        clamped_scores=clamped,
    )


def read_ground_truth(path):
    """Parse a ``gt.txt`` keeping rows with flag 1 and the pedestrian class.

    Files with only seven columns (no class/visibility) keep every flagged
    row and report visibility 1.
    """
    path = str(path)
    by_frame = {}
    for line_no, parts in _rows(path, 7):
        frame = _frame(path, line_no, parts[0])
        try:
            gt_id = int(float(parts[1]))
            flag = int(float(parts[6]))
            cls = int(float(parts[7])) if len(parts) > 7 else PEDESTRIAN
        except ValueError as exc:
            raise MOTFormatError(path, line_no, str(exc)) from None
        visibility = _floats(path, line_no, parts[8:9])[0] if len(parts) > 8 else 1.0
        if flag != 1 or cls not in (PEDESTRIAN, -1):
            continue
        by_frame.setdefault(frame, []).append(GTBox(gt_id, _box(path, line_no, parts[2:6]), visibility))
    return by_frame


def read_results(path):
    """Parse a tracker result file into ``frame -> [TrackOutput]``."""
    path = str(path)
    by_frame = {}
    for line_no, parts in _rows(path, 7):
        frame = _frame(path, line_no, parts[0])
        try:
            track_id = int(float(parts[1]))
        except ValueError as exc:
            raise MOTFormatError(path, line_no, str(exc)) from None
        bbox = _box(path, line_no, parts[2:6])
        (score,) = _floats(path, line_no, parts[6:7])
        by_frame.setdefault(frame, []).append(TrackOutput(track_id, bbox, score))
    return by_frame


def results_to_frames(results):
    """``[FrameResult]`` -> ``{frame: [TrackOutput]}``."""
    return {r.frame: list(r.outputs) for r in results}


def frames_to_results(by_frame):
    return [FrameResult(f, list(by_frame[f])) for f in sorted(by_frame)]


def _line(frame, obj_id, b, score):
    return (f"{frame},{obj_id},{b.left:.2f},{b.top:.2f},{b.width:.2f},{b.height:.2f},"
            f"{score:.6f},-1,-1,-1\n")


def format_results(results):
    return "".join(_line(r.frame, o.id, o.bbox, o.score) for r in results for o in r.outputs)


def atomic_write_text(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(path, results):
    """Write ``[FrameResult]`` in MOT submission format."""
    atomic_write_text(path, format_results(results))


def write_detections(path, detections_by_frame):
    text = "".join(
        _line(f, -1, d.bbox, d.score)
        for f in sorted(detections_by_frame)
        for d in detections_by_frame[f]
    )
    atomic_write_text(path, text)


def write_ground_truth(path, gt_by_frame):
    lines = []
    for f in sorted(gt_by_frame):
        for g in gt_by_frame[f]:
            b = g.bbox
            lines.append(f"{f},{g.id},{b.left:.2f},{b.top:.2f},{b.width:.2f},{b.height:.2f},"
                         f"1,{PEDESTRIAN},{g.visibility:.6f}\n")
    atomic_write_text(path, "".join(lines))


def read_seqinfo(path):
    """Return ``(seq_length, frame_rate)``; either may be ``None``."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if not parser.read(path):
        raise FileNotFoundError(path)
    section = parser["Sequence"] if parser.has_section("Sequence") else {}
    length = section.get("seqLength")
    rate = section.get("frameRate")
    return (int(length) if length is not None else None,
            float(rate) if rate is not None else None)


def write_seqinfo(path, name, seq_length, frame_rate=30, width=None, height=None):
    lines = ["[Sequence]", f"name={name}", f"frameRate={frame_rate}", f"seqLength={seq_length}"]
    if width is not None:
        lines += [f"imWidth={width}", f"imHeight={height}"]
    atomic_write_text(path, "\n".join(lines) + "\n")


def discover_sequences(dataset_dir):
    """Names of subdirectories that contain ``det/det.txt``, sorted."""
    root = Path(dataset_dir)
    return sorted(p.name for p in root.iterdir() if (p / "det" / "det.txt").is_file())


def load_sequence(dataset_dir, name):
    """Read detections, and ground truth when present, for one sequence."""
    seq_dir = Path(dataset_dir) / name
    frame_count = rate = None
    info = seq_dir / "seqinfo.ini"
    if info.is_file():
        frame_count, rate = read_seqinfo(info)
    seq = read_detections(seq_dir / "det" / "det.txt", frame_count)
    seq.name = name
    seq.frame_rate = rate
    gt_path = seq_dir / "gt" / "gt.txt"
    if gt_path.is_file():
        seq.ground_truth_by_frame = read_ground_truth(gt_path)
    return seq
