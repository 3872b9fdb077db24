"""Two-round tracking-by-detection with an adaptive per-frame confidence split."""
from ._backend import BACKEND
from .assignment import AssignmentResult, solve, solve_bruteforce
from .geometry import BBox, DegenerateBoxError, from_state_vector, iou, iou_matrix, to_state_vector
from .kalman import KalmanFilter, KalmanState
from .metrics import EvalReport, evaluate
from .threshold import ADAPTIVE, ConfidenceSplit, Fixed, adaptive_threshold, split_detections, split_scores
from .tracker import Detection, FrameResult, Track, Tracker, TrackerConfig, TrackOutput, TrackStatus, run_sequence

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AssignmentResult", "solve", "solve_bruteforce",
    "BBox", "DegenerateBoxError", "from_state_vector", "iou", "iou_matrix", "to_state_vector",
    "KalmanFilter", "KalmanState", "EvalReport", "evaluate",
    "ADAPTIVE", "ConfidenceSplit", "Fixed", "adaptive_threshold", "split_detections", "split_scores",
    "Detection", "FrameResult", "Track", "Tracker", "TrackerConfig", "TrackOutput", "TrackStatus",
    "run_sequence",
]
