"""Per-frame split of detections into high- and low-confidence sets.

The adaptive rule sorts a frame's confidence scores in decreasing order and
cuts at the steepest drop, i.e. the most negative first difference. The
score just above the drop becomes the threshold and is itself "high".
"""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels


@dataclass(frozen=True)
class Fixed:
    """Split at a constant threshold ``t``."""

    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"fixed threshold must be in [0, 1], got {self.t}")


ADAPTIVE = "adaptive"


@dataclass
class ConfidenceSplit:
    threshold: float
    high: list = field(default_factory=list)
    low: list = field(default_factory=list)


def adaptive_threshold(scores):
    """Score at the upper end of the steepest drop in the sorted scores.

    Ties between equally steep drops go to the one with the higher scores.

    >>> adaptive_threshold([0.95, 0.9, 0.88, 0.4, 0.35])
    0.88
    """
    # the kernels validate the range on the sorted copy
    return kernels.steepest_drop(np.asarray(scores, dtype=np.float64).ravel())


def split_scores(scores, mode=ADAPTIVE, band=(0.0, 1.0)):
    """Partition score indices; ``mode`` is ``ADAPTIVE`` or a :class:`Fixed`.

    ``band`` clamps the adaptive threshold; the default leaves it untouched.
    With no scores the split is empty at threshold 1.0.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    if isinstance(mode, Fixed):
        thr = mode.t
    elif mode == ADAPTIVE:
        if s.size == 0:
            return ConfidenceSplit(1.0)
        thr = adaptive_threshold(s)
        lo, hi = band
        thr = min(max(thr, lo), hi)
    else:
        raise ValueError(f"unknown split mode {mode!r}")
    is_high = s >= thr
    return ConfidenceSplit(
        threshold=float(thr),
        high=np.flatnonzero(is_high).tolist(),
        low=np.flatnonzero(~is_high).tolist(),
    )


def split_detections(detections, mode=ADAPTIVE, band=(0.0, 1.0)):
    """:func:`split_scores` over the ``score`` attribute of each detection."""
    return split_scores([d.score for d in detections], mode, band)
