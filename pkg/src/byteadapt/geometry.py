"""Axis-aligned boxes, the Kalman measurement parameterization, and IoU."""
from dataclasses import dataclass

import numpy as np

from ._backend import kernels


class DegenerateBoxError(ValueError):
    """A box or state vector with non-positive height (or aspect) was converted."""


@dataclass(frozen=True)
class BBox:
    """Box in pixel coordinates stored as top-left corner plus width/height."""

    left: float
    top: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width >= 0 and self.height >= 0):
            raise DegenerateBoxError(f"negative box size: {self.width} x {self.height}")

    def area(self):
        return self.width * self.height

    def tlwh(self):
        return (self.left, self.top, self.width, self.height)

    def translated(self, dx, dy):
        return BBox(self.left + dx, self.top + dy, self.width, self.height)

    def scaled(self, s):
        return BBox(self.left * s, self.top * s, self.width * s, self.height * s)


def iou(a, b):
    """Intersection over union of two boxes; 0 when the union is empty."""
    iw = min(a.left + a.width, b.left + b.width) - max(a.left, b.left)
    ih = min(a.top + a.height, b.top + b.height) - max(a.top, b.top)
    inter = iw * ih if iw > 0 and ih > 0 else 0.0
    union = (a.area() + b.area()) - inter
    if union <= 0:
        return 0.0
    return min(inter / union, 1.0)


def iou_matrix(a, b):
    """Pairwise IoU for two ``(N, 4)`` / ``(M, 4)`` tlwh arrays."""
    return kernels.iou_matrix(a, b)


def to_state_vector(b):
    """``BBox`` -> ``(cx, cy, aspect, h)`` with aspect = width / height."""
    if not b.height > 0:
        raise DegenerateBoxError(f"box height must be positive, got {b.height}")
    return (b.left + b.width / 2, b.top + b.height / 2, b.width / b.height, b.height)


def from_state_vector(v):
    """Inverse of :func:`to_state_vector`."""
    cx, cy, aspect, h = (float(x) for x in v)
    if not (h > 0 and aspect > 0):
        raise DegenerateBoxError(f"state needs h > 0 and aspect > 0, got h={h}, aspect={aspect}")
    w = aspect * h
    return BBox(cx - w / 2, cy - h / 2, w, h)


def boxes_to_array(boxes):
    """Stack boxes into an ``(N, 4)`` float64 tlwh array."""
    if not boxes:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([b.tlwh() for b in boxes], dtype=np.float64)
