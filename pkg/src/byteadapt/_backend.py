"""Kernel backend selection.

The compiled ``_core`` module is preferred; ``BYTEADAPT_PURE=1`` forces the
numpy fallback. Both expose ``iou_matrix``, ``steepest_drop`` and
``lsa_gated`` with identical semantics.
"""
import importlib
import os

from . import _pure


def load(name):
    """Return the kernel module called ``name`` ("core" or "pure")."""
    if name == "pure":
        return _pure
    if name == "core":
        return importlib.import_module("byteadapt._core")
    raise ValueError(f"unknown backend {name!r}")


def available():
    names = ["pure"]
    try:
        load("core")
    except ImportError:
        pass
    else:
        names.insert(0, "core")
    return names


if os.environ.get("BYTEADAPT_PURE", "") not in ("", "0"):
    kernels = _pure
else:
    try:
        kernels = load("core")
    except ImportError:
        kernels = _pure

BACKEND = "core" if kernels is not _pure else "pure"
