"""Per-frame preprocessing that turns raw frames into clean binary motion masks.

Three stages, all bit-exact integer arithmetic so outputs are reproducible
across platforms:

1. ``gaussian_smooth`` -- 3x3 binomial blur to suppress compression noise.
2. ``frame_diff``      -- absolute difference of consecutive frames against a
                          threshold ``theta``, giving a {0,1} motion mask.
3. ``morph_open``      -- morphological opening (erode, then dilate) with a
                          3x3 square element to delete isolated specks.

Masks are uint8 arrays with values in {0, 1}.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError
from .imgio import require_frame


def gaussian_smooth(frame: np.ndarray) -> np.ndarray:
    """Smooth a frame with the separable binomial kernel [1,2,1]x[1,2,1]/16.

    Borders are handled by edge replication. The division by 16 rounds to the
    nearest integer with ties rounding up, so a constant image is preserved
    exactly.
    """
    frame = require_frame(frame)
    acc = np.pad(frame, 1, mode="edge").astype(np.uint32)
    # Horizontal then vertical [1, 2, 1] pass; order does not matter.
    acc = acc[:, :-2] + 2 * acc[:, 1:-1] + acc[:, 2:]
    acc = acc[:-2, :] + 2 * acc[1:-1, :] + acc[2:, :]
    return ((acc + 8) >> 4).astype(np.uint8)


def frame_diff(prev: np.ndarray, curr: np.ndarray, theta: float) -> np.ndarray:
    """Binary motion mask: 1 where |curr - prev| is strictly above ``theta``."""
    prev = require_frame(prev)
    curr = require_frame(curr)
    if prev.shape != curr.shape:
        raise DimensionMismatchError(
            f"frame shapes differ: {prev.shape} vs {curr.shape}"
        )
    diff = np.abs(curr.astype(np.int16) - prev.astype(np.int16))
    return (diff > theta).astype(np.uint8)


def _erode(mask: np.ndarray) -> np.ndarray:
    # 3x3 all-ones element; out-of-bounds neighbors count as 0, so border
    # pixels are always eroded.
    padded = np.pad(mask, 1, mode="constant", constant_values=0)
    out = padded[1:-1, 1:-1].copy()
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            np.minimum(out, padded[1 + dy : padded.shape[0] - 1 + dy,
                                   1 + dx : padded.shape[1] - 1 + dx], out=out)
    return out


def _dilate(mask: np.ndarray) -> np.ndarray:
    padded = np.pad(mask, 1, mode="constant", constant_values=0)
    out = padded[1:-1, 1:-1].copy()
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            np.maximum(out, padded[1 + dy : padded.shape[0] - 1 + dy,
                                   1 + dx : padded.shape[1] - 1 + dx], out=out)
    return out


def morph_open(mask: np.ndarray) -> np.ndarray:
    """Morphological opening (erosion then dilation) with a 3x3 square element.

    Removes components too small to contain the element while leaving larger
    shapes intact; the result is always a pixelwise subset of the input.
    """
    mask = np.asarray(mask, dtype=np.uint8)
    return _dilate(_erode(mask))
