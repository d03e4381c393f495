"""Motion-history and motion-energy accumulation over a frame window.

The motion-history image (MHI) is a per-pixel recency map: a pixel that moved
in the current step is set to ``tau`` and otherwise decays by one intensity
unit per frame, floored at zero. Brighter pixels therefore mark more recent
motion, and the decay gradient encodes its direction. The motion-energy image
(MEI) is the binary union of every motion mask in the window: where motion
happened, regardless of when.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, TooFewFramesError
from .imgio import FrameSequence
from .imgproc import frame_diff, gaussian_smooth, morph_open


@dataclass
class MotionHistory:
    """Recency map ``values`` (float64, each in [0, tau]) plus its window length."""

    values: np.ndarray
    tau: int

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")

    @classmethod
    def zeros(cls, height: int, width: int, tau: int) -> "MotionHistory":
        return cls(values=np.zeros((height, width), dtype=np.float64), tau=tau)


@dataclass
class TemporalTemplate:
    """MHI + MEI pair summarizing one window, with absolute frame span."""

    mhi: MotionHistory
    mei: np.ndarray
    frame_span: tuple[int, int]


def mhi_step(h_prev: MotionHistory, mask: np.ndarray) -> MotionHistory:
    """Advance the history by one frame of motion evidence.

    Pixels active in ``mask`` are set to ``tau``; all others decay by 1,
    floored at 0.
    """
    mask = np.asarray(mask)
    if mask.shape != h_prev.values.shape:
        raise DimensionMismatchError(
            f"mask shape {mask.shape} != history shape {h_prev.values.shape}"
        )
    decayed = np.maximum(h_prev.values - 1.0, 0.0)
    values = np.where(mask > 0, float(h_prev.tau), decayed)
    return MotionHistory(values=values, tau=h_prev.tau)


def motion_masks(frames: np.ndarray, theta: float) -> list[np.ndarray]:
    """Cleaned binary masks for consecutive frame pairs.

    Each frame is smoothed, consecutive smoothed pairs are differenced against
    ``theta``, and each difference is opened. A stack of N frames yields N-1
    masks.
    """
    smoothed = [gaussian_smooth(f) for f in frames]
    return [
        morph_open(frame_diff(smoothed[i], smoothed[i + 1], theta))
        for i in range(len(smoothed) - 1)
    ]


def build_template(seq: FrameSequence, theta: float, tau: int) -> TemporalTemplate:
    """Run the full per-window pipeline: smooth, diff, open, accumulate.

    Only the trailing ``min(len-1, tau)`` mask steps feed the template, so a
    sequence longer than the window contributes just its most recent motion.
    The MEI is the pixelwise OR of those same masks, which makes its support
    exactly the set of pixels the MHI ever saw active.
    """
    n = len(seq)
    if n < 2:
        raise TooFewFramesError(f"need >= 2 frames, got {n}")
    masks = motion_masks(seq.frames, theta)
    used = masks[-min(len(masks), tau):]

    height, width = seq.frames.shape[1:]
    history = MotionHistory.zeros(height, width, tau)
    mei = np.zeros((height, width), dtype=np.uint8)
    for mask in used:
        history = mhi_step(history, mask)
        np.maximum(mei, mask, out=mei)

    first = seq.record.start + (n - 1 - len(used))
    return TemporalTemplate(mhi=history, mei=mei, frame_span=(first, seq.record.end))


def normalize_mhi(mhi: MotionHistory) -> np.ndarray:
    """Render a history as an 8-bit frame: round(255 * value / tau), ties up."""
    scaled = 255.0 * mhi.values / mhi.tau
    return np.floor(scaled + 0.5).astype(np.uint8)
