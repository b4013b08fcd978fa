"""Pixel-level preprocessing: grayscale, adaptive binarization, repair pass.

Images are plain numpy arrays: grayscale is (H, W) uint8, binary is (H, W)
uint8 holding 0 (black) / 1 (white), color is (H, W, 3) uint8 RGB. All
operations are stateless and deterministic; frames may be processed in
parallel on independent buffers.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import EmptyImage


def _require_nonempty(img: np.ndarray) -> None:
    if img.size == 0 or img.shape[0] == 0 or img.shape[1] == 0:
        raise EmptyImage(f"zero-dimension image {img.shape}")


def to_grayscale(rgb: np.ndarray) -> np.ndarray:
    """Convert 8-bit RGB to luminance: round(0.299 R + 0.587 G + 0.114 B).

    Rounding is half-up, so pure red (255, 0, 0) maps to 76.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB, got {rgb.shape}")
    _require_nonempty(rgb)
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    luma = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return np.clip(luma, 0, 255).astype(np.uint8)


def binarize_window(width: int) -> int:
    """Moving-average window for a given image width: max(8, width // 8)."""
    return max(8, width // 8)


def binarize_adaptive(gray: np.ndarray, bias: float = 0.05) -> np.ndarray:
    """Adaptive binarization with a serpentine moving average.

    The running mean follows a boustrophedon path over the image (left to
    right on even rows, right to left on odd ones, carrying across rows)
    with window max(8, width/8). A pixel is white iff its luminance exceeds
    mean * (1 - bias).
    """
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ValueError(f"expected (H, W) grayscale, got {gray.shape}")
    _require_nonempty(gray)
    return _kernels.binarize_serpentine(gray, binarize_window(gray.shape[1]), bias)


def morph_close_open(binary: np.ndarray) -> np.ndarray:
    """Binary closing then opening with a 3x3 square element.

    Closing seals one-pixel black hairlines, the following opening removes
    one-pixel white ones. Borders are edge-replicated.
    """
    binary = np.ascontiguousarray(binary, dtype=np.uint8)
    if binary.ndim != 2:
        raise ValueError(f"expected (H, W) binary, got {binary.shape}")
    _require_nonempty(binary)
    closed = _kernels.erode3(_kernels.dilate3(binary))
    return _kernels.dilate3(_kernels.erode3(closed))
