"""Per-frame marker localization and decoding.

The pipeline per frame: adaptive binarization (plus the optional hairline
repair pass), dual-axis scanline candidate search, then per-candidate
decoding against the grayscale image: center refinement, radial unit
estimation with a spread check, 13-sector ring sampling with per-sector
majority vote, canonicalization, and sub-sector orientation refinement.

scan_frame is stateless and reentrant; callers may pipeline frames as long
as results enter the temporal stage in frame order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, imaging
from .codec import (
    SECTOR_ANGLE,
    SECTOR_COUNT,
    CodeId,
    canonicalize,
    normalize_angle,
)
from .config import DetectorConfig
from .errors import NotAValidCode
from .geometry import SAMPLE_R_U, UNITS_PER_DIAMETER

_REFINE_STEPS = 27          # trial offsets across one sector
_DENSE_SAMPLES = 6 * SECTOR_COUNT


@dataclass(frozen=True)
class Candidate:
    x: float
    y: float
    run_unit: float


@dataclass(frozen=True)
class Detection:
    id: CodeId
    center: tuple[float, float]
    diameter: float
    orientation: float
    frame_index: int = 0


@dataclass
class FrameResult:
    frame_index: int
    detections: list[Detection]
    candidate_count: int
    timings: dict[str, int] = field(default_factory=dict)


def scanline_marks(binary: np.ndarray, axis: str, cfg: DetectorConfig | None = None) -> np.ndarray:
    """Run-pattern marks for one scan axis, as an (N, 3) array (x, y, run).

    axis "horizontal" scans rows, "vertical" scans columns of the same
    image. Exposed separately so the stripe-background regression can count
    single-axis marks.
    """
    cfg = cfg or DetectorConfig()
    if axis == "horizontal":
        return _kernels.scan_marks(binary, cfg.ratio_lo, cfg.ratio_hi, cfg.white_balance)
    if axis == "vertical":
        marks = _kernels.scan_marks(
            np.ascontiguousarray(binary.T), cfg.ratio_lo, cfg.ratio_hi, cfg.white_balance
        )
        return marks[:, [1, 0, 2]] if marks.size else marks
    raise ValueError(f"axis must be horizontal or vertical, got {axis!r}")


def find_candidates(binary: np.ndarray, cfg: DetectorConfig | None = None) -> list[Candidate]:
    """Points marked by both the horizontal and the vertical scan.

    A horizontal mark survives if some vertical mark lies within
    cfg.merge_radius; the candidate takes the midpoint of the closest such
    pair. Surviving points are deduplicated within the same radius.
    """
    cfg = cfg or DetectorConfig()
    h_marks = scanline_marks(binary, "horizontal", cfg)
    v_marks = scanline_marks(binary, "vertical", cfg)
    if h_marks.shape[0] == 0 or v_marks.shape[0] == 0:
        return []

    from scipy.spatial import cKDTree

    radius = cfg.merge_radius
    cell = max(radius, 1.0)
    r2 = radius * radius
    tree = cKDTree(v_marks[:, :2])
    dist, nearest = tree.query(h_marks[:, :2], k=1, distance_upper_bound=radius)
    hit = np.isfinite(dist)
    hm = h_marks[hit]
    vm = v_marks[nearest[hit]]
    # both passes must have measured the same blob: a core's row and column
    # black runs are both chords of one disk
    consistent = np.abs(hm[:, 2] - vm[:, 2]) <= 0.5 * np.maximum(hm[:, 2], vm[:, 2])
    hm = hm[consistent]
    vm = vm[consistent]
    paired_arr = np.column_stack((
        (hm[:, 0] + vm[:, 0]) / 2.0,
        (hm[:, 1] + vm[:, 1]) / 2.0,
        (hm[:, 2] + vm[:, 2]) / 4.0,
    ))
    paired = [tuple(row) for row in paired_arr]
    paired.sort(key=lambda p: (p[1], p[0]))
    kept: list[Candidate] = []
    kept_cells: dict[tuple[int, int], list[Candidate]] = {}
    for x, y, unit in paired:
        kx, ky = int(x / cell), int(y / cell)
        dup = False
        for bx in (kx - 1, kx, kx + 1):
            for by in (ky - 1, ky, ky + 1):
                for c in kept_cells.get((bx, by), ()):
                    if (c.x - x) ** 2 + (c.y - y) ** 2 <= r2:
                        dup = True
                        break
                if dup:
                    break
            if dup:
                break
        if not dup:
            c = Candidate(x, y, unit)
            kept.append(c)
            kept_cells.setdefault((kx, ky), []).append(c)
    return kept


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def _bilinear(gray: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    xs = np.minimum(np.maximum(xs, 0.0), w - 1.0)
    ys = np.minimum(np.maximum(ys, 0.0), h - 1.0)
    x0 = np.minimum(xs.astype(np.int64), max(w - 2, 0))
    y0 = np.minimum(ys.astype(np.int64), max(h - 2, 0))
    fx = xs - x0
    fy = ys - y0
    flat = gray.reshape(-1)
    base = y0 * w + x0
    right = 1 if w > 1 else 0
    down = w if h > 1 else 0
    top = flat.take(base) * (1.0 - fx) + flat.take(base + right) * fx
    bot = flat.take(base + down) * (1.0 - fx) + flat.take(base + down + right) * fx
    return top * (1.0 - fy) + bot * fy


_RAY_ANGLES = np.arange(8) * (math.pi / 4.0)
_RAY_DX = -np.sin(_RAY_ANGLES)
_RAY_DY = -np.cos(_RAY_ANGLES)


def decode_at(gray: np.ndarray, cand: Candidate, cfg: DetectorConfig | None = None,
              frame_index: int = 0) -> Detection | None:
    """Decode the marker at a candidate point, or return None to reject."""
    cfg = cfg or DetectorConfig()
    h, w = gray.shape
    u0 = max(cand.run_unit, 2.0)

    # local threshold from the darkest and brightest pixels near the candidate
    half = int(max(6.0, 4.5 * u0))
    cx_i, cy_i = int(round(cand.x)), int(round(cand.y))
    x0, x1 = max(0, cx_i - half), min(w, cx_i + half + 1)
    y0, y1 = max(0, cy_i - half), min(h, cy_i + half + 1)
    window = gray[y0:y1, x0:x1]
    lo, hi = float(window.min()), float(window.max())
    if hi - lo < cfg.min_contrast:
        return None
    thresh = (lo + hi) / 2.0

    # walk to the black-core centroid: midpoints of the black runs through
    # the current point, iterated on both axes
    def black_run(vals) -> int:
        white = vals >= thresh
        return int(white.argmax()) if white.any() else len(vals)

    cx, cy = cand.x, cand.y
    cap = int(3.0 * u0) + 2
    for _ in range(3):
        xi, yi = int(round(cx)), int(round(cy))
        if not (0 <= xi < w and 0 <= yi < h) or gray[yi, xi] >= thresh:
            return None
        left = black_run(gray[yi, max(0, xi - cap):xi][::-1])
        right = black_run(gray[yi, xi + 1:xi + 1 + cap])
        cx = xi + (right - left) / 2.0
        xi = int(round(cx))
        if not (0 <= xi < w):
            return None
        up = black_run(gray[max(0, yi - cap):yi, xi][::-1])
        down = black_run(gray[yi + 1:yi + 1 + cap, xi])
        cy = yi + (down - up) / 2.0
        if left >= cap or right >= cap or up >= cap or down >= cap:
            return None  # runaway black region, not a core

    # radial unit from the first black-to-white crossing along 8 rays
    steps = np.arange(1, int(3.0 * u0 / 0.25) + 1) * 0.25
    xs = cx + _RAY_DX[:, None] * steps[None, :]
    ys = cy + _RAY_DY[:, None] * steps[None, :]
    white = _bilinear(gray, xs, ys) >= thresh
    first = white.argmax(axis=1)
    if not white.any(axis=1).all():
        return None
    units = steps[first]
    mean_u = float(units.mean())
    if mean_u <= 0.5:
        return None
    if (units.max() - units.min()) / mean_u > cfg.unit_spread:
        return None
    unit = mean_u
    diameter = unit * UNITS_PER_DIAMETER
    if diameter < cfg.min_diameter:
        return None

    # bullseye verification: white ring at 1.5u, black core at 0.5u
    ring = _bilinear(gray, cx + _RAY_DX * 1.5 * unit, cy + _RAY_DY * 1.5 * unit)
    core = _bilinear(gray, cx + _RAY_DX * 0.5 * unit, cy + _RAY_DY * 0.5 * unit)
    if (ring >= thresh).sum() < 7 or (core < thresh).sum() < 7:
        return None

    # dense ring profile, shared by phase estimation and refinement
    m = np.arange(_DENSE_SAMPLES) * (2.0 * math.pi / _DENSE_SAMPLES)
    profile = _bilinear(
        gray,
        cx - np.sin(m) * SAMPLE_R_U * unit,
        cy - np.cos(m) * SAMPLE_R_U * unit,
    ) >= thresh

    # phase of the sector-boundary grid: every transition sits at an angle
    # theta + s * SECTOR_ANGLE, so multiplying transition angles by 13 maps
    # them all onto one phase
    flips = profile != np.roll(profile, -1)
    if not flips.any():
        return None
    mid = m[flips] + math.pi / _DENSE_SAMPLES
    z = np.exp(1j * SECTOR_COUNT * mid).sum()
    phase = (np.angle(z) % (2.0 * math.pi)) / SECTOR_COUNT

    # sample the data ring on the phase-aligned grid: 13 sector centers,
    # 3 sub-sector offsets each, majority vote per sector
    k = np.arange(SECTOR_COUNT)
    angles = phase + (k[:, None] + 0.5) * SECTOR_ANGLE \
        + np.array([-0.25, 0.0, 0.25]) * SECTOR_ANGLE
    sx = cx - np.sin(angles) * SAMPLE_R_U * unit
    sy = cy - np.cos(angles) * SAMPLE_R_U * unit
    votes = (_bilinear(gray, sx, sy) >= thresh).sum(axis=1)
    word = 0
    for s in range(SECTOR_COUNT):
        if votes[s] >= 2:
            word |= 1 << s
    try:
        code, offset = canonicalize(word)
    except NotAValidCode:
        return None

    theta = _refine_orientation(m, profile, code.canonical,
                                phase + offset * SECTOR_ANGLE)
    return Detection(code, (cx, cy), diameter, theta, frame_index)


def _refine_orientation(m, profile, canonical, theta0) -> float:
    """Best sub-sector rotation by matching the dense ring profile."""
    deltas = np.linspace(-SECTOR_ANGLE / 2.0, SECTOR_ANGLE / 2.0, _REFINE_STEPS)
    rel = (m[None, :] - theta0 - deltas[:, None]) % (2.0 * math.pi)
    sectors = np.minimum((rel / SECTOR_ANGLE).astype(np.int64), SECTOR_COUNT - 1)
    expected = (canonical >> sectors) & 1
    scores = (expected.astype(bool) == profile[None, :]).sum(axis=1)
    return normalize_angle(theta0 + float(deltas[int(scores.argmax())]))


def scan_frame(gray: np.ndarray, cfg: DetectorConfig | None = None,
               frame_index: int = 0) -> FrameResult:
    """Full single-frame pipeline: binarize, candidates, decode, merge."""
    cfg = cfg or DetectorConfig()
    timings: dict[str, int] = {}
    t_total = time.perf_counter()

    t = time.perf_counter()
    binary = imaging.binarize_adaptive(gray, cfg.binarize_bias)
    timings["binarize_us"] = int((time.perf_counter() - t) * 1e6)

    decode_src = gray
    if cfg.repair_hairlines:
        t = time.perf_counter()
        binary = imaging.morph_close_open(binary)
        # decoding must see the sealed defects too
        decode_src = binary * np.uint8(255)
        timings["morphology_us"] = int((time.perf_counter() - t) * 1e6)

    t = time.perf_counter()
    candidates = find_candidates(binary, cfg)
    timings["candidates_us"] = int((time.perf_counter() - t) * 1e6)

    t = time.perf_counter()
    best: dict[int, tuple[float, Detection]] = {}
    claimed: list[tuple[float, float, float]] = []  # (x, y, radius^2) of decoded markers
    # large cores first, so a decoded marker suppresses its own ring echoes
    ordered = sorted(candidates, key=lambda c: (-c.run_unit, c.y, c.x))
    for cand in ordered:
        if any((cand.x - x) ** 2 + (cand.y - y) ** 2 <= rr for x, y, rr in claimed):
            continue  # inside an already-decoded marker
        det = decode_at(decode_src, cand, cfg, frame_index)
        if det is None:
            continue
        r = det.diameter * (4.5 / UNITS_PER_DIAMETER)
        claimed.append((det.center[0], det.center[1], r * r))
        d2 = (det.center[0] - cand.x) ** 2 + (det.center[1] - cand.y) ** 2
        prev = best.get(det.id.ordinal)
        if prev is None or d2 < prev[0]:
            best[det.id.ordinal] = (d2, det)
    timings["decode_us"] = int((time.perf_counter() - t) * 1e6)
    timings["total_us"] = int((time.perf_counter() - t_total) * 1e6)

    detections = [pair[1] for _, pair in sorted(best.items())]
    return FrameResult(frame_index, detections, len(candidates), timings)
