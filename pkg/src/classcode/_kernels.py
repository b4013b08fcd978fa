"""Hot pixel kernels: numba-jitted inner loops with pure-numpy fallbacks.

The jitted path is the default. Set CLASSCODE_NUMBA=0 to force the numpy
fallback (benchmarks/bench_pipeline.py compares the two). Both paths
implement identical arithmetic; outputs are byte-for-byte equal.

Kernels:
  binarize_serpentine  adaptive threshold with a serpentine running mean
  dilate3 / erode3     3x3 square morphology, edge-replicated borders
  scan_marks           1:2:1 white:black:white scanline candidate marks
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("CLASSCODE_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

MARK_COLS = 3  # (x, y, black_run_width)


# ---------------------------------------------------------------------------
# adaptive binarization
# ---------------------------------------------------------------------------

def _binarize_loop(gray, window, bias):
    # Serpentine running mean, blended per pixel with the previous row's
    # mean at the same column. Adjacent rows scan in opposite directions,
    # so the blend cancels the directional lag of the mean under smooth
    # illumination gradients.
    h, w = gray.shape
    out = np.zeros((h, w), dtype=np.uint8)
    prev = np.empty(w, dtype=np.float64)
    cur = np.empty(w, dtype=np.float64)
    inv = 1.0 / window
    decay = 1.0 - inv
    scale = 1.0 - bias
    m = float(gray[0, 0])
    for y in range(h):
        if y % 2 == 0:
            for x in range(w):
                m = m * decay + float(gray[y, x]) * inv
                cur[x] = m
        else:
            for x in range(w - 1, -1, -1):
                m = m * decay + float(gray[y, x]) * inv
                cur[x] = m
        if y == 0:
            for x in range(w):
                prev[x] = cur[x]
        for x in range(w):
            blend = (cur[x] + prev[x]) * 0.5
            if float(gray[y, x]) > blend * scale:
                out[y, x] = 1
            prev[x] = cur[x]
    return out


def _binarize_numpy(gray, window, bias):
    # One IIR pass over the serpentine-flattened image; scipy.signal.lfilter
    # evaluates the identical recurrence m[n] = decay*m[n-1] + inv*x[n].
    # The per-pixel threshold blends each row's means with the previous
    # row's, matching the loop kernel.
    from scipy.signal import lfilter

    h, w = gray.shape
    snake = gray.astype(np.float64)
    snake[1::2] = snake[1::2, ::-1].copy()
    flat = snake.reshape(-1)
    inv = 1.0 / window
    decay = 1.0 - inv
    zi = np.array([decay * flat[0]])
    means, _ = lfilter([inv], [1.0, -decay], flat, zi=zi)
    means = means.reshape(h, w)
    means[1::2] = means[1::2, ::-1].copy()
    blend = means.copy()
    blend[1:] = (means[1:] + means[:-1]) * 0.5
    white = gray.astype(np.float64) > blend * (1.0 - bias)
    return white.astype(np.uint8)


# ---------------------------------------------------------------------------
# 3x3 morphology
# ---------------------------------------------------------------------------

def _morph3_numpy(binary, op):
    padded = np.pad(binary, 1, mode="edge")
    h, w = binary.shape
    views = [padded[dy:dy + h, dx:dx + w] for dy in range(3) for dx in range(3)]
    return op.reduce(views).astype(np.uint8)


def _dilate3_loop(binary):
    h, w = binary.shape
    out = np.empty((h, w), dtype=np.uint8)
    for y in range(h):
        y0 = y - 1 if y > 0 else 0
        y1 = y + 1 if y < h - 1 else h - 1
        for x in range(w):
            x0 = x - 1 if x > 0 else 0
            x1 = x + 1 if x < w - 1 else w - 1
            v = np.uint8(0)
            for yy in range(y0, y1 + 1):
                for xx in range(x0, x1 + 1):
                    if binary[yy, xx] > v:
                        v = binary[yy, xx]
            out[y, x] = v
    return out


def _erode3_loop(binary):
    h, w = binary.shape
    out = np.empty((h, w), dtype=np.uint8)
    for y in range(h):
        y0 = y - 1 if y > 0 else 0
        y1 = y + 1 if y < h - 1 else h - 1
        for x in range(w):
            x0 = x - 1 if x > 0 else 0
            x1 = x + 1 if x < w - 1 else w - 1
            v = np.uint8(1)
            for yy in range(y0, y1 + 1):
                for xx in range(x0, x1 + 1):
                    if binary[yy, xx] < v:
                        v = binary[yy, xx]
            out[y, x] = v
    return out


# ---------------------------------------------------------------------------
# scanline candidate marks
# ---------------------------------------------------------------------------
#
# A mark is emitted for every black run whose flanking white runs look like
# the 1:2:1 bullseye slice: both whites at least ratio_lo * black, and then
# either (a) at least one white bounded within ratio_hi * black, whites
# agreeing within `balance` when both are bounded, or (b) both whites at
# least LONG_RUN * black, the slice of a core whose flanking data sectors
# are white so the ring merges into the quiet zone on both sides. The mark
# sits at the black run's center and is re-centered along the cross axis so
# marks from different rows of one core collapse onto its centroid; the
# cross-axis walk is capped so stripe-like runs (no bounded cross extent)
# keep their per-row positions.

LONG_RUN = 1.2

def _scan_marks_loop(binary, ratio_lo, ratio_hi, balance, out):
    h, w = binary.shape
    count = 0
    cap_max = out.shape[0]
    for y in range(h):
        x = 0
        prev_white = -1
        while x < w:
            v = binary[y, x]
            x0 = x
            while x < w and binary[y, x] == v:
                x += 1
            run = x - x0
            if v == 1:
                prev_white = run
                continue
            if prev_white <= 0 or x >= w or run < 2:
                continue
            nx = x
            while nx < w and binary[y, nx] == 1:
                nx += 1
            wl = float(prev_white)
            wr = float(nx - x)
            bounded_l = wl <= ratio_hi * run and x0 - prev_white > 0
            bounded_r = wr <= ratio_hi * run and nx < w
            if wl < ratio_lo * run or wr < ratio_lo * run:
                continue
            isolated = wl >= LONG_RUN * run and wr >= LONG_RUN * run
            if not (bounded_l or bounded_r or isolated):
                continue
            if bounded_l and bounded_r:
                big = wl if wl > wr else wr
                if abs(wl - wr) > balance * big:
                    continue
            xc = (x0 + x - 1) / 2.0
            cap = int(1.5 * run) + 1
            xi = int(xc + 0.5)
            up = 0
            while up < cap and y - up - 1 >= 0 and binary[y - up - 1, xi] == 0:
                up += 1
            dn = 0
            while dn < cap and y + dn + 1 < h and binary[y + dn + 1, xi] == 0:
                dn += 1
            if up < cap and dn < cap:
                yc = y + (dn - up) / 2.0
            else:
                yc = float(y)
            if count < cap_max:
                out[count, 0] = xc
                out[count, 1] = yc
                out[count, 2] = float(run)
                count += 1
    return count


def _scan_marks_numpy(binary, ratio_lo, ratio_hi, balance):
    h, w = binary.shape
    # Sentinel column of value 2 between rows so runs never span rows.
    framed = np.full((h, w + 1), 2, dtype=np.int16)
    framed[:, :w] = binary
    flat = framed.reshape(-1)
    starts = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], starts))
    lengths = np.diff(np.concatenate((starts, [flat.size])))
    values = flat[starts]

    n = starts.size
    if n < 3:
        return np.empty((0, MARK_COLS), dtype=np.float64)
    idx = np.arange(1, n - 1)
    run = lengths[idx].astype(np.float64)
    wl = lengths[idx - 1].astype(np.float64)
    wr = lengths[idx + 1].astype(np.float64)
    cols = starts[idx] % (w + 1)
    rows = starts[idx] // (w + 1)

    left_open = (cols - lengths[idx - 1]) <= 0
    right_open = (cols + lengths[idx] + lengths[idx + 1]) >= w
    bounded_l = ~left_open & (wl <= ratio_hi * run)
    bounded_r = ~right_open & (wr <= ratio_hi * run)
    isolated = (wl >= LONG_RUN * run) & (wr >= LONG_RUN * run)
    ok = (
        (values[idx] == 0)
        & (values[idx - 1] == 1)
        & (values[idx + 1] == 1)
        & (run >= 2)
        & (cols + lengths[idx] < w + 1)
        & (wl >= ratio_lo * run)
        & (wr >= ratio_lo * run)
        & (bounded_l | bounded_r | isolated)
    )
    both = bounded_l & bounded_r
    ok &= ~both | (np.abs(wl - wr) <= balance * np.maximum(wl, wr))

    sel = np.flatnonzero(ok)
    if sel.size == 0:
        return np.empty((0, MARK_COLS), dtype=np.float64)
    run = run[sel]
    xc = cols[sel] + (run - 1) / 2.0
    ys = rows[sel]

    # vectorized capped cross-axis recenter
    caps = (1.5 * run).astype(np.int64) + 1
    max_cap = int(caps.max())
    xi = (xc + 0.5).astype(np.int64)
    offs = np.arange(1, max_cap + 1)
    up_y = ys[:, None] - offs[None, :]
    dn_y = ys[:, None] + offs[None, :]
    within = offs[None, :] <= caps[:, None]
    up_black = (up_y >= 0) & (binary[np.clip(up_y, 0, h - 1), xi[:, None]] == 0) & within
    dn_black = (dn_y < h) & (binary[np.clip(dn_y, 0, h - 1), xi[:, None]] == 0) & within
    up_run = np.where(up_black.all(axis=1), max_cap, (~up_black).argmax(axis=1))
    dn_run = np.where(dn_black.all(axis=1), max_cap, (~dn_black).argmax(axis=1))
    bounded = (up_run < caps) & (dn_run < caps)
    yc = np.where(bounded, ys + (dn_run - up_run) / 2.0, ys.astype(np.float64))

    return np.column_stack((xc, yc, run))


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if USE_NUMBA:
    binarize_serpentine = njit(cache=True)(_binarize_loop)
    dilate3 = njit(cache=True)(_dilate3_loop)
    erode3 = njit(cache=True)(_erode3_loop)
    _scan_marks_jit = njit(cache=True)(_scan_marks_loop)

    def scan_marks(binary, ratio_lo, ratio_hi, balance):
        # every mark consumes >= 3 pixels of its row (black >= 2, white >= 1)
        buf = np.empty((binary.size // 3 + 16, MARK_COLS), dtype=np.float64)
        count = _scan_marks_jit(binary, ratio_lo, ratio_hi, balance, buf)
        return buf[:count].copy()

else:
    def binarize_serpentine(gray, window, bias):
        return _binarize_numpy(gray, window, bias)

    def dilate3(binary):
        return _morph3_numpy(binary, np.maximum)

    def erode3(binary):
        return _morph3_numpy(binary, np.minimum)

    def scan_marks(binary, ratio_lo, ratio_hi, balance):
        return _scan_marks_numpy(binary, ratio_lo, ratio_hi, balance)
