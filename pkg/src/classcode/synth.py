"""Ground-truth scene generator for detector and temporal-filter tests.

Scenes are described by a SceneSpec (JSON-serializable, human editable) and
render deterministically for a given seed. Markers are drawn analytically
with 2x2 supersampling; occluders are flat white rectangles; the stripe
background reproduces the vertical-blinds failure mode the dual-axis
candidate search exists to reject.

Scene file schema (JSON):

    {
      "width": 1920, "height": 1080, "seed": 7,
      "background": {"kind": "plain"},            # or
                    {"kind": "vertical_stripes", "period": 16},
                    {"kind": "photo_noise", "sigma": 12.0},
      "illumination": {"lo": 0.55, "hi": 1.0},    # optional, left-to-right
      "placements": [
        {"ordinal": 5, "x": 200.0, "y": 150.0, "diameter": 64.0,
         "theta": 1.5708, "occlusion": 0.0, "occlusion_from": "left"}
      ]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .codec import (
    SECTOR_ANGLE,
    SECTOR_COUNT,
    Answer,
    code_for_ordinal,
    orientation_to_answer,
)
from .detector import Detection, FrameResult
from .errors import PlacementOutOfBounds
from .geometry import (
    CORE_R_U,
    DATA_R_U,
    QUIET_R_U,
    RING_R_U,
    UNITS_PER_DIAMETER,
)

# Stripe duty cycle: black 11/16 of a period. A horizontal slice through a
# stripe then shows white:black near 1:2, exactly the run pattern the
# candidate search accepts, which is what makes this background hostile.
STRIPE_BLACK_FRACTION = 11.0 / 16.0


@dataclass
class Placement:
    ordinal: int
    x: float
    y: float
    diameter: float
    theta: float = 0.0
    occlusion: float = 0.0
    occlusion_from: str = "left"


@dataclass
class Background:
    kind: str = "plain"
    period: int = 16
    sigma: float = 8.0
    level: int = 255


@dataclass
class SceneSpec:
    width: int
    height: int
    placements: list[Placement] = field(default_factory=list)
    background: Background = field(default_factory=Background)
    illumination: tuple[float, float] | None = None
    seed: int = 0


@dataclass(frozen=True)
class TruthEntry:
    ordinal: int
    x: float
    y: float
    theta: float
    answer: Answer
    required: bool


@dataclass
class GroundTruth:
    entries: list[TruthEntry]

    def required_answers(self) -> dict[int, Answer]:
        return {e.ordinal: e.answer for e in self.entries if e.required}


def draw_marker(canvas: np.ndarray, x: float, y: float, diameter: float,
                theta: float, bits: int) -> None:
    """Draw one marker in place, 2x2 supersampled against the canvas."""
    h, w = canvas.shape
    unit = diameter / UNITS_PER_DIAMETER
    r_out = QUIET_R_U * unit
    x0 = max(0, int(math.floor(x - r_out - 1)))
    x1 = min(w, int(math.ceil(x + r_out + 2)))
    y0 = max(0, int(math.floor(y - r_out - 1)))
    y1 = min(h, int(math.ceil(y + r_out + 2)))
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    bg = canvas[y0:y1, x0:x1].astype(np.float64)
    acc = np.zeros_like(bg)
    sector_bits = (bits >> np.arange(SECTOR_COUNT)) & 1
    for oy in (-0.25, 0.25):
        for ox in (-0.25, 0.25):
            dx = xs + ox - x
            dy = ys + oy - y
            ru = np.hypot(dx, dy) / unit
            alpha = np.arctan2(-dx, -dy) % (2.0 * math.pi)
            beta = (alpha - theta) % (2.0 * math.pi)
            sector = np.clip((beta / SECTOR_ANGLE).astype(np.int64), 0, SECTOR_COUNT - 1)
            data = sector_bits[sector] * 255.0
            shade = np.where(
                ru < CORE_R_U, 0.0,
                np.where(ru < RING_R_U, 255.0,
                         np.where(ru < DATA_R_U, data,
                                  np.where(ru < QUIET_R_U, 255.0, bg))))
            acc += shade
    canvas[y0:y1, x0:x1] = np.floor(acc / 4.0 + 0.5).astype(np.uint8)


def _render_background(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    bg = spec.background
    canvas = np.full((spec.height, spec.width), bg.level, dtype=np.uint8)
    if bg.kind == "plain":
        return canvas
    if bg.kind == "vertical_stripes":
        period = max(2, int(bg.period))
        black_w = max(1, int(round(period * STRIPE_BLACK_FRACTION)))
        cols = np.arange(spec.width) % period
        canvas[:, :] = np.where(cols < black_w, 0, bg.level)[None, :]
        return canvas
    if bg.kind == "photo_noise":
        noise = rng.normal(0.0, bg.sigma, size=canvas.shape)
        return np.clip(canvas.astype(np.float64) + noise, 0, 255).astype(np.uint8)
    raise ValueError(f"unknown background kind {bg.kind!r}")


def render_scene(spec: SceneSpec) -> tuple[np.ndarray, GroundTruth]:
    """Render a scene to a grayscale image plus its exact ground truth."""
    rng = np.random.default_rng(spec.seed)
    canvas = _render_background(spec, rng)
    entries = []
    for p in spec.placements:
        unit = p.diameter / UNITS_PER_DIAMETER
        r_out = QUIET_R_U * unit
        if p.diameter < 8 or p.x - r_out < 0 or p.x + r_out > spec.width \
                or p.y - r_out < 0 or p.y + r_out > spec.height:
            raise PlacementOutOfBounds(
                f"ordinal {p.ordinal} at ({p.x}, {p.y}) d={p.diameter}")
        code = code_for_ordinal(p.ordinal)
        draw_marker(canvas, p.x, p.y, p.diameter, p.theta, code.canonical)
        if p.occlusion > 0.0:
            _occlude(canvas, p)
        entries.append(TruthEntry(
            ordinal=p.ordinal, x=p.x, y=p.y, theta=p.theta,
            answer=orientation_to_answer(p.theta),
            required=p.occlusion <= 0.0,
        ))
    if spec.illumination is not None:
        lo, hi = spec.illumination
        ramp = np.linspace(lo, hi, spec.width)
        canvas = np.floor(canvas.astype(np.float64) * ramp[None, :] + 0.5)
        canvas = np.clip(canvas, 0, 255).astype(np.uint8)
    return canvas, GroundTruth(entries)


def _occlude(canvas: np.ndarray, p: Placement) -> None:
    h, w = canvas.shape
    r = QUIET_R_U * p.diameter / UNITS_PER_DIAMETER
    x0, x1 = int(p.x - r), int(math.ceil(p.x + r))
    y0, y1 = int(p.y - r), int(math.ceil(p.y + r))
    span = int(round(2 * r * p.occlusion))
    if p.occlusion_from == "left":
        x1 = x0 + span
    elif p.occlusion_from == "right":
        x0 = x1 - span
    elif p.occlusion_from == "top":
        y1 = y0 + span
    elif p.occlusion_from == "bottom":
        y0 = y1 - span
    else:
        raise ValueError(f"bad occlusion direction {p.occlusion_from!r}")
    canvas[max(0, y0):min(h, y1), max(0, x0):min(w, x1)] = 255


def hairline_defect(image: np.ndarray, p: Placement, axis: str,
                    polarity: str, offset: float = 0.0) -> np.ndarray:
    """One-pixel row/column across the code forced to white or black.

    The line runs through the placement center (plus offset along the
    perpendicular axis) and spans the code's bounding box only.
    """
    h, w = image.shape
    value = 255 if polarity == "white" else 0
    r = QUIET_R_U * p.diameter / UNITS_PER_DIAMETER
    out = image.copy()
    if axis == "vertical":
        col = int(round(p.x + offset))
        if not 0 <= col < w:
            raise PlacementOutOfBounds(f"column {col} outside image")
        out[max(0, int(p.y - r)):min(h, int(math.ceil(p.y + r))), col] = value
    elif axis == "horizontal":
        row = int(round(p.y + offset))
        if not 0 <= row < h:
            raise PlacementOutOfBounds(f"row {row} outside image")
        out[row, max(0, int(p.x - r)):min(w, int(math.ceil(p.x + r)))] = value
    else:
        raise ValueError(f"axis must be horizontal or vertical, got {axis!r}")
    return out


# ---------------------------------------------------------------------------
# occlusion-flicker model (statistics level, not imagery)
# ---------------------------------------------------------------------------

def flicker_sequence(persistent: list[int], spurious: dict[int, float],
                     frames: int, run_cap: int = 2, seed: int = 0,
                     dropout: dict[int, tuple[int, ...]] | None = None,
                     ) -> list[FrameResult]:
    """Per-frame detection lists with spurious ids at given frequencies.

    Spurious ids appear round(freq * frames) times, split into runs of at
    most run_cap consecutive frames separated by at least one clear frame.
    Persistent ids appear in every frame except their dropout list.
    """
    dropout = dropout or {}
    rng = np.random.default_rng(seed)
    per_frame: list[list[int]] = [[] for _ in range(frames)]
    for ordinal in persistent:
        skip = set(dropout.get(ordinal, ()))
        for i in range(frames):
            if i not in skip:
                per_frame[i].append(ordinal)

    for ordinal, freq in sorted(spurious.items()):
        n = int(round(freq * frames))
        if n <= 0:
            continue
        runs = [run_cap] * (n // run_cap)
        if n % run_cap:
            runs.append(n % run_cap)
        slack = frames - n - (len(runs) - 1)
        if slack < 0:
            raise ValueError(f"cannot scatter {n} sightings in {frames} frames")
        gaps = rng.multinomial(slack, [1.0 / (len(runs) + 1)] * (len(runs) + 1))
        pos = int(gaps[0])
        for i, length in enumerate(runs):
            for k in range(length):
                per_frame[pos + k].append(ordinal)
            pos += length + 1 + int(gaps[i + 1])

    results = []
    for i, ordinals in enumerate(per_frame):
        detections = [
            Detection(code_for_ordinal(o), (64.0 + 8.0 * o, 64.0), 64.0, 0.0, i)
            for o in sorted(ordinals)
        ]
        results.append(FrameResult(i, detections, len(detections), {}))
    return results


# ---------------------------------------------------------------------------
# scene helpers and persistence
# ---------------------------------------------------------------------------

def make_classroom_scene(seed: int, count: int = 40, width: int = 1920,
                         height: int = 1080, min_diameter: float = 40.0,
                         max_diameter: float = 88.0,
                         illumination: tuple[float, float] | None = (0.55, 1.0),
                         edge_margin: float = 120.0,
                         ) -> SceneSpec:
    """A full classroom: `count` unoccluded cards on a grid with jitter.

    Cards keep `edge_margin` px clear of the left/right frame borders: at
    the serpentine turnarounds the adaptive threshold's history is one-sided
    and a steep gradient can push it past the local white level, the same
    reason the real workflow asks for cards framed inside the shot.
    """
    rng = np.random.default_rng(seed)
    cols = 8
    rows = int(math.ceil(count / cols))
    cell_w = width / cols
    cell_h = height / rows
    ordinals = rng.permutation(np.arange(1, 100))[:count]
    placements = []
    for i, ordinal in enumerate(sorted(ordinals.tolist())):
        cx = (i % cols + 0.5) * cell_w
        cy = (i // cols + 0.5) * cell_h
        d = float(rng.uniform(min_diameter, max_diameter))
        jitter = min(cell_w, cell_h) / 2.0 - d / 2.0 - 4.0
        jitter = max(jitter, 0.0)
        # students aim for one of the four answer poses, imprecisely
        theta = rng.integers(0, 4) * math.pi / 2.0 + rng.uniform(-0.4, 0.4)
        x = cx + float(rng.uniform(-jitter, jitter))
        x = min(max(x, edge_margin + d / 2.0), width - edge_margin - d / 2.0)
        placements.append(Placement(
            ordinal=int(ordinal),
            x=x,
            y=cy + float(rng.uniform(-jitter, jitter)),
            diameter=d,
            theta=float(theta % (2.0 * math.pi)),
        ))
    return SceneSpec(width=width, height=height, placements=placements,
                     illumination=illumination, seed=seed)


def save_png(image: np.ndarray, path) -> None:
    from PIL import Image

    Image.fromarray(image, mode="L").save(path)


def load_png(path) -> np.ndarray:
    from PIL import Image

    return np.asarray(Image.open(path).convert("L"), dtype=np.uint8)


def save_scene(spec: SceneSpec, path) -> None:
    doc = {
        "width": spec.width,
        "height": spec.height,
        "seed": spec.seed,
        "background": asdict(spec.background),
        "illumination": (None if spec.illumination is None
                         else {"lo": spec.illumination[0], "hi": spec.illumination[1]}),
        "placements": [asdict(p) for p in spec.placements],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)


def load_scene(path) -> SceneSpec:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    illum = doc.get("illumination")
    return SceneSpec(
        width=int(doc["width"]),
        height=int(doc["height"]),
        seed=int(doc.get("seed", 0)),
        background=Background(**doc.get("background", {})),
        illumination=None if illum is None else (float(illum["lo"]), float(illum["hi"])),
        placements=[Placement(**p) for p in doc.get("placements", [])],
    )
