"""Printable student cards: the ring code plus the four answer letters.

Cards are emitted as standalone SVG documents (one per page for sheets,
with crop marks and an index CSV). The marker geometry comes from the same
constants the detector uses, so a printed card held upright reads as answer
A, and each quarter turn counter-clockwise advances the answer by one
letter. Letters sit at the four edge midpoints, each pre-rotated so it
reads upright while its answer is selected.

rasterize_card draws the identical geometry straight into a numpy image
(letters approximated by stroke segments); it is what the print/scan tests
feed back through the detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import SECTOR_ANGLE, SECTOR_COUNT, code_for_ordinal
from .errors import BadOrdinal
from .geometry import CORE_R_U, DATA_R_U, RING_R_U, UNITS_PER_DIAMETER, unit_vector

PAGE_W_MM = 210.0
PAGE_H_MM = 297.0


@dataclass(frozen=True)
class CardSpec:
    ordinal: int
    card_size_mm: float = 140.0
    code_diameter_mm: float = 120.0


def _pt(r: float, alpha: float) -> tuple[float, float]:
    dx, dy = unit_vector(alpha)
    return r * dx, r * dy


def _sector_path(r_in: float, r_out: float, a0: float, a1: float) -> str:
    x0o, y0o = _pt(r_out, a0)
    x1o, y1o = _pt(r_out, a1)
    x1i, y1i = _pt(r_in, a1)
    x0i, y0i = _pt(r_in, a0)
    # increasing card angle is visually counter-clockwise: sweep flag 0
    return (
        f"M {x0o:.3f} {y0o:.3f} "
        f"A {r_out:.3f} {r_out:.3f} 0 0 0 {x1o:.3f} {y1o:.3f} "
        f"L {x1i:.3f} {y1i:.3f} "
        f"A {r_in:.3f} {r_in:.3f} 0 0 1 {x0i:.3f} {y0i:.3f} Z"
    )


def marker_svg_elements(code_diameter: float, bits: int) -> list[str]:
    """SVG fragments for one marker centered on the origin."""
    unit = code_diameter / UNITS_PER_DIAMETER
    parts = [
        f'<circle cx="0" cy="0" r="{CORE_R_U * unit:.3f}" fill="black"/>'
    ]
    for k in range(SECTOR_COUNT):
        if not (bits >> k) & 1:  # black sector
            a0 = k * SECTOR_ANGLE
            a1 = (k + 1) * SECTOR_ANGLE
            path = _sector_path(RING_R_U * unit, DATA_R_U * unit, a0, a1)
            parts.append(f'<path d="{path}" fill="black"/>')
    return parts


def card_svg_group(spec: CardSpec) -> str:
    """One card as a <g> centered on the origin."""
    code = code_for_ordinal(spec.ordinal)
    half = spec.card_size_mm / 2.0
    letter_r = half - spec.card_size_mm * 0.06
    font = spec.card_size_mm * 0.09
    parts = [
        f'<rect x="{-half}" y="{-half}" width="{spec.card_size_mm}" '
        f'height="{spec.card_size_mm}" fill="white"/>'
    ]
    parts.extend(marker_svg_elements(spec.code_diameter_mm, code.canonical))
    # A up, then B/C/D at each quarter turn counter-clockwise; each glyph is
    # pre-rotated clockwise so it reads upright when its answer is selected
    for i, letter in enumerate("ABCD"):
        parts.append(
            f'<text x="0" y="0" text-anchor="middle" dominant-baseline="central" '
            f'font-family="Helvetica, sans-serif" font-size="{font:.2f}" '
            f'transform="rotate({90 * i}) translate(0 {-letter_r:.2f})">{letter}</text>'
        )
    parts.append(
        f'<text x="{-half + font * 0.4:.2f}" y="{-half + font * 1.1:.2f}" '
        f'font-family="Helvetica, sans-serif" font-size="{font * 0.7:.2f}">'
        f"{spec.ordinal:02d}</text>"
    )
    return "<g>" + "".join(parts) + "</g>"


def render_card(spec: CardSpec) -> str:
    """A single card as a complete SVG document (mm units)."""
    s = spec.card_size_mm
    body = card_svg_group(spec)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}mm" height="{s}mm" '
        f'viewBox="{-s / 2} {-s / 2} {s} {s}">{body}</svg>\n'
    )


def render_sheet(ordinals: list[int], per_page: int = 6,
                 card_size_mm: float = 140.0, code_diameter_mm: float = 120.0,
                 ) -> tuple[list[str], list[tuple[int, int, int]]]:
    """Grid pages of cards with crop marks.

    Returns (svg_pages, index) where index rows are (ordinal, page, slot);
    duplicates are allowed and rendered again (reprints).
    """
    if not ordinals:
        raise BadOrdinal("no ordinals given")
    for o in ordinals:
        code_for_ordinal(o)  # validates
    cols = max(1, int(math.floor(math.sqrt(per_page))))
    rows = int(math.ceil(per_page / cols))
    cell_w = PAGE_W_MM / cols
    cell_h = PAGE_H_MM / rows
    scale = min(cell_w, cell_h) / card_size_mm * 0.94
    pages: list[str] = []
    index: list[tuple[int, int, int]] = []
    page_count = math.ceil(len(ordinals) / per_page)
    for page in range(page_count):
        chunk = ordinals[page * per_page:(page + 1) * per_page]
        parts = [f'<rect x="0" y="0" width="{PAGE_W_MM}" height="{PAGE_H_MM}" fill="white"/>']
        for slot, ordinal in enumerate(chunk):
            cx = (slot % cols + 0.5) * cell_w
            cy = (slot // cols + 0.5) * cell_h
            group = card_svg_group(CardSpec(ordinal, card_size_mm, code_diameter_mm))
            parts.append(
                f'<g transform="translate({cx:.2f} {cy:.2f}) scale({scale:.4f})">'
                f"{group}</g>"
            )
            parts.append(_crop_marks(cx, cy, card_size_mm * scale))
            index.append((ordinal, page + 1, slot))
        pages.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{PAGE_W_MM}mm" '
            f'height="{PAGE_H_MM}mm" viewBox="0 0 {PAGE_W_MM} {PAGE_H_MM}">'
            + "".join(parts) + "</svg>\n"
        )
    return pages, index


def _crop_marks(cx: float, cy: float, size: float) -> str:
    half = size / 2.0
    tick = 3.0
    lines = []
    for sx in (-1, 1):
        for sy in (-1, 1):
            x = cx + sx * half
            y = cy + sy * half
            lines.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x - sx * tick:.2f}" '
                         f'y2="{y:.2f}" stroke="black" stroke-width="0.2"/>')
            lines.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x:.2f}" '
                         f'y2="{y - sy * tick:.2f}" stroke="black" stroke-width="0.2"/>')
    return "".join(lines)


# ---------------------------------------------------------------------------
# raster twin for the print/scan loop
# ---------------------------------------------------------------------------

_GLYPH_STROKES = {
    "A": [((0.0, 1.0), (0.5, 0.0)), ((0.5, 0.0), (1.0, 1.0)), ((0.22, 0.62), (0.78, 0.62))],
    "B": [((0.0, 0.0), (0.0, 1.0)), ((0.0, 0.0), (0.75, 0.1)), ((0.75, 0.1), (0.75, 0.42)),
          ((0.75, 0.42), (0.0, 0.5)), ((0.0, 0.5), (0.85, 0.6)), ((0.85, 0.6), (0.85, 0.9)),
          ((0.85, 0.9), (0.0, 1.0))],
    "C": [((1.0, 0.12), (0.5, 0.0)), ((0.5, 0.0), (0.0, 0.3)), ((0.0, 0.3), (0.0, 0.7)),
          ((0.0, 0.7), (0.5, 1.0)), ((0.5, 1.0), (1.0, 0.88))],
    "D": [((0.0, 0.0), (0.0, 1.0)), ((0.0, 0.0), (0.7, 0.15)), ((0.7, 0.15), (0.9, 0.5)),
          ((0.9, 0.5), (0.7, 0.85)), ((0.7, 0.85), (0.0, 1.0))],
}


def _draw_segment(canvas: np.ndarray, x0: float, y0: float, x1: float, y1: float,
                  width: float) -> None:
    h, w = canvas.shape
    n = max(2, int(math.hypot(x1 - x0, y1 - y0) * 2))
    ts = np.linspace(0.0, 1.0, n)
    r = max(width / 2.0, 0.5)
    for t in ts:
        x = x0 + (x1 - x0) * t
        y = y0 + (y1 - y0) * t
        xa, xb = int(math.floor(x - r)), int(math.ceil(x + r)) + 1
        ya, yb = int(math.floor(y - r)), int(math.ceil(y + r)) + 1
        canvas[max(0, ya):min(h, yb), max(0, xa):min(w, xb)] = 0


def rasterize_card(spec: CardSpec, size_px: int) -> np.ndarray:
    """The card as a grayscale image, geometry identical to the SVG."""
    from .synth import draw_marker

    code = code_for_ordinal(spec.ordinal)
    canvas = np.full((size_px, size_px), 255, dtype=np.uint8)
    px_per_mm = size_px / spec.card_size_mm
    center = (size_px - 1) / 2.0
    draw_marker(canvas, center, center, spec.code_diameter_mm * px_per_mm, 0.0,
                code.canonical)
    letter_r = (spec.card_size_mm / 2.0 - spec.card_size_mm * 0.06) * px_per_mm
    glyph = spec.card_size_mm * 0.09 * px_per_mm
    stroke = max(glyph * 0.12, 0.6)
    for i, letter in enumerate("ABCD"):
        # letter center, then strokes rotated clockwise by i quarter turns
        ang = i * math.pi / 2.0
        ux, uy = unit_vector(-ang)  # clockwise placement: A top, B right, ...
        lx = center + letter_r * ux
        ly = center + letter_r * uy
        cos_a, sin_a = math.cos(ang), math.sin(ang)
        for (p0, p1) in _GLYPH_STROKES[letter]:
            pts = []
            for (gx, gy) in (p0, p1):
                vx = (gx - 0.5) * glyph
                vy = (gy - 0.5) * glyph
                rx = vx * cos_a - vy * sin_a
                ry = vx * sin_a + vy * cos_a
                pts.append((lx + rx, ly + ry))
            _draw_segment(canvas, pts[0][0], pts[0][1], pts[1][0], pts[1][1], stroke)
    return canvas
