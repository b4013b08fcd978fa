"""Marker geometry shared by the renderer, the card generator, and the detector.

The marker is a set of concentric rings measured in units of u = diameter/8:

    [0, 1)u  black core disk
    [1, 2)u  white ring
    [2, 3)u  data ring, 13 sectors (bit 1 = white)
    [3, 4)u  white quiet zone

Angles are measured counter-clockwise from the card's "up" axis. In image
coordinates (x right, y down) the unit vector at angle a is
(-sin a, -cos a): a = 0 points up, a = pi/2 points left. A card drawn with
orientation theta has its sector k covering image angles
[k*SECTOR_ANGLE + theta, (k+1)*SECTOR_ANGLE + theta).
"""

from __future__ import annotations

import math

from .codec import SECTOR_ANGLE, SECTOR_COUNT

CORE_R_U = 1.0
RING_R_U = 2.0
DATA_R_U = 3.0
QUIET_R_U = 4.0
UNITS_PER_DIAMETER = 8.0
SAMPLE_R_U = 2.5  # data ring sampled at its radial midpoint


def unit_vector(alpha: float) -> tuple[float, float]:
    """Image-space unit vector at angle alpha (CCW from up, y-down coords)."""
    return (-math.sin(alpha), -math.cos(alpha))


def offset_angle(dx: float, dy: float) -> float:
    """Angle (CCW from up, in [0, 2pi)) of an image-space offset from center."""
    a = math.atan2(-dx, -dy)
    return a + 2.0 * math.pi if a < 0.0 else a


def sector_at(alpha: float, theta: float) -> int:
    """Index of the data sector covering image angle alpha for a card at theta."""
    beta = (alpha - theta) % (2.0 * math.pi)
    s = int(beta / SECTOR_ANGLE)
    return s if s < SECTOR_COUNT else SECTOR_COUNT - 1


def marker_shade(dx: float, dy: float, unit: float, theta: float, bits: int) -> int:
    """Shade of the marker at an offset from its center.

    Returns 0 (black), 1 (white) or -1 (outside the quiet zone).
    """
    r = math.hypot(dx, dy) / unit
    if r >= QUIET_R_U:
        return -1
    if r < CORE_R_U:
        return 0
    if r < RING_R_U or r >= DATA_R_U:
        return 1
    s = sector_at(offset_angle(dx, dy), theta)
    return (bits >> s) & 1
