"""Marker ID space: 13-sector binary ring patterns with exactly 5 white sectors.

A pattern is a 13-bit word; bit k is sector k, which spans the angle
[k*2pi/13, (k+1)*2pi/13) measured counter-clockwise from the card's "up"
axis (bit 1 = white sector). Two patterns encode the same card if one is a
rotation of the other, so the ID space is the set of 13-bead binary
necklaces with 5 ones: C(13,5)/13 = 1287/13 = 99 classes. Because 13 is
prime and no valid pattern is rotation-invariant, the rotation offset of a
sampled word relative to its canonical form is unique, which is what lets
the detector recover card orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import BadOrdinal, NotAValidCode

SECTOR_COUNT = 13
SECTOR_BITS = 5
SECTOR_ANGLE = 2.0 * math.pi / SECTOR_COUNT
_MASK = (1 << SECTOR_COUNT) - 1


class Answer(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


def rotate(bits: int, r: int) -> int:
    """Rotate a 13-bit pattern by r sectors counter-clockwise.

    Bit k of the input becomes bit (k + r) mod 13 of the output, matching a
    physical card turned counter-clockwise by r sectors.
    """
    r %= SECTOR_COUNT
    bits &= _MASK
    return ((bits << r) | (bits >> (SECTOR_COUNT - r))) & _MASK


def _canonical_form(bits: int) -> int:
    return min(rotate(bits, r) for r in range(SECTOR_COUNT))


@dataclass(frozen=True, order=True)
class CodeId:
    """One of the 99 valid codes: canonical pattern plus 1-based ordinal."""

    ordinal: int
    canonical: int

    def __repr__(self) -> str:
        return f"CodeId({self.ordinal}, 0b{self.canonical:013b})"


def _build_tables() -> tuple[list[CodeId], dict[int, CodeId]]:
    canonicals = sorted(
        {
            _canonical_form(w)
            for w in range(1 << SECTOR_COUNT)
            if bin(w).count("1") == SECTOR_BITS
        }
    )
    ids = [CodeId(i + 1, c) for i, c in enumerate(canonicals)]
    by_canonical = {c.canonical: c for c in ids}
    return ids, by_canonical


_IDS, _BY_CANONICAL = _build_tables()
CODE_COUNT = len(_IDS)


def enumerate_valid_codes() -> list[CodeId]:
    """All 99 valid codes, ascending by canonical pattern value."""
    return list(_IDS)


def code_for_ordinal(ordinal: int) -> CodeId:
    if not 1 <= ordinal <= CODE_COUNT:
        raise BadOrdinal(f"ordinal must be in 1..{CODE_COUNT}, got {ordinal}")
    return _IDS[ordinal - 1]


def canonicalize(bits: int) -> tuple[CodeId, int]:
    """Resolve a sampled 13-bit word to (code, rotation offset).

    The offset r satisfies rotate(code.canonical, r) == bits and is unique.
    Raises NotAValidCode when the word does not have exactly 5 set bits (or,
    defensively, when no rotation matches a known canonical form).
    """
    bits &= _MASK
    if bin(bits).count("1") != SECTOR_BITS:
        raise NotAValidCode(f"popcount {bin(bits).count('1')} != {SECTOR_BITS}")
    for r in range(SECTOR_COUNT):
        code = _BY_CANONICAL.get(rotate(bits, SECTOR_COUNT - r))
        if code is not None:
            return code, r
    raise NotAValidCode(f"no rotation of {bits:#015b} is canonical")


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [0, 2pi)."""
    theta = math.fmod(theta, 2.0 * math.pi)
    if theta < 0.0:
        theta += 2.0 * math.pi
    if theta >= 2.0 * math.pi:  # tiny negatives round up to exactly 2pi
        theta = 0.0
    return theta


_ANSWER_ORDER = (Answer.A, Answer.B, Answer.C, Answer.D)


def orientation_to_answer(theta: float) -> Answer:
    """Map card rotation to the selected answer.

    Quadrants are half-open: A covers [-pi/4, pi/4), B [pi/4, 3pi/4),
    C [3pi/4, 5pi/4), D [5pi/4, 7pi/4), all mod 2pi. theta = 0 is the
    printed "A up" pose.
    """
    theta = normalize_angle(theta)
    quadrant = int(math.floor((theta + math.pi / 4.0) / (math.pi / 2.0))) % 4
    return _ANSWER_ORDER[quadrant]
