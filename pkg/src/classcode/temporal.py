"""Time-consistency validation of detections across one take.

A take accumulates every processed frame of one continuous scan. Partially
occluded cards flicker in and out as spurious ids for a frame or two, so an
id is only accepted when it was detected across enough contiguous frames;
the required run length scales with the take's duration, clamped so short
takes stay usable and long takes stay responsive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .codec import Answer, CodeId, orientation_to_answer
from .config import TemporalConfig
from .detector import FrameResult
from .errors import OutOfOrderFrame


@dataclass
class Sighting:
    ordinal_in_take: int            # 1-based index of the accumulated frame
    frame_index: int
    orientation: float
    center: tuple[float, float]
    diameter: float


@dataclass
class Take:
    frames_seen: int = 0
    last_frame_index: int | None = None
    records: dict[int, list[Sighting]] = field(default_factory=dict)
    ids: dict[int, CodeId] = field(default_factory=dict)


@dataclass(frozen=True)
class AcceptedDetection:
    id: CodeId
    answer: Answer
    sightings: int
    longest_run: int
    last_center: tuple[float, float]
    last_seen_frame: int


def accumulate(take: Take, result: FrameResult) -> Take:
    """Record one frame's detections into the take, in frame order."""
    if take.last_frame_index is not None and result.frame_index <= take.last_frame_index:
        raise OutOfOrderFrame(
            f"frame {result.frame_index} after {take.last_frame_index}")
    take.frames_seen += 1
    take.last_frame_index = result.frame_index
    for det in result.detections:
        take.ids[det.id.ordinal] = det.id
        take.records.setdefault(det.id.ordinal, []).append(Sighting(
            ordinal_in_take=take.frames_seen,
            frame_index=result.frame_index,
            orientation=det.orientation,
            center=det.center,
            diameter=det.diameter,
        ))
    return take


def required_run(frames_seen: int, cfg: TemporalConfig | None = None) -> int:
    """Contiguous frames required for acceptance: clamp(ceil(f*N), min, cap).

    The product is rounded to 9 decimals first so binary float artifacts
    (0.08 * 125 = 10.000000000000002) cannot bump the ceiling.
    """
    cfg = cfg or TemporalConfig()
    need = math.ceil(round(cfg.run_fraction * frames_seen, 9))
    return max(cfg.run_min, min(cfg.run_cap, need))


def _longest_run(sightings: list[Sighting]) -> tuple[int, int]:
    """(length, end index into sightings) of the latest longest run."""
    best_len = 0
    best_end = 0
    cur_start = 0
    for i in range(1, len(sightings) + 1):
        contiguous = (
            i < len(sightings)
            and sightings[i].ordinal_in_take == sightings[i - 1].ordinal_in_take + 1
        )
        if not contiguous:
            length = i - cur_start
            if length >= best_len:
                best_len = length
                best_end = i - 1
            cur_start = i
    return best_len, best_end


def finalize(take: Take, cfg: TemporalConfig | None = None) -> list[AcceptedDetection]:
    """Accepted ids: longest contiguous run meets the dynamic threshold.

    The answer is the modal quadrant within the longest run (ties go to the
    most recently seen answer); the reported position is the run's last
    sighting, the freshest one for an overlay.
    """
    cfg = cfg or TemporalConfig()
    need = required_run(take.frames_seen, cfg)
    accepted = []
    for ordinal in sorted(take.records):
        sightings = take.records[ordinal]
        run_len, run_end = _longest_run(sightings)
        if run_len < need:
            continue
        run = sightings[run_end - run_len + 1:run_end + 1]
        counts: dict[Answer, int] = {}
        last_at: dict[Answer, int] = {}
        for s in run:
            a = orientation_to_answer(s.orientation)
            counts[a] = counts.get(a, 0) + 1
            last_at[a] = s.frame_index
        answer = max(counts, key=lambda a: (counts[a], last_at[a]))
        last = run[-1]
        accepted.append(AcceptedDetection(
            id=take.ids[ordinal],
            answer=answer,
            sightings=len(sightings),
            longest_run=run_len,
            last_center=last.center,
            last_seen_frame=last.frame_index,
        ))
    return accepted
