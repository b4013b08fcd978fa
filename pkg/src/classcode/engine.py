"""One scanning pipeline behind two fronts (offline CLI and live service).

A take is: scan_frame per frame in arrival order, accumulated into the
temporal filter, finalized into accepted detections, then merged into the
session. Both fronts call these functions so identical frame sequences and
commands produce identical session state.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import session as sess
from . import temporal
from .config import ServiceConfig
from .detector import FrameResult, scan_frame
from .temporal import AcceptedDetection, Take


@dataclass
class TakeRun:
    """An in-progress take: temporal accumulation plus frame numbering."""
    mode: str = "answers"  # "answers" | "rollcall"
    take_id: str = field(default_factory=lambda: uuid.uuid4().hex[:8])
    take: Take = field(default_factory=Take)
    frame_count: int = 0
    elapsed_s: float = 0.0
    last_result: FrameResult | None = None

    def process_frame(self, gray: np.ndarray, cfg: ServiceConfig) -> FrameResult:
        t0 = time.perf_counter()
        result = scan_frame(gray, cfg.detector, frame_index=self.frame_count)
        temporal.accumulate(self.take, result)
        self.frame_count += 1
        self.elapsed_s += time.perf_counter() - t0
        self.last_result = result
        return result

    def finish(self, cfg: ServiceConfig, single_shot: bool = False) -> list[AcceptedDetection]:
        if single_shot:
            return _accept_all(self.take)
        return temporal.finalize(self.take, cfg.temporal)


def _accept_all(take: Take) -> list[AcceptedDetection]:
    """Bypass the temporal filter: accept the last sighting of every id."""
    accepted = []
    for ordinal in sorted(take.records):
        sightings = take.records[ordinal]
        last = sightings[-1]
        accepted.append(AcceptedDetection(
            id=take.ids[ordinal],
            answer=temporal.orientation_to_answer(last.orientation),
            sightings=len(sightings),
            longest_run=len(sightings),
            last_center=last.center,
            last_seen_frame=last.frame_index,
        ))
    return accepted


def run_take(frames: Iterable[np.ndarray], session: sess.Session, question,
             cfg: ServiceConfig, mode: str = "answers", single_shot: bool = False,
             on_frame: Callable[[FrameResult], None] | None = None,
             ) -> tuple[list[AcceptedDetection], TakeRun]:
    """Scan a frame sequence and merge the outcome into the session."""
    run = TakeRun(mode=mode)
    for gray in frames:
        result = run.process_frame(gray, cfg)
        if on_frame is not None:
            on_frame(result)
    accepted = run.finish(cfg, single_shot=single_shot)
    if mode == "rollcall":
        sess.roll_call_take(session, accepted)
    else:
        sess.apply_take(session, question, accepted, take_id=run.take_id)
    return accepted, run
