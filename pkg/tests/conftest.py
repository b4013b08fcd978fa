from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from classcode import synth


def render_marker(ordinal: int, diameter: float = 64.0, theta: float = 0.0,
                  pad: int = 16) -> tuple[np.ndarray, synth.GroundTruth]:
    """One centered marker on a white canvas."""
    size = int(diameter * 2) + pad
    spec = synth.SceneSpec(
        width=size, height=size,
        placements=[synth.Placement(ordinal, size / 2, size / 2, diameter, theta)],
    )
    return synth.render_scene(spec)


class TickingClock:
    """Deterministic clock: strictly increasing 1 ms ticks."""

    def __init__(self, start: str = "2024-03-01T09:00:00+00:00"):
        self.now = datetime.fromisoformat(start).astimezone(timezone.utc)

    def __call__(self) -> datetime:
        self.now += timedelta(milliseconds=1)
        return self.now


@pytest.fixture
def clock() -> TickingClock:
    return TickingClock()


@pytest.fixture(scope="session")
def classroom_scene():
    scene = synth.make_classroom_scene(seed=11, count=40)
    image, truth = synth.render_scene(scene)
    return scene, image, truth
