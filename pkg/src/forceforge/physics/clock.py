"""Integration clock shared by all simulators."""

from __future__ import annotations

from dataclasses import dataclass

from forceforge.core import VideoDims


@dataclass(frozen=True, slots=True)
class SimClock:
    """Fixed-step clock: `substeps` integrator steps per output frame.

    dt * substeps * frames equals the clip duration frames / fps.
    """

    dt: float
    substeps: int
    frames: int

    def __post_init__(self):
        if self.dt <= 0 or self.substeps < 1 or self.frames < 2:
            raise ValueError(
                f"invalid clock: dt={self.dt}, substeps={self.substeps}, frames={self.frames}"
            )

    @property
    def duration(self) -> float:
        return self.dt * self.substeps * self.frames

    @classmethod
    def for_dims(cls, dims: VideoDims, substeps: int = 8) -> "SimClock":
        """Clock whose frame boundaries line up with the video frame rate."""
        return cls(dt=1.0 / (dims.fps * substeps), substeps=substeps, frames=dims.frames)
