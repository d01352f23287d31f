"""Shared domain types, conventions, and deterministic seeding.

Conventions used throughout the package:

* Angles are degrees in [0, 360) at the API boundary, radians internally.
  theta = 0 points toward +x (rightward on screen), theta = 90 points
  screen-up. Because image rows grow downward, the pixel-row displacement
  for a direction theta is -sin(theta).
* Image coordinates are pixel indices: pixel (row r, col c) samples the
  point (x=c, y=r). The continuous camera-projection coordinates used by
  the renderer are offset by +0.5 (see camera.py).
* Force magnitudes F are dimensionless in [0, 1] and are mapped affinely
  onto each simulator's physical scale. F = 0 means a gentle but nonzero
  force; there is no zero-force prompt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PromptError",
    "VideoDims",
    "GlobalForcePrompt",
    "LocalForcePrompt",
    "MultiForcePrompt",
    "normalize_angle",
    "screen_direction",
    "derive_seed",
    "derive_seeds",
]


class PromptError(ValueError):
    """Raised when a prompt or dims constructor receives invalid values."""


def normalize_angle(theta: float) -> float:
    """Reduce an angle in degrees to [0, 360). Applied once at construction."""
    if not math.isfinite(theta):
        raise PromptError(f"angle must be finite, got {theta!r}")
    reduced = math.fmod(theta, 360.0)
    if reduced < 0.0:
        reduced += 360.0
    # fmod can round back up to 360.0 for tiny negatives
    if reduced >= 360.0:
        reduced = 0.0
    return reduced


def screen_direction(theta_degrees: float) -> tuple[float, float]:
    """Unit screen-space displacement (dx, dy) for a direction in degrees.

    Rows grow downward, so dy = -sin(theta).
    """
    rad = math.radians(theta_degrees)
    return math.cos(rad), -math.sin(rad)


@dataclass(frozen=True, slots=True)
class VideoDims:
    """Shape of every tensor in a pipeline run: f frames of c x h x w video."""

    frames: int = 49
    channels: int = 3
    height: int = 480
    width: int = 720
    fps: float = 8.0

    def __post_init__(self):
        if self.frames < 2:
            raise PromptError(f"frames must be >= 2, got {self.frames}")
        if self.channels != 3:
            raise PromptError(f"channels must be 3 (RGB), got {self.channels}")
        if self.height <= 0 or self.width <= 0:
            raise PromptError(f"height/width must be positive, got {self.height}x{self.width}")
        if self.fps <= 0:
            raise PromptError(f"fps must be positive, got {self.fps}")

    @property
    def duration(self) -> float:
        """Clip duration in seconds."""
        return self.frames / self.fps

    def scaled(self, scale: float) -> "VideoDims":
        """Dims with height/width multiplied by `scale` (frames and fps kept)."""
        if scale <= 0:
            raise PromptError(f"scale must be positive, got {scale}")
        return VideoDims(
            frames=self.frames,
            channels=self.channels,
            height=max(1, round(self.height * scale)),
            width=max(1, round(self.width * scale)),
            fps=self.fps,
        )


def _check_magnitude(F: float) -> float:
    F = float(F)
    if not math.isfinite(F) or not 0.0 <= F <= 1.0:
        raise PromptError(f"force magnitude must be in [0, 1], got {F!r}")
    return F


@dataclass(frozen=True, slots=True)
class GlobalForcePrompt:
    """Spatially uniform force (wind): magnitude F in [0, 1], angle in degrees."""

    magnitude: float
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "magnitude", _check_magnitude(self.magnitude))
        object.__setattr__(self, "angle", normalize_angle(float(self.angle)))


@dataclass(frozen=True, slots=True)
class LocalForcePrompt:
    """Point force applied at pixel (x, y): magnitude F in [0, 1], angle in degrees.

    (x, y) are pixel indices and must lie within the frame they target:
    0 <= x <= width-1, 0 <= y <= height-1.
    """

    x: float
    y: float
    magnitude: float
    angle: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PromptError(f"pixel coordinates must be finite, got ({x!r}, {y!r})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "magnitude", _check_magnitude(self.magnitude))
        object.__setattr__(self, "angle", normalize_angle(float(self.angle)))

    def check_in_frame(self, dims: VideoDims) -> "LocalForcePrompt":
        if not (0.0 <= self.x <= dims.width - 1 and 0.0 <= self.y <= dims.height - 1):
            raise PromptError(
                f"point ({self.x}, {self.y}) outside frame "
                f"[0, {dims.width - 1}] x [0, {dims.height - 1}]"
            )
        return self


@dataclass(frozen=True)
class MultiForcePrompt:
    """Ordered collection of point forces (zero-shot multi-force prompts)."""

    forces: tuple[LocalForcePrompt, ...] = field(default_factory=tuple)

    def __post_init__(self):
        forces = tuple(self.forces)
        if len(forces) < 1:
            raise PromptError("MultiForcePrompt requires at least one force")
        for f in forces:
            if not isinstance(f, LocalForcePrompt):
                raise PromptError(f"expected LocalForcePrompt, got {type(f).__name__}")
        object.__setattr__(self, "forces", forces)


# splitmix64 constants (Steele, Lea & Flood 2014); stable across versions.
_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def derive_seed(master_seed: int, record_index: int) -> int:
    """Per-record 64-bit seed: splitmix64 of master_seed advanced by index+1.

    Pure and order-independent: record i's seed never depends on other records,
    so any execution order or parallelism yields identical records. For a fixed
    master seed the map index -> seed is injective (the pre-mix increment is an
    odd-constant multiple and the mix is a bijection on 64-bit words).
    """
    if master_seed < 0 or record_index < 0:
        raise ValueError("master_seed and record_index must be non-negative")
    z = (master_seed + (record_index + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seeds(master_seed: int, count: int) -> np.ndarray:
    """Vectorized derive_seed for indices 0..count-1 (uint64 array).

    Bit-identical to calling derive_seed in a loop; used by audits and plans.
    """
    if master_seed < 0 or count < 0:
        raise ValueError("master_seed and count must be non-negative")
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master_seed) + idx * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return z
