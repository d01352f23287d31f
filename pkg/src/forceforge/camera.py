"""Pinhole camera: world-to-screen projection of points and forces.

Image coordinates returned by project_point are continuous with origin at
the top-left corner, so the look-at target lands exactly on (w/2, h/2).
Pixel (row r, col c) covers [c, c+1) x [r, r+1) and samples its center
(c + 0.5, r + 0.5); pixel-index coordinates (used by force prompts and the
blob encoder) are therefore continuous coordinates minus 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from forceforge.core import LocalForcePrompt, VideoDims, normalize_angle

__all__ = [
    "CameraError",
    "CameraModel",
    "project_point",
    "project_force",
    "unproject_to_ground",
    "pixel_rays",
]

_EPS_BEHIND = 1e-9
_FORCE_EPSILON = 1e-4  # meters; world nudge used to project a direction


class CameraError(ValueError):
    """Invalid camera, point behind the camera, or degenerate projection."""


@dataclass(frozen=True, slots=True)
class CameraModel:
    """Pinhole camera defined by position, look-at target, up hint, and fov."""

    position: tuple[float, float, float]
    look_at: tuple[float, float, float]
    up: tuple[float, float, float] = (0.0, 0.0, 1.0)
    fov_degrees: float = 55.0

    def __post_init__(self):
        if not 10.0 < self.fov_degrees < 120.0:
            raise CameraError(f"fov must be in (10, 120) degrees, got {self.fov_degrees}")
        fwd = np.subtract(self.look_at, self.position, dtype=np.float64)
        if np.linalg.norm(fwd) < 1e-12:
            raise CameraError("camera position and look-at coincide")
        if np.linalg.norm(np.cross(fwd, self.up)) < 1e-9:
            raise CameraError("view direction and up vector are parallel")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, up, forward) orthonormal camera axes."""
        forward = np.subtract(self.look_at, self.position, dtype=np.float64)
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(self.up, dtype=np.float64))
        right /= np.linalg.norm(right)
        up = np.cross(right, forward)
        return right, up, forward

    def focal_pixels(self, dims: VideoDims) -> float:
        """Focal length in pixels for the vertical field of view."""
        return (dims.height / 2.0) / math.tan(math.radians(self.fov_degrees) / 2.0)


def project_point(
    camera: CameraModel, world: tuple[float, float, float] | np.ndarray, dims: VideoDims
) -> tuple[float, float]:
    """Continuous image coordinates (x, y) of a world point.

    Raises CameraError for points at or behind the camera plane.
    """
    right, up, forward = camera.basis()
    d = np.asarray(world, dtype=np.float64) - np.asarray(camera.position, dtype=np.float64)
    z = float(d @ forward)
    if z <= _EPS_BEHIND:
        raise CameraError(f"point {tuple(np.asarray(world))} is behind the camera (z={z:.3g})")
    f = camera.focal_pixels(dims)
    x = dims.width / 2.0 + f * float(d @ right) / z
    y = dims.height / 2.0 - f * float(d @ up) / z
    return x, y


def project_force(
    camera: CameraModel,
    application_point: tuple[float, float, float] | np.ndarray,
    direction: tuple[float, float, float] | np.ndarray,
    magnitude: float,
    dims: VideoDims,
) -> LocalForcePrompt:
    """Screen-space force prompt for a 3D force at a visible world point.

    The screen angle is the direction of the projected displacement of an
    epsilon nudge along the (normalized) force direction; the magnitude
    passes through unchanged.
    """
    direction = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(direction)
    if norm < 1e-12:
        raise CameraError("force direction has zero length")
    direction = direction / norm

    p0 = np.asarray(application_point, dtype=np.float64)
    x0, y0 = project_point(camera, p0, dims)
    x1, y1 = project_point(camera, p0 + _FORCE_EPSILON * direction, dims)
    dx, dy = x1 - x0, y1 - y0
    if math.hypot(dx, dy) < 1e-9:
        raise CameraError("force direction is parallel to the view ray (degenerate projection)")
    theta = normalize_angle(math.degrees(math.atan2(-dy, dx)))

    # prompts live in pixel-index coordinates
    xi, yi = x0 - 0.5, y0 - 0.5
    if not (0.0 <= xi <= dims.width - 1 and 0.0 <= yi <= dims.height - 1):
        raise CameraError(f"application point projects outside the frame at ({xi:.1f}, {yi:.1f})")
    return LocalForcePrompt(x=xi, y=yi, magnitude=magnitude, angle=theta)


def unproject_to_ground(
    camera: CameraModel, x: float, y: float, dims: VideoDims
) -> tuple[float, float, float]:
    """World point on the ground plane z = 0 seen at continuous image (x, y)."""
    right, up, forward = camera.basis()
    f = camera.focal_pixels(dims)
    px = (x - dims.width / 2.0) / f
    py = (dims.height / 2.0 - y) / f
    d = forward + px * right + py * up
    oz = camera.position[2]
    if abs(d[2]) < 1e-12:
        raise CameraError("view ray is parallel to the ground plane")
    t = -oz / d[2]
    if t <= 0:
        raise CameraError("ground plane is behind the camera for this pixel")
    p = np.asarray(camera.position, dtype=np.float64) + t * d
    return float(p[0]), float(p[1]), 0.0


def pixel_rays(camera: CameraModel, dims: VideoDims) -> tuple[np.ndarray, np.ndarray]:
    """(origin (3,), directions (H, W, 3) unit) rays through all pixel centers."""
    right, up, forward = camera.basis()
    f = camera.focal_pixels(dims)
    cols = (np.arange(dims.width) + 0.5 - dims.width / 2.0) / f
    rows = (dims.height / 2.0 - (np.arange(dims.height) + 0.5)) / f
    dirs = (
        forward[None, None, :]
        + cols[None, :, None] * right[None, None, :]
        + rows[:, None, None] * up[None, None, :]
    )
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    return np.asarray(camera.position, dtype=np.float64), dirs
