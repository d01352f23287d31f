"""Control-signal tensors for global and local force prompts.

A prompt is materialized as a dense f x c x h x w tensor:

* global (wind): channel 0 is -1 + 2F everywhere, channel 1 is cos(theta),
  channel 2 is sin(theta) -- constant over space and time.
* local (point force): a Gaussian blob starts at (x, y) and moves in the
  direction theta at constant velocity, covering (1/8 + 3/8 F) * width
  pixels over the clip. Values are in [0, 1] and identical across the
  three channels.

Tensors are kept at their natural value ranges; quantization to 8-bit
happens only in the PNG exporter. Channel-constant structure is stored
as read-only broadcast views to keep memory proportional to f*h*w.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from forceforge.core import (
    GlobalForcePrompt,
    LocalForcePrompt,
    MultiForcePrompt,
    PromptError,
    VideoDims,
    screen_direction,
)

__all__ = [
    "BlobParams",
    "ControlTensor",
    "encode_global",
    "encode_local",
    "encode_multi",
    "blob_displacement",
    "blob_centers",
    "write_fpct",
    "read_fpct",
    "export_png_frames",
]

FPCT_MAGIC = b"FPCT"


@dataclass(frozen=True, slots=True)
class BlobParams:
    """Geometry of the moving Gaussian blob.

    The intensity profile is exp(-d^2 / (2 sigma^2)), truncated to zero
    beyond `truncation` pixels from the center. Defaults: radius 20 px,
    sigma = radius / 2, truncation = 3 sigma.
    """

    radius: float = 20.0
    sigma: float = 10.0
    truncation: float = 30.0

    def __post_init__(self):
        if self.radius <= 0:
            raise PromptError(f"blob radius must be positive, got {self.radius}")
        if self.sigma <= 0:
            raise PromptError(f"blob sigma must be positive, got {self.sigma}")
        if self.truncation < self.radius:
            raise PromptError(
                f"truncation ({self.truncation}) must be >= radius ({self.radius})"
            )


@dataclass(frozen=True)
class ControlTensor:
    """Materialized control signal of shape (frames, channels, height, width).

    `values` may be a read-only broadcast view when channels (and, for the
    global encoding, space and time) are constant.
    """

    dims: VideoDims
    values: np.ndarray
    kind: str  # "global" | "local"

    def __post_init__(self):
        expected = (self.dims.frames, self.dims.channels, self.dims.height, self.dims.width)
        if self.values.shape != expected:
            raise PromptError(f"tensor shape {self.values.shape} != dims {expected}")

    def frame(self, i: int) -> np.ndarray:
        """Channels-first (c, h, w) view of frame i."""
        return self.values[i]


def encode_global(prompt: GlobalForcePrompt, dims: VideoDims) -> ControlTensor:
    """Constant wind-channel tensor: (-1 + 2F, cos theta, sin theta)."""
    if dims.channels != 3:
        raise PromptError(f"global encoding requires 3 channels, got {dims.channels}")
    rad = math.radians(prompt.angle)
    chans = np.array([-1.0 + 2.0 * prompt.magnitude, math.cos(rad), math.sin(rad)])
    values = np.broadcast_to(
        chans.reshape(1, 3, 1, 1), (dims.frames, 3, dims.height, dims.width)
    )
    return ControlTensor(dims=dims, values=values, kind="global")


def blob_displacement(F: float, dims: VideoDims) -> float:
    """Total blob travel in pixels: (1/8 + 3/8 F) * width.

    Strictly increasing in F and nonzero at F = 0 (a gentle poke still
    displaces the blob by width/8).
    """
    if not 0.0 <= F <= 1.0:
        raise PromptError(f"force magnitude must be in [0, 1], got {F!r}")
    return (0.125 + 0.375 * F) * dims.width


def blob_centers(prompt: LocalForcePrompt, dims: VideoDims) -> np.ndarray:
    """Per-frame blob centers, shape (frames, 2) as (x, y) pixel indices.

    Frame i center is (x, y) + (i / (f-1)) * D * (cos theta, -sin theta)
    with D = blob_displacement(F). Centers may leave the frame.
    """
    D = blob_displacement(prompt.magnitude, dims)
    dx, dy = screen_direction(prompt.angle)
    t = np.arange(dims.frames, dtype=np.float64) / (dims.frames - 1)
    centers = np.empty((dims.frames, 2), dtype=np.float64)
    centers[:, 0] = prompt.x + t * D * dx
    centers[:, 1] = prompt.y + t * D * dy
    return centers


def _splat_blob(frame: np.ndarray, cx: float, cy: float, blob: BlobParams) -> None:
    """Max-combine one Gaussian blob into a (h, w) frame. Off-frame parts are skipped."""
    h, w = frame.shape
    r = blob.truncation
    x0 = max(0, int(math.floor(cx - r)))
    x1 = min(w - 1, int(math.ceil(cx + r)))
    y0 = max(0, int(math.floor(cy - r)))
    y1 = min(h - 1, int(math.ceil(cy + r)))
    if x0 > x1 or y0 > y1:
        return
    xs = np.arange(x0, x1 + 1, dtype=np.float64) - cx
    ys = np.arange(y0, y1 + 1, dtype=np.float64) - cy
    d2 = ys[:, None] ** 2 + xs[None, :] ** 2
    patch = np.exp(-d2 / (2.0 * blob.sigma**2))
    patch[d2 > r * r] = 0.0
    region = frame[y0 : y1 + 1, x0 : x1 + 1]
    np.maximum(region, patch.astype(np.float32), out=region)


def encode_local(
    prompt: LocalForcePrompt, dims: VideoDims, blob: BlobParams = BlobParams()
) -> ControlTensor:
    """Moving-blob tensor for a single point force."""
    prompt.check_in_frame(dims)
    gray = np.zeros((dims.frames, dims.height, dims.width), dtype=np.float32)
    centers = blob_centers(prompt, dims)
    for i in range(dims.frames):
        _splat_blob(gray[i], centers[i, 0], centers[i, 1], blob)
    values = np.broadcast_to(
        gray[:, None, :, :], (dims.frames, dims.channels, dims.height, dims.width)
    )
    return ControlTensor(dims=dims, values=values, kind="local")


def encode_multi(
    prompt: MultiForcePrompt, dims: VideoDims, blob: BlobParams = BlobParams()
) -> ControlTensor:
    """Pointwise maximum of the individual blob fields (stays in [0, 1]).

    With a single force this is bit-identical to encode_local.
    """
    if len(prompt.forces) == 0:
        raise PromptError("encode_multi requires at least one force")
    gray = np.zeros((dims.frames, dims.height, dims.width), dtype=np.float32)
    for force in prompt.forces:
        force.check_in_frame(dims)
        centers = blob_centers(force, dims)
        for i in range(dims.frames):
            _splat_blob(gray[i], centers[i, 0], centers[i, 1], blob)
    values = np.broadcast_to(
        gray[:, None, :, :], (dims.frames, dims.channels, dims.height, dims.width)
    )
    return ControlTensor(dims=dims, values=values, kind="local")


def write_fpct(tensor: ControlTensor, path: str | Path) -> None:
    """Raw interchange file: magic "FPCT", uint32 f/c/h/w, float32 LE data."""
    path = Path(path)
    f, c, h, w = tensor.values.shape
    with open(path, "wb") as fh:
        fh.write(FPCT_MAGIC)
        fh.write(struct.pack("<4I", f, c, h, w))
        fh.write(np.ascontiguousarray(tensor.values, dtype="<f4").tobytes())


def read_fpct(path: str | Path) -> ControlTensor:
    """Load an FPCT file written by write_fpct. fps is not stored; default applies."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FPCT_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {FPCT_MAGIC!r}")
        f, c, h, w = struct.unpack("<4I", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f4")
    if data.size != f * c * h * w:
        raise ValueError(f"{path}: payload has {data.size} floats, header says {f*c*h*w}")
    dims = VideoDims(frames=f, channels=c, height=h, width=w)
    return ControlTensor(dims=dims, values=data.reshape(f, c, h, w), kind="raw")


def export_png_frames(tensor: ControlTensor, out_dir: str | Path) -> list[Path]:
    """Write one 8-bit PNG per frame as frame_%04d.png.

    Local tensors are written as grayscale replicated to RGB; global tensors
    are mapped affinely from [-1, 1] to [0, 255].
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(tensor.dims.frames):
        chw = np.asarray(tensor.frame(i), dtype=np.float64)
        if tensor.kind == "global":
            img = (chw + 1.0) / 2.0 * 255.0
        else:
            img = chw * 255.0
        img8 = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        p = out_dir / f"frame_{i:04d}.png"
        Image.fromarray(np.moveaxis(img8, 0, -1)).save(p, compress_level=1)
        paths.append(p)
    return paths
