"""Deterministic software renderer.

Hybrid rasterizer: spheres are ray-cast analytically with Lambert shading,
cloth meshes are z-buffered flat-shaded triangles, chain segments and
flagpoles are screen-space capsules. The ground plane and backdrop are
procedural and static per clip, so they are rendered once into a base
layer that every frame copy-starts from; hard blob shadows are painted on
the ground before any geometry.

Identical inputs produce bit-identical pixels: no GPU, no threads inside a
frame, and all randomness upstream of this module.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from forceforge.camera import CameraModel, pixel_rays, project_point
from forceforge.core import VideoDims
from forceforge.textures import backdrop_color, ground_color

__all__ = [
    "RenderError",
    "SphereInstance",
    "MeshInstance",
    "CapsuleInstance",
    "FrameState",
    "SceneGeometry",
    "CameraCache",
    "make_camera_cache",
    "render_frame",
    "render_clip",
    "to_uint8",
    "save_frame_png",
]

LIGHT_DIR = np.array([0.35, 0.2, 0.91])
LIGHT_DIR = LIGHT_DIR / np.linalg.norm(LIGHT_DIR)

# flat-ish shading keeps every ball pixel within the tracker's color tolerance
SPHERE_AMBIENT, SPHERE_DIFFUSE = 0.7, 0.3
MESH_AMBIENT, MESH_DIFFUSE = 0.45, 0.55
SHADOW_DEPTH = 0.45
SPOT_DARKEN = 0.9


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class SphereInstance:
    center: tuple[float, float, float]
    radius: float
    color: tuple[float, float, float]
    pattern: str = "plain"  # "plain" | "spots"
    roll_phase: float = 0.0
    roll_axis: tuple[float, float, float] = (0.0, 1.0, 0.0)


@dataclass(frozen=True)
class MeshInstance:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (T, 3) int
    color: tuple[float, float, float]


@dataclass(frozen=True)
class CapsuleInstance:
    a: tuple[float, float, float]
    b: tuple[float, float, float]
    radius: float
    color: tuple[float, float, float]


@dataclass(frozen=True)
class FrameState:
    """Everything that can move between frames."""

    spheres: tuple[SphereInstance, ...] = ()
    meshes: tuple[MeshInstance, ...] = ()
    capsules: tuple[CapsuleInstance, ...] = ()


@dataclass(frozen=True)
class SceneGeometry:
    """Static scene description: ground recipe, backdrop theme, extent."""

    ground_texture_id: int = 0
    backdrop_id: int = 0
    ground_extent: float = 30.0
    shadows: bool = True


@dataclass
class CameraCache:
    """Per-clip precomputation: rays, ground hit, base layer."""

    origin: np.ndarray
    dirs: np.ndarray  # (H, W, 3)
    ground_t: np.ndarray  # (H, W) inf where sky
    ground_xy: np.ndarray  # (H, W, 2) world coords of ground hits
    base_img: np.ndarray  # (H, W, 3) float32
    focal: float
    dims: VideoDims
    camera: CameraModel


def make_camera_cache(scene: SceneGeometry, camera: CameraModel, dims: VideoDims) -> CameraCache:
    origin, dirs = pixel_rays(camera, dims)
    dz = dirs[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dz < -1e-9, -origin[2] / dz, np.inf)
    hits = np.isfinite(t)
    wx = origin[0] + t * dirs[..., 0]
    wy = origin[1] + t * dirs[..., 1]

    img = backdrop_color(scene.backdrop_id, dirs).astype(np.float32)
    if hits.any():
        gx, gy = wx[hits], wy[hits]
        gcol = ground_color(scene.ground_texture_id, gx, gy)
        dist = np.hypot(gx, gy)
        fade = np.clip((dist - scene.ground_extent) / (0.5 * scene.ground_extent), 0.0, 1.0)
        base_tone = gcol.mean(axis=0)
        gcol = gcol * (1 - fade[:, None]) + base_tone[None, :] * fade[:, None]
        img[hits] = gcol.astype(np.float32)

    ground_xy = np.stack([np.where(hits, wx, 0.0), np.where(hits, wy, 0.0)], axis=-1)
    focal = camera.focal_pixels(dims)
    return CameraCache(
        origin=origin,
        dirs=dirs,
        ground_t=t,
        ground_xy=ground_xy,
        base_img=img,
        focal=focal,
        dims=dims,
        camera=camera,
    )


def _screen_bbox(cache: CameraCache, center, world_radius, pad=1.5):
    """Conservative pixel bbox of a world sphere; None if behind camera."""
    right, up, forward = cache.camera.basis()
    d = np.asarray(center, dtype=np.float64) - cache.origin
    z = float(d @ forward)
    if z <= world_radius + 1e-9:
        return None
    x, y = project_point(cache.camera, center, cache.dims)
    r_px = cache.focal * world_radius / max(z - world_radius, 1e-6) * pad
    h, w = cache.dims.height, cache.dims.width
    c0 = max(0, int(math.floor(x - r_px)))
    c1 = min(w - 1, int(math.ceil(x + r_px)))
    r0 = max(0, int(math.floor(y - r_px)))
    r1 = min(h - 1, int(math.ceil(y + r_px)))
    if c0 > c1 or r0 > r1:
        return None
    return r0, r1, c0, c1


def _draw_shadow(img, zbuf, cache: CameraCache, cx, cy, radius):
    """Darken ground pixels within a world-space disc at (cx, cy)."""
    bbox = _shadow_bbox(cache, cx, cy, radius)
    if bbox is None:
        return
    r0, r1, c0, c1 = bbox
    gxy = cache.ground_xy[r0 : r1 + 1, c0 : c1 + 1]
    gt = cache.ground_t[r0 : r1 + 1, c0 : c1 + 1]
    zb = zbuf[r0 : r1 + 1, c0 : c1 + 1]
    d = np.hypot(gxy[..., 0] - cx, gxy[..., 1] - cy)
    on_ground = np.isfinite(gt) & (zb == gt)
    fall = np.clip((radius - d) / (0.25 * radius), 0.0, 1.0)
    factor = (1.0 - SHADOW_DEPTH * fall).astype(np.float32)
    sel = on_ground & (fall > 0)
    patch = img[r0 : r1 + 1, c0 : c1 + 1]
    patch[sel] *= factor[sel][:, None]


def _shadow_bbox(cache: CameraCache, cx, cy, radius):
    pts = [
        (cx - radius, cy - radius, 0.0),
        (cx + radius, cy - radius, 0.0),
        (cx - radius, cy + radius, 0.0),
        (cx + radius, cy + radius, 0.0),
    ]
    xs, ys = [], []
    for p in pts:
        try:
            x, y = project_point(cache.camera, p, cache.dims)
        except Exception:
            return None
        xs.append(x)
        ys.append(y)
    h, w = cache.dims.height, cache.dims.width
    c0 = max(0, int(math.floor(min(xs))))
    c1 = min(w - 1, int(math.ceil(max(xs))))
    r0 = max(0, int(math.floor(min(ys))))
    r1 = min(h - 1, int(math.ceil(max(ys))))
    if c0 > c1 or r0 > r1:
        return None
    return r0, r1, c0, c1


def _rotate_vectors(v: np.ndarray, axis, phase: float) -> np.ndarray:
    """Rodrigues rotation of (..., 3) vectors; used to fake ball rolling."""
    if phase == 0.0:
        return v
    k = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(k)
    if n < 1e-12:
        return v
    k = k / n
    c, s = math.cos(-phase), math.sin(-phase)
    kv = np.cross(np.broadcast_to(k, v.shape), v)
    kdv = v @ k
    return v * c + kv * s + k[None, :] * (kdv * (1 - c))[..., None]


def _draw_sphere(img, zbuf, cache: CameraCache, sp: SphereInstance):
    bbox = _screen_bbox(cache, sp.center, sp.radius)
    if bbox is None:
        return
    r0, r1, c0, c1 = bbox
    d = cache.dirs[r0 : r1 + 1, c0 : c1 + 1]
    oc = cache.origin - np.asarray(sp.center, dtype=np.float64)
    b = d @ oc
    c_term = float(oc @ oc) - sp.radius**2
    disc = b * b - c_term
    hit = disc > 0
    if not hit.any():
        return
    t = -b - np.sqrt(np.where(hit, disc, 0.0))
    zb = zbuf[r0 : r1 + 1, c0 : c1 + 1]
    visible = hit & (t > 1e-6) & (t < zb)
    if not visible.any():
        return
    tv = t[visible]
    pts = cache.origin[None, :] + tv[:, None] * d[visible]
    normals = (pts - np.asarray(sp.center)[None, :]) / sp.radius
    shade = SPHERE_AMBIENT + SPHERE_DIFFUSE * np.maximum(0.0, normals @ LIGHT_DIR)
    albedo = np.broadcast_to(np.asarray(sp.color, dtype=np.float64), (tv.shape[0], 3)).copy()
    if sp.pattern == "spots":
        rn = _rotate_vectors(normals, sp.roll_axis, sp.roll_phase)
        spots = np.sin(6.5 * rn[:, 0] + 1.0) * np.sin(6.5 * rn[:, 1] + 2.0) * np.sin(
            6.5 * rn[:, 2] + 3.0
        )
        albedo[spots > 0.3] *= SPOT_DARKEN
    patch = img[r0 : r1 + 1, c0 : c1 + 1]
    patch[visible] = (albedo * shade[:, None]).astype(np.float32)
    zb[visible] = tv


# ----- triangle rasterization (numba kernel with numpy fallback) -----

_USE_NUMBA = os.environ.get("FORCEFORGE_NO_NUMBA", "") == ""
if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        _USE_NUMBA = False

if _USE_NUMBA:

    @njit(cache=True)
    def _fill_triangles_jit(img, zbuf, px, py, pz, colors):  # pragma: no cover
        h, w = zbuf.shape
        for t in range(px.shape[0]):
            x0, x1, x2 = px[t, 0], px[t, 1], px[t, 2]
            y0, y1, y2 = py[t, 0], py[t, 1], py[t, 2]
            area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
            if area == 0.0:
                continue
            c_lo = int(max(0.0, math.floor(min(x0, min(x1, x2)) - 0.5)))
            c_hi = int(min(w - 1.0, math.ceil(max(x0, max(x1, x2)) + 0.5)))
            r_lo = int(max(0.0, math.floor(min(y0, min(y1, y2)) - 0.5)))
            r_hi = int(min(h - 1.0, math.ceil(max(y0, max(y1, y2)) + 0.5)))
            if c_lo > c_hi or r_lo > r_hi:
                continue
            inv = 1.0 / area
            for r in range(r_lo, r_hi + 1):
                sy = r + 0.5
                for c in range(c_lo, c_hi + 1):
                    sx = c + 0.5
                    w2 = ((x1 - x0) * (sy - y0) - (sx - x0) * (y1 - y0)) * inv
                    w0 = ((x2 - x1) * (sy - y1) - (sx - x1) * (y2 - y1)) * inv
                    w1 = 1.0 - w0 - w2
                    if w0 < 0.0 or w1 < 0.0 or w2 < 0.0:
                        continue
                    z = w0 * pz[t, 0] + w1 * pz[t, 1] + w2 * pz[t, 2]
                    if z > 0.0 and z < zbuf[r, c]:
                        zbuf[r, c] = z
                        img[r, c, 0] = colors[t, 0]
                        img[r, c, 1] = colors[t, 1]
                        img[r, c, 2] = colors[t, 2]


def _fill_triangles_numpy(img, zbuf, px, py, pz, colors):
    h, w = zbuf.shape
    for t in range(px.shape[0]):
        x0, x1, x2 = px[t]
        y0, y1, y2 = py[t]
        area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if area == 0.0:
            continue
        c_lo = int(max(0, math.floor(min(x0, x1, x2) - 0.5)))
        c_hi = int(min(w - 1, math.ceil(max(x0, x1, x2) + 0.5)))
        r_lo = int(max(0, math.floor(min(y0, y1, y2) - 0.5)))
        r_hi = int(min(h - 1, math.ceil(max(y0, y1, y2) + 0.5)))
        if c_lo > c_hi or r_lo > r_hi:
            continue
        sx = np.arange(c_lo, c_hi + 1) + 0.5
        sy = (np.arange(r_lo, r_hi + 1) + 0.5)[:, None]
        inv = 1.0 / area
        w2 = ((x1 - x0) * (sy - y0) - (sx - x0) * (y1 - y0)) * inv
        w0 = ((x2 - x1) * (sy - y1) - (sx - x1) * (y2 - y1)) * inv
        w1 = 1.0 - w0 - w2
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue
        z = w0 * pz[t, 0] + w1 * pz[t, 1] + w2 * pz[t, 2]
        zb = zbuf[r_lo : r_hi + 1, c_lo : c_hi + 1]
        sel = inside & (z > 0) & (z < zb)
        zb[sel] = z[sel]
        img[r_lo : r_hi + 1, c_lo : c_hi + 1][sel] = colors[t]


def _fill_triangles(img, zbuf, px, py, pz, colors):
    if _USE_NUMBA:
        _fill_triangles_jit(img, zbuf, px, py, pz, colors)
    else:
        _fill_triangles_numpy(img, zbuf, px, py, pz, colors)


def _draw_mesh(img, zbuf, cache: CameraCache, mesh: MeshInstance):
    right, up, forward = cache.camera.basis()
    d = mesh.vertices - cache.origin[None, :]
    X = d @ right
    Y = d @ up
    Z = d @ forward
    ok = Z > 1e-6
    f = cache.focal
    sx = cache.dims.width / 2.0 + f * X / np.where(ok, Z, 1.0)
    sy = cache.dims.height / 2.0 - f * Y / np.where(ok, Z, 1.0)

    faces = mesh.faces
    keep = ok[faces].all(axis=1)
    if not keep.any():
        return
    faces = faces[keep]

    v0 = mesh.vertices[faces[:, 0]]
    e1 = mesh.vertices[faces[:, 1]] - v0
    e2 = mesh.vertices[faces[:, 2]] - v0
    n = np.cross(e1, e2)
    norms = np.linalg.norm(n, axis=1)
    norms[norms < 1e-12] = 1.0
    n = n / norms[:, None]
    shade = MESH_AMBIENT + MESH_DIFFUSE * np.abs(n @ LIGHT_DIR)
    colors = (np.asarray(mesh.color)[None, :] * shade[:, None]).astype(np.float32)

    px = sx[faces]
    py = sy[faces]
    pz = Z[faces]
    _fill_triangles(img, zbuf, px, py, pz, colors)


def _draw_capsule(img, zbuf, cache: CameraCache, cap: CapsuleInstance):
    right, up, forward = cache.camera.basis()
    pa = np.asarray(cap.a, dtype=np.float64)
    pb = np.asarray(cap.b, dtype=np.float64)
    da = pa - cache.origin
    db = pb - cache.origin
    za, zb_ = float(da @ forward), float(db @ forward)
    if za <= 1e-6 or zb_ <= 1e-6:
        return
    ax, ay = project_point(cache.camera, pa, cache.dims)
    bx, by = project_point(cache.camera, pb, cache.dims)
    ra_px = cache.focal * cap.radius / za
    rb_px = cache.focal * cap.radius / zb_
    pad = max(ra_px, rb_px) + 1.5
    h, w = cache.dims.height, cache.dims.width
    c0 = max(0, int(math.floor(min(ax, bx) - pad)))
    c1 = min(w - 1, int(math.ceil(max(ax, bx) + pad)))
    r0 = max(0, int(math.floor(min(ay, by) - pad)))
    r1 = min(h - 1, int(math.ceil(max(ay, by) + pad)))
    if c0 > c1 or r0 > r1:
        return
    sx = np.arange(c0, c1 + 1) + 0.5
    sy = (np.arange(r0, r1 + 1) + 0.5)[:, None]
    ex, ey = bx - ax, by - ay
    seg_len2 = ex * ex + ey * ey
    if seg_len2 < 1e-12:
        u = np.zeros((r1 - r0 + 1, c1 - c0 + 1))
    else:
        u = np.clip(((sx - ax) * ex + (sy - ay) * ey) / seg_len2, 0.0, 1.0)
    cx = ax + u * ex
    cy = ay + u * ey
    dist = np.hypot(sx - cx, sy - cy)
    r_px = ra_px + u * (rb_px - ra_px)
    inside = dist <= r_px
    if not inside.any():
        return
    z = za + u * (zb_ - za)
    zb = zbuf[r0 : r1 + 1, c0 : c1 + 1]
    sel = inside & (z < zb)
    if not sel.any():
        return
    rel = np.clip(dist / np.maximum(r_px, 1e-9), 0.0, 1.0)
    shade = 0.55 + 0.45 * np.sqrt(np.maximum(0.0, 1.0 - rel * rel))
    color = np.asarray(cap.color, dtype=np.float32)
    patch = img[r0 : r1 + 1, c0 : c1 + 1]
    patch[sel] = (color[None, :] * shade[sel][:, None]).astype(np.float32)
    zb[sel] = z[sel]


def _mesh_shadow_disc(mesh: MeshInstance):
    centroid = mesh.vertices.mean(axis=0)
    spans = mesh.vertices[:, :2].max(axis=0) - mesh.vertices[:, :2].min(axis=0)
    radius = 0.5 * float(max(spans[0], spans[1], 0.2))
    return float(centroid[0]), float(centroid[1]), radius


def render_frame(
    scene: SceneGeometry,
    state: FrameState,
    camera: CameraModel,
    dims: VideoDims,
    cache: CameraCache | None = None,
) -> np.ndarray:
    """One (H, W, 3) float32 frame in [0, 1]."""
    if cache is None:
        cache = make_camera_cache(scene, camera, dims)
    img = cache.base_img.copy()
    zbuf = cache.ground_t.copy()

    if scene.shadows:
        for sp in state.spheres:
            _draw_shadow(img, zbuf, cache, sp.center[0], sp.center[1], sp.radius * 1.6)
        for mesh in state.meshes:
            cx, cy, r = _mesh_shadow_disc(mesh)
            _draw_shadow(img, zbuf, cache, cx, cy, r)

    for mesh in state.meshes:
        _draw_mesh(img, zbuf, cache, mesh)
    for cap in state.capsules:
        _draw_capsule(img, zbuf, cache, cap)
    for sp in state.spheres:
        _draw_sphere(img, zbuf, cache, sp)
    return img


def render_clip(
    scene: SceneGeometry,
    states: list[FrameState],
    camera: CameraModel,
    dims: VideoDims,
) -> np.ndarray:
    """All frames of a clip, shape (frames, H, W, 3) float32; frame 0 is phi."""
    if len(states) != dims.frames:
        raise RenderError(f"state series length {len(states)} != dims.frames {dims.frames}")
    cache = make_camera_cache(scene, camera, dims)
    out = np.empty((dims.frames, dims.height, dims.width, 3), dtype=np.float32)
    for i, st in enumerate(states):
        out[i] = render_frame(scene, st, camera, dims, cache)
    return out


def to_uint8(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def save_frame_png(img: np.ndarray, path: str | Path) -> None:
    Image.fromarray(to_uint8(img)).save(Path(path), compress_level=1)
