"""Procedural color catalogs, backdrops, and ground textures.

These stand in for the asset libraries of the original pipeline while
preserving the catalog sizes: 50 backdrop themes, 42 ground texture
recipes, 100 flag colors, 108 ball colors. Everything is a pure function
of its id, seeded through the package's stable mixing function.

Palette separation contract (the tracker depends on it): ball colors are
vivid (saturation >= 0.85, value >= 0.8) while ground textures stay
near-gray (saturation <= 0.12) and backdrops stay muted (saturation
<= 0.15), so a per-channel threshold of 60/255 around a shaded ball color
can never match ground or sky pixels.
"""

from __future__ import annotations

import math

import numpy as np

from forceforge.core import derive_seed

__all__ = [
    "N_BACKDROPS",
    "N_GROUND_TEXTURES",
    "flag_palette",
    "ball_palette",
    "backdrop_color",
    "ground_color",
    "backdrop_description",
    "ground_description",
]

N_BACKDROPS = 50
N_GROUND_TEXTURES = 42
_CATALOG_SEED = 0xF0C0_5EED


def _hsv_to_rgb(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized HSV -> RGB, all components in [0, 1]."""
    h = np.asarray(h, dtype=np.float64) % 1.0
    s = np.asarray(s, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1 - s)
    q = v * (1 - f * s)
    t = v * (1 - (1 - f) * s)
    out = np.empty(np.broadcast(h, s, v).shape + (3,))
    for k, (r, g, b) in enumerate([(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)]):
        mask = i == k
        out[mask, 0] = np.broadcast_to(r, mask.shape)[mask]
        out[mask, 1] = np.broadcast_to(g, mask.shape)[mask]
        out[mask, 2] = np.broadcast_to(b, mask.shape)[mask]
    return out


def flag_palette() -> np.ndarray:
    """(100, 3) flag colors: 20 hues x 5 saturation/value combos."""
    hues = np.repeat(np.arange(20) / 20.0, 5)
    sv = np.tile(np.array([(0.9, 0.9), (0.9, 0.6), (0.6, 0.95), (0.6, 0.5), (0.35, 0.8)]), (20, 1))
    return _hsv_to_rgb(hues, sv[:, 0], sv[:, 1])


def ball_palette() -> np.ndarray:
    """(108, 3) vivid ball colors: 18 hues x 6 combos, all trackable."""
    hues = np.repeat(np.arange(18) / 18.0, 6)
    sv = np.tile(
        np.array(
            [(1.0, 0.95), (1.0, 0.8), (0.9, 0.95), (0.9, 0.8), (0.85, 0.95), (0.85, 0.85)]
        ),
        (18, 1),
    )
    return _hsv_to_rgb(hues, sv[:, 0], sv[:, 1])


_KIND_OFFSETS = {"backdrop": 0, "ground": 1_000_000}


def _theme_rng(kind: str, index: int) -> np.random.Generator:
    # never the builtin hash(): it is salted per process
    return np.random.default_rng(derive_seed(_CATALOG_SEED, _KIND_OFFSETS[kind] + index))


_SKY_WORDS = [
    "hazy", "overcast", "dusky", "pale", "misty", "ashen", "silvery", "sombre",
    "smoky", "faded",
]
_SKY_SCENES = [
    "mountain horizon", "open plain", "coastal sky", "city haze", "desert evening",
]


def backdrop_description(index: int) -> str:
    """Deterministic short description used in text prompts."""
    index = index % N_BACKDROPS
    return f"a {_SKY_WORDS[index % 10]} {_SKY_SCENES[index // 10]}"


_GROUND_WORDS = ["checkered", "striped", "mottled"]
_GROUND_TONES = [
    "slate", "sand", "ash", "stone", "clay", "pebble", "gravel", "chalk",
    "cement", "dust", "fog-grey", "bone", "smoke", "putty",
]


def ground_description(index: int) -> str:
    index = index % N_GROUND_TEXTURES
    return f"{_GROUND_TONES[index // 3]} {_GROUND_WORDS[index % 3]} ground"


def _backdrop_params(index: int):
    rng = _theme_rng("backdrop", index % N_BACKDROPS)
    hue = rng.uniform(0.0, 1.0)
    sat = rng.uniform(0.03, 0.15)
    top_v = rng.uniform(0.55, 0.85)
    horizon_v = rng.uniform(0.6, 0.85)
    below_v = rng.uniform(0.3, 0.5)
    noise_amp = rng.uniform(0.0, 0.04)
    noise_freq = rng.uniform(2.0, 7.0)
    noise_phase = rng.uniform(0.0, 2 * math.pi)
    top = _hsv_to_rgb(np.array(hue), np.array(sat), np.array(top_v))
    horizon = _hsv_to_rgb(np.array((hue + 0.07) % 1.0), np.array(sat * 0.8), np.array(horizon_v))
    below = _hsv_to_rgb(np.array(hue), np.array(sat * 0.5), np.array(below_v))
    return top, horizon, below, noise_amp, noise_freq, noise_phase


def backdrop_color(index: int, directions: np.ndarray) -> np.ndarray:
    """Backdrop RGB for unit ray directions (..., 3): horizon gradient + noise."""
    top, horizon, below, amp, freq, phase = _backdrop_params(index)
    elev = directions[..., 2]
    azim = np.arctan2(directions[..., 1], directions[..., 0])
    up_mix = np.clip(elev / 0.6, 0.0, 1.0)[..., None]
    sky = horizon * (1 - up_mix) + top * up_mix
    down_mix = np.clip(-elev / 0.25, 0.0, 1.0)[..., None]
    color = sky * (1 - down_mix) + below * down_mix
    noise = amp * np.sin(freq * azim + phase) * np.cos(2.3 * freq * elev)
    return np.clip(color + noise[..., None], 0.0, 1.0)


def _ground_params(index: int):
    rng = _theme_rng("ground", index % N_GROUND_TEXTURES)
    hue = rng.uniform(0.0, 1.0)
    sat = rng.uniform(0.02, 0.12)
    v_lo = rng.uniform(0.25, 0.4)
    v_hi = v_lo + rng.uniform(0.08, 0.15)
    scale = rng.uniform(0.25, 0.9)
    angle = rng.uniform(0.0, math.pi)
    c_lo = _hsv_to_rgb(np.array(hue), np.array(sat), np.array(v_lo))
    c_hi = _hsv_to_rgb(np.array(hue), np.array(sat), np.array(v_hi))
    return c_lo, c_hi, scale, angle


def ground_color(index: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Ground texture RGB at world coordinates (meters); family = id mod 3."""
    index = index % N_GROUND_TEXTURES
    c_lo, c_hi, scale, angle = _ground_params(index)
    u = x * math.cos(angle) + y * math.sin(angle)
    v = -x * math.sin(angle) + y * math.cos(angle)
    family = index % 3
    if family == 0:  # checker
        mix = ((np.floor(u / scale) + np.floor(v / scale)) % 2.0)
    elif family == 1:  # stripes
        mix = (np.floor(u / scale) % 2.0)
    else:  # mottled pseudo-noise
        n = (
            np.sin(u * 3.1 / scale + 1.7)
            + np.sin(v * 2.3 / scale + 0.4)
            + np.sin((u + v) * 1.7 / scale + 3.9)
        ) / 3.0
        mix = 0.5 + 0.5 * n
    return c_lo + (c_hi - c_lo) * mix[..., None]
