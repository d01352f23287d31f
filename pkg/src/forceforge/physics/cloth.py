"""Mass-spring cloth (flags) under gravity, damping, and directional wind.

The flag hangs from a horizontal crossbar: the top row of the grid is
pinned, chosen so the zero-wind equilibrium is the flat vertical sheet
(structural, shear, and bend springs are all at rest there up to the small
gravity stretch, which the builder bakes into the initial positions).

Wind applies a one-sided normal-projected drag per vertex,

    F_w = c_w * (s_max * speed) * max(0, n.w) * n

with n the vertex normal oriented toward the wind and w the wind unit
vector, so sheets are pushed downwind regardless of which face the wind
hits and are never sucked upwind. Integration is semi-implicit Euler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClothDivergenceError",
    "GustModel",
    "WindField",
    "ClothState",
    "ClothSeries",
    "build_flag_cloth",
    "simulate_cloth",
]

COORD_SANITY_BOUND = 100.0  # meters; anything beyond this is divergence


class ClothDivergenceError(RuntimeError):
    """Simulation blew up; carries the first offending integrator step."""

    def __init__(self, step: int):
        super().__init__(f"cloth simulation diverged at integrator step {step}")
        self.step = step


@dataclass(frozen=True, slots=True)
class GustModel:
    """Smoothed-noise wind modulation (Ornstein-Uhlenbeck style)."""

    amplitude: float = 0.2
    correlation_time: float = 0.5


@dataclass(frozen=True, slots=True)
class WindField:
    """Wind with speed in [0, 1] blowing toward the world azimuth `direction`."""

    speed: float
    direction: float = 0.0
    gust: GustModel | None = None

    def __post_init__(self):
        if not 0.0 <= self.speed <= 1.0:
            raise ValueError(f"wind speed must be in [0, 1], got {self.speed}")

    def unit(self) -> np.ndarray:
        rad = math.radians(self.direction)
        return np.array([math.cos(rad), math.sin(rad), 0.0])


@dataclass
class ClothState:
    """Grid cloth with structural/shear/bend springs.

    positions/velocities: (V, 3) float64, pinned: (V,) bool. Spring arrays
    hold vertex index pairs and per-spring rest lengths.
    """

    n_rows: int
    n_cols: int
    positions: np.ndarray
    velocities: np.ndarray
    pinned: np.ndarray
    spring_a: np.ndarray
    spring_b: np.ndarray
    rest_lengths: np.ndarray
    spring_k: np.ndarray
    faces: np.ndarray
    vertex_mass: float
    spring_damping: float = 0.015
    air_drag: float = 0.004
    wind_coefficient: float = 0.0031
    wind_speed_max: float = 8.0

    def validate(self):
        if not self.pinned.any():
            raise ValueError("cloth needs at least one pinned vertex")
        if np.any(self.rest_lengths <= 0):
            raise ValueError("rest lengths must be positive")

    def grid_index(self, row: int, col: int) -> int:
        return row * self.n_cols + col

    def free_edge_indices(self) -> np.ndarray:
        """Vertices on the bottom (free) row."""
        return np.arange(
            (self.n_rows - 1) * self.n_cols, self.n_rows * self.n_cols, dtype=np.int64
        )


def build_flag_cloth(
    n_rows: int = 8,
    n_cols: int = 10,
    width: float = 0.9,
    drop: float = 0.6,
    top_left: tuple[float, float, float] = (0.0, 0.0, 2.2),
    along: tuple[float, float] = (0.0, 1.0),
    total_mass: float = 0.16,
    stiffness: float = 8.0,
) -> ClothState:
    """Flag pinned along its top edge, hanging in a vertical plane.

    `along` is the horizontal unit direction of the crossbar; the sheet
    hangs straight down from it. Initial positions include the static
    gravity stretch of the vertical structural springs so the start state
    is near equilibrium.
    """
    V = n_rows * n_cols
    rest_h = width / (n_cols - 1)
    rest_v = drop / (n_rows - 1)
    m = total_mass / V

    ax, ay = along
    norm = math.hypot(ax, ay)
    ax, ay = ax / norm, ay / norm

    # static stretch of the spring above row i: weight of rows i..end over k
    g = 9.81
    stretch = np.zeros(n_rows)
    for i in range(1, n_rows):
        hanging = (n_rows - i) * m * g
        stretch[i] = stretch[i - 1] + hanging / stiffness

    positions = np.zeros((V, 3))
    for i in range(n_rows):
        for j in range(n_cols):
            idx = i * n_cols + j
            positions[idx, 0] = top_left[0] + ax * rest_h * j
            positions[idx, 1] = top_left[1] + ay * rest_h * j
            positions[idx, 2] = top_left[2] - rest_v * i - stretch[i]

    pinned = np.zeros(V, dtype=bool)
    pinned[:n_cols] = True

    sa, sb, rest, ks = [], [], [], []

    def add(i1, j1, i2, j2, L, k):
        sa.append(i1 * n_cols + j1)
        sb.append(i2 * n_cols + j2)
        rest.append(L)
        ks.append(k)

    diag = math.hypot(rest_h, rest_v)
    for i in range(n_rows):
        for j in range(n_cols):
            if j + 1 < n_cols:
                add(i, j, i, j + 1, rest_h, stiffness)  # structural horizontal
            if i + 1 < n_rows:
                add(i, j, i + 1, j, rest_v, stiffness)  # structural vertical
            if i + 1 < n_rows and j + 1 < n_cols:
                add(i, j, i + 1, j + 1, diag, 0.7 * stiffness)  # shear
                add(i, j + 1, i + 1, j, diag, 0.7 * stiffness)
            if j + 2 < n_cols:
                add(i, j, i, j + 2, 2 * rest_h, 0.25 * stiffness)  # bend
            if i + 2 < n_rows:
                add(i, j, i + 2, j, 2 * rest_v, 0.25 * stiffness)

    faces = []
    for i in range(n_rows - 1):
        for j in range(n_cols - 1):
            a = i * n_cols + j
            faces.append((a, a + 1, a + n_cols))
            faces.append((a + 1, a + n_cols + 1, a + n_cols))

    state = ClothState(
        n_rows=n_rows,
        n_cols=n_cols,
        positions=positions,
        velocities=np.zeros((V, 3)),
        pinned=pinned,
        spring_a=np.array(sa, dtype=np.int64),
        spring_b=np.array(sb, dtype=np.int64),
        rest_lengths=np.array(rest),
        spring_k=np.array(ks),
        faces=np.array(faces, dtype=np.int64),
        vertex_mass=m,
    )
    state.validate()
    return state


@dataclass
class ClothSeries:
    """Frame-sampled cloth run: positions/velocities are (frames, V, 3)."""

    positions: np.ndarray
    velocities: np.ndarray
    cloth: ClothState

    def kinetic_energy(self, frame: int) -> np.ndarray:
        """Per-vertex kinetic energy (J) at one frame."""
        v2 = np.sum(self.velocities[frame] ** 2, axis=1)
        return 0.5 * self.cloth.vertex_mass * v2

    def free_edge_mean(self, frame: int) -> np.ndarray:
        """Mean position of the free edge at one frame."""
        return self.positions[frame, self.cloth.free_edge_indices()].mean(axis=0)


def _vertex_normals(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
    p0 = positions[faces[:, 0]]
    e1 = positions[faces[:, 1]] - p0
    e2 = positions[faces[:, 2]] - p0
    fn = np.cross(e1, e2)
    vn = np.zeros_like(positions)
    flat = faces.ravel()
    for c in range(3):
        contrib = np.repeat(fn[:, c], 3)
        vn[:, c] = np.bincount(flat, weights=contrib, minlength=positions.shape[0])
    norms = np.linalg.norm(vn, axis=1)
    norms[norms < 1e-12] = 1.0
    return vn / norms[:, None]


def simulate_cloth(
    cloth: ClothState,
    wind: WindField,
    gravity: float = 9.81,
    clock: "SimClock | None" = None,
    seed: int = 0,
) -> ClothSeries:
    """Semi-implicit Euler run from the rest configuration.

    Raises ClothDivergenceError (naming the step) if any coordinate leaves
    the sanity bound or turns non-finite.
    """
    from forceforge.physics.clock import SimClock

    if clock is None:
        # springs at default stiffness need dt <= ~1/100 s for stability
        clock = SimClock(dt=1.0 / 128.0, substeps=16, frames=49)
    cloth.validate()

    V = cloth.positions.shape[0]
    pos = cloth.positions.copy()
    vel = cloth.velocities.copy()
    moving = ~cloth.pinned
    m = cloth.vertex_mass
    w_hat = wind.unit()
    wind_scale = cloth.wind_coefficient * cloth.wind_speed_max

    rng = np.random.default_rng(seed)
    gust_level = 0.0
    rho = (
        math.exp(-clock.dt / wind.gust.correlation_time) if wind.gust is not None else 0.0
    )

    out_p = np.empty((clock.frames, V, 3))
    out_v = np.empty((clock.frames, V, 3))
    out_p[0] = pos
    out_v[0] = vel

    sa, sb = cloth.spring_a, cloth.spring_b
    step = 0
    for frame in range(1, clock.frames):
        for _ in range(clock.substeps):
            step += 1
            forces = np.zeros((V, 3))
            forces[:, 2] -= m * gravity

            d = pos[sb] - pos[sa]
            lengths = np.linalg.norm(d, axis=1)
            lengths[lengths < 1e-12] = 1e-12
            d_hat = d / lengths[:, None]
            rel = np.einsum("ij,ij->i", vel[sb] - vel[sa], d_hat)
            f_scalar = cloth.spring_k * (lengths - cloth.rest_lengths) + cloth.spring_damping * rel
            f_spring = f_scalar[:, None] * d_hat
            for c in range(3):
                forces[:, c] += np.bincount(sa, weights=f_spring[:, c], minlength=V)
                forces[:, c] -= np.bincount(sb, weights=f_spring[:, c], minlength=V)

            forces -= cloth.air_drag * vel

            speed = wind.speed
            if wind.gust is not None:
                eta = rng.standard_normal()
                gust_level = gust_level * rho + wind.gust.amplitude * math.sqrt(
                    max(0.0, 1.0 - rho * rho)
                ) * eta
                speed = min(1.0, max(0.0, wind.speed * (1.0 + gust_level)))
            if speed > 0.0:
                normals = _vertex_normals(pos, cloth.faces)
                ndotw = normals @ w_hat
                facing = normals * np.where(ndotw >= 0.0, 1.0, -1.0)[:, None]
                proj = np.maximum(0.0, facing @ w_hat)
                forces += wind_scale * speed * proj[:, None] * facing

            vel[moving] += (forces[moving] / m) * clock.dt
            pos[moving] += vel[moving] * clock.dt

        if not np.all(np.isfinite(pos)) or np.any(np.abs(pos) > COORD_SANITY_BOUND):
            raise ClothDivergenceError(step)
        out_p[frame] = pos
        out_v[frame] = vel

    return ClothSeries(positions=out_p, velocities=out_v, cloth=cloth)
