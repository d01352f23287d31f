"""Damped elastic chain: the oscillating-plant stand-in.

Segments are rigid links joined by torsional springs; each joint carries a
relative angle from the straight-up rest pose. Joints behave as identical
independent damped oscillators (uniform lumped inertia), which keeps the
response single-frequency and lets each substep use the exact closed-form
propagator of the linear system. Total mechanical energy is therefore
non-increasing at every sampled step, exactly.

A poke delivers a linear impulse at the outer end of the contact segment;
the torque impulse felt by each joint below scales with F, with the lever
arm from the joint to the contact point, and with the component of the
poke direction perpendicular to the segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from forceforge.physics.clock import SimClock

__all__ = [
    "ChainState",
    "ChainSeries",
    "PokeSpec",
    "build_plant_chain",
    "simulate_chain",
    "joint_positions",
    "chain_energy",
]


@dataclass(frozen=True)
class ChainState:
    """Joint angles/velocities plus the physical constants of the chain."""

    angles: np.ndarray  # (n,) radians, relative to rest
    velocities: np.ndarray  # (n,) radians/second
    base_anchor: tuple[float, float, float] = (0.0, 0.0, 0.0)
    segment_length: float = 0.22
    stiffness: float = 0.016  # torque per radian
    damping: float = 3.9e-4  # torque-seconds per radian
    segment_mass: float = 0.04
    plane_azimuth: float = 0.0  # degrees; vertical sway plane orientation

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=np.float64)
        velocities = np.asarray(self.velocities, dtype=np.float64)
        if angles.ndim != 1 or angles.shape != velocities.shape or angles.size < 1:
            raise ValueError("chain needs matching 1-D angles/velocities with >= 1 segment")
        if self.stiffness <= 0 or self.damping <= 0:
            raise ValueError("stiffness and damping must be positive")
        if self.segment_length <= 0 or self.segment_mass <= 0:
            raise ValueError("segment length and mass must be positive")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "velocities", velocities)

    @property
    def n_segments(self) -> int:
        return self.angles.size

    @property
    def inertia(self) -> float:
        """Lumped rod inertia about the joint."""
        return self.segment_mass * self.segment_length**2 / 3.0


def build_plant_chain(
    segments: int = 5,
    base: tuple[float, float, float] = (0.0, 0.0, 0.0),
    segment_length: float = 0.22,
) -> ChainState:
    """Default upright plant: straight chain at rest."""
    return ChainState(
        angles=np.zeros(segments),
        velocities=np.zeros(segments),
        base_anchor=base,
        segment_length=segment_length,
    )


@dataclass(frozen=True, slots=True)
class PokeSpec:
    """Poke: magnitude F in [0, 1], world azimuth in degrees, contact segment."""

    magnitude: float
    angle_world: float
    contact_index: int
    impulse_min: float = 6e-5
    impulse_max: float = 6e-4

    def __post_init__(self):
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError(f"force magnitude must be in [0, 1], got {self.magnitude}")

    def impulse(self) -> float:
        return self.impulse_min + (self.impulse_max - self.impulse_min) * self.magnitude


def _propagator(omega: float, zeta: float, dt: float) -> tuple[float, float, float, float]:
    """Exact 2x2 state propagator of x'' + 2 zeta omega x' + omega^2 x = 0."""
    decay = math.exp(-zeta * omega * dt)
    if zeta < 1.0:
        wd = omega * math.sqrt(1.0 - zeta * zeta)
        c, s = math.cos(wd * dt), math.sin(wd * dt) / wd
    elif zeta == 1.0:
        c, s = 1.0, dt
    else:
        wd = omega * math.sqrt(zeta * zeta - 1.0)
        c, s = math.cosh(wd * dt), math.sinh(wd * dt) / wd
    m00 = decay * (c + zeta * omega * s)
    m01 = decay * s
    m10 = decay * (-(omega**2) * s)
    m11 = decay * (c - zeta * omega * s)
    return m00, m01, m10, m11


def simulate_chain(
    chain: ChainState,
    poke: PokeSpec,
    clock: SimClock | None = None,
) -> "ChainSeries":
    """Poke then ring down. Frame 0 is the untouched initial pose."""
    if clock is None:
        clock = SimClock(dt=1.0 / 64.0, substeps=8, frames=49)
    n = chain.n_segments
    if not 0 <= poke.contact_index < n:
        raise ValueError(f"contact index {poke.contact_index} out of range for {n} segments")

    I = chain.inertia
    omega = math.sqrt(chain.stiffness / I)
    zeta = chain.damping / (2.0 * math.sqrt(chain.stiffness * I))
    m00, m01, m10, m11 = _propagator(omega, zeta, clock.dt)

    angles = chain.angles.copy()
    velocities = chain.velocities.copy()

    out_a = np.empty((clock.frames, n))
    out_v = np.empty((clock.frames, n))
    out_a[0] = angles
    out_v[0] = velocities

    # impulse lands after frame 0: torque impulse J * lever * perpendicular component
    world_angles = np.cumsum(angles)
    contact_tilt = world_angles[poke.contact_index]
    J = poke.impulse() * math.cos(contact_tilt)
    L = chain.segment_length
    for i in range(poke.contact_index + 1):
        lever = (poke.contact_index + 1 - i) * L
        velocities[i] += J * lever / I

    for frame in range(1, clock.frames):
        for _ in range(clock.substeps):
            a_new = m00 * angles + m01 * velocities
            v_new = m10 * angles + m11 * velocities
            angles, velocities = a_new, v_new
        out_a[frame] = angles
        out_v[frame] = velocities

    azimuth = poke.angle_world
    return ChainSeries(
        angles=out_a,
        velocities=out_v,
        chain=replace(chain, plane_azimuth=azimuth),
    )


@dataclass(frozen=True)
class ChainSeries:
    """Frame-sampled chain run; angles/velocities are (frames, n)."""

    angles: np.ndarray
    velocities: np.ndarray
    chain: ChainState

    def positions(self, frame: int) -> np.ndarray:
        return joint_positions(
            self.angles[frame],
            self.chain.base_anchor,
            self.chain.segment_length,
            self.chain.plane_azimuth,
        )

    def tip_positions(self) -> np.ndarray:
        """(frames, 3) path of the chain tip."""
        return np.array([self.positions(f)[-1] for f in range(self.angles.shape[0])])

    def energy(self, frame: int) -> float:
        return chain_energy(
            self.angles[frame], self.velocities[frame], self.chain.stiffness, self.chain.inertia
        )


def chain_energy(angles: np.ndarray, velocities: np.ndarray, stiffness: float, inertia: float) -> float:
    """Total mechanical energy of the independent-joint chain (J)."""
    return float(0.5 * inertia * np.sum(velocities**2) + 0.5 * stiffness * np.sum(angles**2))


def joint_positions(
    angles: np.ndarray,
    base: tuple[float, float, float],
    segment_length: float,
    plane_azimuth: float,
) -> np.ndarray:
    """Endpoints of every segment (n+1 points, base first) in world meters."""
    psi = math.radians(plane_azimuth)
    sway = np.array([math.cos(psi), math.sin(psi), 0.0])
    up = np.array([0.0, 0.0, 1.0])
    world = np.cumsum(np.asarray(angles, dtype=np.float64))
    pts = np.empty((angles.shape[0] + 1, 3))
    pts[0] = base
    for i, phi in enumerate(world):
        direction = math.sin(phi) * sway + math.cos(phi) * up
        pts[i + 1] = pts[i] + segment_length * direction
    return pts
