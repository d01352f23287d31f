from forceforge.physics.clock import SimClock
from forceforge.physics.balls import (
    BallPhysicsConfig,
    BallState,
    ImpulseSpec,
    SimulationError,
    make_ball,
    map_force_to_impulse,
    simulate_ball,
)
from forceforge.physics.cloth import (
    ClothDivergenceError,
    ClothSeries,
    ClothState,
    GustModel,
    WindField,
    build_flag_cloth,
    simulate_cloth,
)
from forceforge.physics.chain import (
    ChainSeries,
    ChainState,
    PokeSpec,
    build_plant_chain,
    joint_positions,
    simulate_chain,
)

__all__ = [
    "SimClock",
    "BallPhysicsConfig",
    "BallState",
    "ImpulseSpec",
    "SimulationError",
    "make_ball",
    "map_force_to_impulse",
    "simulate_ball",
    "ClothDivergenceError",
    "ClothSeries",
    "ClothState",
    "GustModel",
    "WindField",
    "build_flag_cloth",
    "simulate_cloth",
    "ChainSeries",
    "ChainState",
    "PokeSpec",
    "build_plant_chain",
    "joint_positions",
    "simulate_chain",
]
