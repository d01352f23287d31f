"""forceforge: force-conditioned synthetic video dataset engine.

Simulates wind-driven flags, impulse-driven rolling balls, and poked
oscillating plants; renders paired (initial frame, force prompt, video)
training records; materializes control-signal tensors for global and
local force prompts; and measures force/distance/mass relationships.
"""

__version__ = "0.1.0"

from forceforge.core import (
    GlobalForcePrompt,
    LocalForcePrompt,
    MultiForcePrompt,
    PromptError,
    VideoDims,
    derive_seed,
)

__all__ = [
    "__version__",
    "GlobalForcePrompt",
    "LocalForcePrompt",
    "MultiForcePrompt",
    "PromptError",
    "VideoDims",
    "derive_seed",
]
