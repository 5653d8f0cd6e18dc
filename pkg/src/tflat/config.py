"""Resource caps and global defaults.

All caps are overridable: grid cells via the TFLAT_MAX_CELLS environment
variable, everything else by assigning to the module attributes before use.
"""

import os

# Hard cap on cells in any single grid indicator / cover evaluation.
DEFAULT_MAX_CELLS = 2**24


def max_grid_cells() -> int:
    env = os.environ.get("TFLAT_MAX_CELLS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"TFLAT_MAX_CELLS={env!r} is not an integer")
    return DEFAULT_MAX_CELLS


# Cap on lattice points returned by a single enumeration.
POINT_ENUMERATION_CAP = 10**7

# Denominator bound when rationalizing float lattices for canonical forms.
RATIONALIZE_DENOMINATOR_BOUND = 10**6

# Denominator bound + residual tolerance for rationality detection in the
# symplectic pipelines (continued-fraction matching).
RATIONALITY_MAX_DENOMINATOR = 10**4
RATIONALITY_RESIDUAL_TOL = 1e-9

# Grid: default number of steps across a lattice cell diameter.
GRID_STEPS_PER_CELL = 256
