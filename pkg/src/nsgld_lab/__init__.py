"""Non-reversible stochastic gradient Langevin dynamics (NSGLD) for non-convex optimization.

Submodules
----------
linalg      antisymmetric and drift matrices, norms, checked eigensolver
objectives  test objectives, regularity constants and checks, ICA
dynamics    NSGLD/SGLD steppers, Euler-Maruyama reference, ensemble runner
spectral    Eyring-Kramers rates, complexity ratio, grid generator gaps
bounds      explicit constants and performance bounds
harness     configuration, runs, sweeps and CSV/SVG output
"""

from .dynamics import ChainConfig, RunRecord, StepSchedule, nsgld_step, run_ensemble, sgld_step
from .linalg import AntisymmetricMatrix, DriftMatrix, block_diagonal_J, random_gaussian_J
from .objectives import double_well, ica_objective, isotropic_quadratic

__version__ = "0.1.0"

__all__ = [
    "AntisymmetricMatrix", "ChainConfig", "DriftMatrix", "RunRecord", "StepSchedule",
    "block_diagonal_J", "double_well", "ica_objective", "isotropic_quadratic", "nsgld_step",
    "random_gaussian_J", "run_ensemble", "sgld_step",
]
