"""Relative number squeezing in two-component Bose-Einstein condensates.

Two-mode analytics, truncated-Wigner field simulation and Bogoliubov
depletion, backed by the C++ core in ``becsq._core``. Units are SI: rad/s for
nonlinearities, seconds, metres, radians.
"""

from ._core import (
    BecsqError,
    CoherentFactors,
    ConvergenceError,
    InstabilityError,
    SqueezingResult,
    TruncationError,
    TwoModeParams,
    bogoliubov,
    coherent_factors,
    evaluate,
    figure,
    figure_names,
    fock_oracle,
    mode_reduction,
    optimize_theta,
    scan_recombination,
    twa_box,
)

__all__ = [
    "BecsqError",
    "CoherentFactors",
    "ConvergenceError",
    "InstabilityError",
    "SqueezingResult",
    "TruncationError",
    "TwoModeParams",
    "bogoliubov",
    "coherent_factors",
    "evaluate",
    "figure",
    "figure_names",
    "fock_oracle",
    "mode_reduction",
    "optimize_theta",
    "scan_recombination",
    "twa_box",
]
