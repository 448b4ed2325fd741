"""Convolution operators over group rings, l2 formal inverses, and Bernoulli-factor measures."""

from .groups import BallTooLarge, GroupDescriptor, GroupError
from .ring import (
    FinSuppVector,
    GroupRingMatrix,
    TorusConfiguration,
    TruncatedL2Matrix,
    duality_pairing,
    hat,
    image_membership,
    lambda_apply,
    q_map,
    r_apply,
    r_xi_apply,
    right_apply,
    star,
)
from .inverse import PRESETS, SolverConfig, SolverFailure, preset, solve, verify_left_right
from .measures import MuSpec, convergence_sweep, dirichlet_kernel, monte_carlo_fourier, mu_fourier_exact

__version__ = "0.1.0"

__all__ = [
    "BallTooLarge",
    "GroupDescriptor",
    "GroupError",
    "FinSuppVector",
    "GroupRingMatrix",
    "TorusConfiguration",
    "TruncatedL2Matrix",
    "duality_pairing",
    "hat",
    "image_membership",
    "lambda_apply",
    "q_map",
    "r_apply",
    "r_xi_apply",
    "right_apply",
    "star",
    "PRESETS",
    "SolverConfig",
    "SolverFailure",
    "preset",
    "solve",
    "verify_left_right",
    "MuSpec",
    "convergence_sweep",
    "dirichlet_kernel",
    "monte_carlo_fourier",
    "mu_fourier_exact",
]
