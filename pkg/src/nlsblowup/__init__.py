"""Desk-scale numerical laboratory for pseudo-conformal blow-up in the
mass-critical inhomogeneous nonlinear Schrodinger equation."""

__version__ = "0.1.0"

from .grid import Field, Grid, NormReport, laplacian, norm, norm_report, pairing
from .ground_state import GroundState, compute_ground_state, solve_Q, solve_Qtilde

__all__ = [
    "Field", "Grid", "NormReport", "laplacian", "norm", "norm_report", "pairing",
    "GroundState", "compute_ground_state", "solve_Q", "solve_Qtilde",
]
