"""Spectral evaluation of long-range interaction potentials and the
nonlinear Schrodinger equation with nonlocal interactions.

The library computes u = U * rho for Coulomb, Poisson and confined
interaction kernels on uniform grids with spectral accuracy on truncated
domains, and builds on that to deliver ground states (normalized gradient
flow) and dynamics (time splitting) of the associated NLSE.
"""

from .dynamics import DynamicsConfig, DynamicsTrace, SplittingScheme, \
    evolve, honeycomb_potential, kinetic_substep, potential_substep
from .fieldio import read_field, write_field
from .grid import ScalarField, UniformGrid, make_grid
from .groundstate import GfdnConfig, besp_inner_solve, compute_ground_state
from .kernels import FAMILIES, KernelSpec
from .observables import EnergyReport, energy, mass, virial_residual
from .reference import GaussianDensitySpec, error_eh, reference_potential
from .solvers import get_operator, make_operator, solve_dst, solve_fft, \
    solve_potential
from .tables import TABLE_IDS, TableResult, reproduce_table, write_csv

__version__ = "0.1.0"

__all__ = [
    "DynamicsConfig", "DynamicsTrace", "SplittingScheme", "evolve",
    "honeycomb_potential", "kinetic_substep", "potential_substep",
    "read_field", "write_field", "ScalarField", "UniformGrid", "make_grid",
    "GfdnConfig", "besp_inner_solve", "compute_ground_state",
    "FAMILIES", "KernelSpec", "EnergyReport", "energy", "mass",
    "virial_residual", "GaussianDensitySpec", "error_eh",
    "reference_potential", "get_operator", "make_operator", "solve_dst",
    "solve_fft", "solve_potential", "TABLE_IDS", "TableResult",
    "reproduce_table", "write_csv", "__version__",
]
