"""Numerical verification of lamination stability for polycrystal spectra.

Unit-trace eigenvalue triples, rank-one connections between them, the
optimal lamination curves from a base spectrum S, the closed curve they
generate in the unit-trace plane, and the checks showing that the region it
bounds is stable under lamination.
"""
from .curves import OptimalParams, curve_arrays, optimal_params, sample_curve, slope_at_S
from .errors import LaminationError
from .hull import HullPolygon, Membership, build_gamma, contains, hexagon
from .rank_one import AdmissibleSet, admissible_set, connect, normal_squares, trajectory
from .spectra import Spectrum3, SymMat3, eigen_spectrum, embed_plane, invariants, make_spectrum
from .stability import (
    extremal_check,
    factorization_residual,
    h_value,
    inequality_suite,
    lambda_cap,
    stability_sweep,
    tangent_inward_check,
    tau,
)

__version__ = "0.1.0"
