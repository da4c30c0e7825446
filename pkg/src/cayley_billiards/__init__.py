"""Periodic billiard trajectories inside ellipsoids.

Submodules: :mod:`ratpoly` (exact polynomials), :mod:`confocal` (confocal
families and elliptic coordinates), :mod:`cayley` (rank test),
:mod:`polyform` (polynomial certificates and the signature solver),
:mod:`closedform` (explicit families), :mod:`simulator` (billiard dynamics)
and :mod:`cli`.
"""
from .confocal import CausticError, CausticSet, Ellipsoid, MergedSpectrum, existence_check
from .cayley import cayley_condition, taylor_coeffs
from .polyform import Certificate, certificate_from_matrix, solve_signature, verify_certificate
from .simulator import launch_tangent, simulate, winding_numbers

__version__ = "0.1.0"

__all__ = [
    "CausticError",
    "CausticSet",
    "Certificate",
    "Ellipsoid",
    "MergedSpectrum",
    "cayley_condition",
    "certificate_from_matrix",
    "existence_check",
    "launch_tangent",
    "simulate",
    "solve_signature",
    "taylor_coeffs",
    "verify_certificate",
    "winding_numbers",
]
