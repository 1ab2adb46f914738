"""Positive solutions of -Lu = |x|^alpha u^p in the unit ball of R^N.

Radial profiles, linearized spectra by angular mode, Morse index, scans over p
and endpoint asymptotics, backed by the C++ library.
"""

from ._core import (
    HenonError,
    HenonParams,
    angular_eigenvalue,
    critical_exponent,
    default_grid,
    find_degeneracy_points,
    limit_profile,
    mode_spectrum,
    morse_index,
    multiplicity,
    p_to_1,
    prufer_eigenvalue,
    quadform_cosine,
    quadform_profile,
    rescaled_sup_distance,
    run_acceptance,
    scan,
    schema_version,
    solve_radial,
    weighted_first_eigenvalue,
)

__all__ = [
    "HenonError",
    "HenonParams",
    "angular_eigenvalue",
    "critical_exponent",
    "default_grid",
    "find_degeneracy_points",
    "limit_profile",
    "mode_spectrum",
    "morse_index",
    "multiplicity",
    "p_to_1",
    "prufer_eigenvalue",
    "quadform_cosine",
    "quadform_profile",
    "rescaled_sup_distance",
    "run_acceptance",
    "scan",
    "schema_version",
    "solve_radial",
    "weighted_first_eigenvalue",
]
