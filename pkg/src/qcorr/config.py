"""Numerical tolerances shared by every module.

All comparisons in the package go through :data:`TOL` so the defaults live
in exactly one place.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default absolute tolerances.

    Attributes
    ----------
    matrix_eq : float
        Entrywise equality of matrices, hermiticity and unit trace.
    psd : float
        Smallest eigenvalue allowed for a positive semidefinite matrix.
    unit_norm : float
        Deviation of a Bloch vector or state vector from unit norm.
    eigenvalue_check : float
        Check that n.sigma has eigenvalues exactly +1 and -1.
    imag_trace : float
        Largest imaginary part of a Born probability that is silently dropped.
    probability_clamp : float
        Negative probabilities above ``-probability_clamp`` are rounding noise.
    normalization : float
        Per-block normalization and no-signalling of joint distributions.
    violation : float
        Margin a functional must exceed its bound by to count as violated.
    """

    matrix_eq: float = 1e-10
    psd: float = 1e-10
    unit_norm: float = 1e-10
    eigenvalue_check: float = 1e-9
    imag_trace: float = 1e-10
    probability_clamp: float = 1e-12
    normalization: float = 1e-9
    violation: float = 1e-9


TOL = Tolerances()
