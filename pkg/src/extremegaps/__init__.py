"""Extreme gaps between eigenvalues of random matrices.

Samplers for CUE and GUE spectra, their determinantal kernels, exact and
asymptotic gap probabilities, limit laws for the smallest and largest
gaps, the Toda-flow diagonalization experiment and tools for zeta zeros.
"""
__version__ = "0.1.0"

from .ensembles import (
    EigenangleSet,
    Spectrum,
    TridiagonalMatrix,
    eig_sym_tridiagonal,
    haar_unitary,
    sample_cue_eigenangles,
    sample_gue_spectrum,
    sample_gue_tridiagonal,
)
from .errors import ConvergenceError, ExtremeGapsError, NumericalError, UnitarityError, ValidationError
from .gap_prob import (
    expected_box_count_cue,
    expected_large_gap_count,
    fredholm_det,
    gap_probability_cue,
    log_gap_probability_cue,
    spacing_density_p2,
    vacuum_prob_gue,
)
from .kernels import KernelHandle, correlation_det, kernel_eval
from .rng import RngStream
from .toda import integrate_toda, predicted_convergence_time, scaling_experiment, toda_rhs
from .zeta import load_zeros, max_gap_report, normalized_gaps, small_gap_histogram

__all__ = [
    "ConvergenceError",
    "EigenangleSet",
    "ExtremeGapsError",
    "KernelHandle",
    "NumericalError",
    "RngStream",
    "Spectrum",
    "TridiagonalMatrix",
    "UnitarityError",
    "ValidationError",
    "correlation_det",
    "eig_sym_tridiagonal",
    "expected_box_count_cue",
    "expected_large_gap_count",
    "fredholm_det",
    "gap_probability_cue",
    "haar_unitary",
    "integrate_toda",
    "kernel_eval",
    "load_zeros",
    "log_gap_probability_cue",
    "max_gap_report",
    "normalized_gaps",
    "predicted_convergence_time",
    "sample_cue_eigenangles",
    "sample_gue_spectrum",
    "sample_gue_tridiagonal",
    "scaling_experiment",
    "small_gap_histogram",
    "spacing_density_p2",
    "toda_rhs",
    "vacuum_prob_gue",
]
