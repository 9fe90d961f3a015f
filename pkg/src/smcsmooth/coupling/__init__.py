"""Gaussian and SDE-discretisation couplings."""

from .euler import coupled_euler_step, coupled_euler_transition, euler_transition, meeting_times
from .gaussian import (
    COUPLERS,
    CoupledPair,
    common_noise_coupler,
    gaussian_logpdf,
    lindvall_rogers_gaussian,
    maximal_gaussian_coupler,
    mlr_gaussian_coupler,
    rejection_maximal_coupling,
)
from .tv import gaussian_overlap_1d, gaussian_overlap_mc, overlap_1d

__all__ = [
    "COUPLERS",
    "CoupledPair",
    "common_noise_coupler",
    "coupled_euler_step",
    "coupled_euler_transition",
    "euler_transition",
    "gaussian_logpdf",
    "gaussian_overlap_1d",
    "gaussian_overlap_mc",
    "lindvall_rogers_gaussian",
    "maximal_gaussian_coupler",
    "meeting_times",
    "mlr_gaussian_coupler",
    "overlap_1d",
    "rejection_maximal_coupling",
]
