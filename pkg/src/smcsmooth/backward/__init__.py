"""Backward kernels and instrumented backward samplers."""

from .ffbs import (
    draw_ffbs,
    ffbs_kernel,
    ffbs_matrix,
    ffbs_row,
    ffbs_sampling_kernel,
    rejection_backward,
    sample_ffbs_direct,
    sample_ffbs_hybrid,
    sample_ffbs_pure_rejection,
    sample_rows,
)
from .intractable import independent_ancestors, itr_forward_step, itrc_forward_step
from .kernel import BackwardKernel, CostCounter, point_mass_kernel
from .kernels import gt_kernel, imh_backward_sample, imh_chain, imh_kernel, imh_transition_matrix, imhp_kernel, paris_kernel

__all__ = [
    "BackwardKernel",
    "CostCounter",
    "draw_ffbs",
    "ffbs_kernel",
    "ffbs_matrix",
    "ffbs_row",
    "ffbs_sampling_kernel",
    "gt_kernel",
    "imh_backward_sample",
    "imh_chain",
    "imh_kernel",
    "imh_transition_matrix",
    "imhp_kernel",
    "independent_ancestors",
    "itr_forward_step",
    "itrc_forward_step",
    "paris_kernel",
    "point_mass_kernel",
    "rejection_backward",
    "sample_ffbs_direct",
    "sample_ffbs_hybrid",
    "sample_ffbs_pure_rejection",
    "sample_rows",
]
