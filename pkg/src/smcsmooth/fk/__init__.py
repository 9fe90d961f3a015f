"""Feynman-Kac models, particle clouds, resampling and filtering."""

from .cloud import ParticleCloud, ess, make_cloud
from .filters import bootstrap_step, guided_step, initial_cloud, log_likelihood, run_filter
from .model import FeynmanKacModel, GaussianTransition, ProposalIsTransition
from .resampling import (
    DiscreteSampler,
    adjacent_resample,
    check_simplex,
    hilbert_sort,
    inverse_cdf_draw,
    multinomial_resample,
    resample,
    systematic_resample,
)

__all__ = [
    "DiscreteSampler",
    "FeynmanKacModel",
    "GaussianTransition",
    "ParticleCloud",
    "ProposalIsTransition",
    "adjacent_resample",
    "bootstrap_step",
    "check_simplex",
    "ess",
    "guided_step",
    "hilbert_sort",
    "initial_cloud",
    "inverse_cdf_draw",
    "log_likelihood",
    "make_cloud",
    "multinomial_resample",
    "resample",
    "run_filter",
    "systematic_resample",
]
