"""Concrete state-space models and exact oracles."""

from .hmm import DiscreteHMM
from .kalman import KalmanResult, ffbs_contraction_k0, kalman_filter_smoother
from .linear_gaussian import (
    LGComponents,
    LinearGaussianFK,
    LinearGaussianModel,
    guarniero_model,
    lg_components,
    scalar_model,
)
from .lotka_volterra import LotkaVolterraFK, LotkaVolterraSDE, lv_euler_components, simulate_lv


def simulate_data(model, T, rng, **kwargs):
    """Forward-simulate states and observations for ``t = 0..T``."""
    if isinstance(model, LotkaVolterraSDE):
        x, y, _ = simulate_lv(model, T, rng, **kwargs)
        return x, y
    return model.simulate(T, rng)


__all__ = [
    "DiscreteHMM",
    "KalmanResult",
    "LGComponents",
    "LinearGaussianFK",
    "LinearGaussianModel",
    "LotkaVolterraFK",
    "LotkaVolterraSDE",
    "ffbs_contraction_k0",
    "guarniero_model",
    "kalman_filter_smoother",
    "lg_components",
    "lv_euler_components",
    "scalar_model",
    "simulate_data",
    "simulate_lv",
]
