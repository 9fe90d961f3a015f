"""Experiment configuration read from TOML files."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigError
from ..models import (
    LinearGaussianFK,
    LotkaVolterraFK,
    LotkaVolterraSDE,
    guarniero_model,
    kalman_filter_smoother,
    scalar_model,
    simulate_lv,
)
from ..seeding import DATA, make_rng
from ..smoothers import SmootherOptions, first_coordinate_sum

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# id -> (guided, online kernel, FFBS sampling method)
ALGORITHMS = {
    "BN": (False, "gt", None),
    "BP": (False, "paris", "pure"),
    "BH": (False, "paris", "hybrid"),
    "BM": (False, "imhp", None),
    "BF": (False, "ffbs", "direct"),
    "GN": (True, "gt", None),
    "GP": (True, "paris", "pure"),
    "GH": (True, "paris", "hybrid"),
    "GM": (True, "imhp", None),
    "GF": (True, "ffbs", "direct"),
    "ITR": (False, "itr", None),
    "ITRC": (False, "itrc", None),
}

_OFFLINE_KERNEL = {"gt": "gt", "paris": "ffbs", "imhp": "imh", "ffbs": "ffbs", "itr": "itr", "itrc": "itrc"}

MODEL_FAMILIES = ("guarniero", "scalar_lg", "lv")
_MODEL_KEYS = {
    "guarniero": {"alpha", "sigma_y2", "dim"},
    "scalar_lg": {"sigma_y", "rho", "sigma_x"},
    "lv": {"n_steps", "floor", "coupler", "beta0", "beta1", "tau0", "tau1"},
}


@dataclass
class ExperimentConfig:
    """One experiment: a model, an algorithm and a replicate budget.

    ``mode`` is ``online`` (additive estimate by forward recursion) or
    ``offline`` (backward trajectories after a stored forward pass).
    """

    algorithm: str
    N: int
    T: int
    replicates: int = 1
    n_tilde: int = 2
    mode: str = "online"
    resampling: str = "systematic"
    seed: int = 0
    n_traj: int | None = None
    max_storage: int = 10**8
    model: dict = field(default_factory=lambda: {"family": "guarniero"})
    output: str | None = None
    growth: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        for name in ("N", "T", "replicates", "n_tilde"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.mode not in ("online", "offline"):
            raise ConfigError(f"mode must be 'online' or 'offline', got {self.mode!r}")
        if self.resampling not in ("multinomial", "systematic", "adjacent"):
            raise ConfigError(f"unknown resampling scheme {self.resampling!r}")
        family = self.model.get("family")
        if family not in MODEL_FAMILIES:
            raise ConfigError(f"model.family must be one of {MODEL_FAMILIES}, got {family!r}")
        unknown = set(self.model) - {"family"} - _MODEL_KEYS[family]
        if unknown:
            raise ConfigError(f"unknown keys for model family {family!r}: {sorted(unknown)}")
        guided, kernel, method = ALGORITHMS[self.algorithm]
        if family == "lv":
            if guided:
                raise ConfigError("the Lotka-Volterra model has no guided proposal")
            if kernel in ("paris", "imhp", "ffbs"):
                raise ConfigError(f"{self.algorithm} needs a tractable transition density, which the LV model lacks")
        if kernel == "itrc" and self.N % 2:
            raise ConfigError("ITRC needs an even number of particles")

    @property
    def options(self):
        guided, kernel, method = ALGORITHMS[self.algorithm]
        if self.mode == "offline":
            kernel = _OFFLINE_KERNEL[kernel]
            method = method or "direct"
        return SmootherOptions(
            kernel=kernel, guided=guided, resampling=self.resampling, n_tilde=self.n_tilde, method=method or "hybrid"
        )

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        exp = dict(d.pop("experiment", {}))
        exp.update({k: v for k, v in d.items() if k not in ("model", "output", "growth")})
        if "model" in d:
            exp["model"] = dict(d["model"])
        if "output" in d:
            out = d["output"]
            exp["output"] = out.get("path") if isinstance(out, dict) else out
            if isinstance(out, dict) and "max_storage" in out:
                exp["max_storage"] = int(out["max_storage"])
        if "growth" in d:
            exp["growth"] = dict(d["growth"])
        known = set(cls.__dataclass_fields__)
        unknown = set(exp) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        missing = {"algorithm", "N", "T"} - set(exp)
        if missing:
            raise ConfigError(f"missing configuration keys: {sorted(missing)}")
        return cls(**exp)


def load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return ExperimentConfig.from_dict(data)


@dataclass
class Problem:
    """A concrete smoothing problem: Feynman-Kac model, additive function and exact answer if known."""

    fk: object
    fn: object
    reference: np.ndarray | None
    states: np.ndarray


def build_problem(model_cfg, T, seed):
    """Simulate data from the data stream of ``seed`` and wrap it in a Feynman-Kac model."""
    cfg = dict(model_cfg)
    family = cfg.pop("family")
    rng = make_rng(seed, DATA, 0)
    if family in ("guarniero", "scalar_lg"):
        if family == "guarniero":
            model = guarniero_model(cfg.get("alpha", 0.4), cfg.get("sigma_y2", 0.5), cfg.get("dim", 2))
        else:
            model = scalar_model(cfg.get("sigma_y", 0.5), cfg.get("rho", 0.5), cfg.get("sigma_x", 1.0))
        x, y = model.simulate(T, rng)
        ref = kalman_filter_smoother(model, y).additive_first_coordinate()
        return Problem(LinearGaussianFK(model, y), first_coordinate_sum(), ref, x)
    params = {k: cfg[k] for k in ("beta0", "beta1", "tau0", "tau1") if k in cfg}
    model = LotkaVolterraSDE(**params)
    n_steps, floor = cfg.get("n_steps", 10), cfg.get("floor", 1e-6)
    x, y, _ = simulate_lv(model, T, rng, n_steps, floor)
    fk = LotkaVolterraFK(model, y, n_steps, floor, cfg.get("coupler", "mlr"))
    return Problem(fk, first_coordinate_sum(offset=100.0), None, x)
