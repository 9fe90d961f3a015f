"""Summaries of replicated runs: spread growth, costs and rejection-time diagnostics."""

from __future__ import annotations

import numpy as np

from ..backward import CostCounter, paris_kernel
from ..fk import run_filter
from ..seeding import FILTER, make_rng
from .config import ExperimentConfig, build_problem
from .runner import read_results


def slope_fit(t, y):
    """Least-squares slope and intercept of ``log y`` against ``log t`` (points with ``t, y > 0``)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (t > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(np.log(t[keep]), np.log(y[keep]), 1)
    return float(slope), float(intercept)


def bootstrap_se_median(x, n_boot=1000, seed=0):
    """Bootstrap standard error of the median."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    meds = np.median(x[rng.integers(0, x.size, size=(n_boot, x.size))], axis=1)
    return float(meds.std(ddof=1))


def _load(source):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return read_results(source)
    return source


def summarize(source, window=None, n_boot=1000):
    """Per-time spread of the estimates and cost/ESS statistics.

    Parameters
    ----------
    source : path or (meta, records)
    window : (t_min, t_max), optional
        Range for the log-log slope fit of the squared IQR. Defaults to
        ``[T/5, T]``.
    """
    meta, records = _load(source)
    records = [r for r in records if r.ok]
    if len(records) < 2:
        raise ValueError("summarize needs at least two successful replicates")
    cfg = meta.get("config", {})
    E = np.stack([r.estimate for r in records])
    T = E.shape[1] - 1
    N = cfg.get("N", 1)
    q = np.quantile(E, [0.05, 0.25, 0.5, 0.75, 0.95], axis=0)
    sq_iqr = (q[3] - q[1]) ** 2
    t = np.arange(T + 1)
    lo, hi = window if window is not None else (T / 5, T)
    sel = (t >= lo) & (t <= hi)
    slope, intercept = slope_fit(t[sel], sq_iqr[sel])
    cost_nt = np.array([r.cost.sum() / (N * T) for r in records]) if T > 0 else np.zeros(len(records))
    final = E[:, -1]
    out = {
        "algorithm": cfg.get("algorithm"),
        "N": N,
        "T": T,
        "replicates": len(records),
        "failed": meta.get("failed", {}),
        "sq_iqr": sq_iqr.tolist(),
        "quantiles": {str(p): qq.tolist() for p, qq in zip((0.05, 0.25, 0.5, 0.75, 0.95), q)},
        "slope_window": [float(lo), float(hi)],
        "sq_iqr_slope": slope,
        "sq_iqr_intercept": intercept,
        "cost_per_NT_mean": float(cost_nt.mean()),
        "cost_per_NT_median": float(np.median(cost_nt)),
        "ess_mean": np.mean([r.ess for r in records], axis=0).tolist(),
        "final_median": float(np.median(final)),
        "final_median_se": bootstrap_se_median(final, n_boot),
    }
    meets = np.array([np.nanmean(r.meet[1:]) if np.isfinite(r.meet[1:]).any() else np.nan for r in records])
    if np.isfinite(meets).any():
        out["meeting_rate_mean"] = float(np.nanmean(meets))
    ref = meta.get("reference")
    if ref is not None:
        out["reference_final"] = float(ref[-1])
        out["final_error_in_se"] = (out["final_median"] - ref[-1]) / max(out["final_median_se"], 1e-300)
        out["rmse_final"] = float(np.sqrt(np.mean((final - ref[-1]) ** 2)))
    return out


def tail_report(source, t=1):
    """Heavy-tail diagnostics of per-replicate mean trials per particle at step ``t``."""
    meta, records = _load(source)
    records = [r for r in records if r.ok]
    N = meta.get("config", {}).get("N", 1)
    vals = np.array([r.cost[t] / N for r in records], dtype=float)
    med = float(np.median(vals))
    return {
        "t": t,
        "replicates": int(vals.size),
        "mean_trials": vals.tolist(),
        "median": med,
        "mean": float(vals.mean()),
        "max": float(vals.max()),
        "max_over_median": float(vals.max() / med) if med > 0 else float("inf"),
        "exceed_2x": int(np.sum(vals > 2 * med)),
        "exceed_5x": int(np.sum(vals > 5 * med)),
        "exceed_10x": int(np.sum(vals > 10 * med)),
    }


def hybrid_growth_report(cfg, grid=None, draws_per_point=None, seed=None):
    """Mean of ``min(tau, N)`` for PaRIS hybrid draws (one draw per particle) over a grid of ``N``.

    The filter is a bootstrap filter on data simulated once from ``seed``;
    replicate count at each ``N`` is chosen so that every grid point sees
    about ``draws_per_point`` draws.
    """
    if not isinstance(cfg, ExperimentConfig):
        raise TypeError("cfg must be an ExperimentConfig")
    g = cfg.growth
    grid = list(grid or g.get("grid", [100, 1000, 10000]))
    draws_per_point = int(draws_per_point or g.get("draws_per_point", 400_000))
    seed = cfg.seed if seed is None else seed
    problem = build_problem(cfg.model, cfg.T, seed)
    dim = problem.fk.dim
    means, ses = [], []
    for k, N in enumerate(grid):
        reps = max(2, int(np.ceil(draws_per_point / (N * cfg.T))))
        rep_means = []
        for r in range(reps):
            rng = make_rng(seed, FILTER + 1 + k, r)
            counter = CostCounter()
            clouds = run_filter(problem.fk, N, rng, resampling=cfg.resampling)
            for t in range(1, cfg.T + 1):
                paris_kernel(clouds[t - 1], clouds[t], problem.fk, 1, "hybrid", counter, rng)
            rep_means.append(counter.mean_trials())
        rep_means = np.array(rep_means)
        means.append(float(rep_means.mean()))
        ses.append(float(rep_means.std(ddof=1) / np.sqrt(reps)))
    means = np.array(means)
    ses = np.array(ses)
    gamma, _ = slope_fit(grid, means)
    logs = np.log(np.asarray(grid, dtype=float)) ** (dim / 2)
    coef = float(np.dot(logs, means) / np.dot(logs, logs))
    monotone = bool(np.all(np.diff(means) > 0))
    separated = bool(np.all(np.diff(means) > 2 * np.sqrt(ses[1:] ** 2 + ses[:-1] ** 2)))
    return {
        "grid": grid,
        "mean_min_tau_N": means.tolist(),
        "se": ses.tolist(),
        "ci95": [[float(m - 1.96 * s), float(m + 1.96 * s)] for m, s in zip(means, ses)],
        "gamma": gamma,
        "log_power": dim / 2,
        "log_fit_coef": coef,
        "log_fit_ratio": (means / (coef * logs)).tolist(),
        "monotone": monotone,
        "monotone_beyond_ci": separated,
    }
