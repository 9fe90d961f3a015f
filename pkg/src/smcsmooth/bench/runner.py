"""Replicated experiment runs and their CSV serialisation.

Results file layout: a block of ``# key: json`` metadata lines, then a CSV
table with columns ``replicate, t, estimate, ess, cost, meet``. ``cost`` is
the number of transition-density evaluations spent by the backward kernel at
step ``t`` (filtering-pass work is not counted); ``meet`` is the coupling
success rate for ITR/ITRC and empty otherwise. Wall-clock times go to a
``.timing.json`` sidecar so the results file itself is deterministic.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigError, SMCError
from ..seeding import FILTER, make_rng
from ..smoothers import run_offline, run_online
from .config import ExperimentConfig, build_problem

COLUMNS = ("replicate", "t", "estimate", "ess", "cost", "meet")
FORMAT_TAG = "smcsmooth-results v1"


@dataclass
class RunRecord:
    replicate: int
    estimate: np.ndarray
    ess: np.ndarray
    cost: np.ndarray
    meet: np.ndarray
    wall_time: float = 0.0
    error: str | None = None

    @property
    def total_cost(self):
        return int(np.sum(self.cost))

    @property
    def ok(self):
        return self.error is None


def resolve_seed(seed):
    env = os.environ.get("SMCSMOOTH_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"SMCSMOOTH_SEED must be an integer, got {env!r}") from None
    return int(seed)


@lru_cache(maxsize=4)
def _problem(model_json, T, seed):
    return build_problem(json.loads(model_json), T, seed)


def run_replicate(cfg, seed, replicate):
    """Run one replicate. Failures are captured in the record instead of raised."""
    problem = _problem(json.dumps(cfg.model, sort_keys=True), cfg.T, seed)
    rng = make_rng(seed, FILTER, replicate)
    start = time.perf_counter()
    try:
        if cfg.mode == "online":
            run = run_online(problem.fk, cfg.N, problem.fn, rng, cfg.options)
        else:
            run = run_offline(problem.fk, cfg.N, problem.fn, rng, cfg.options, cfg.n_traj, max_storage=cfg.max_storage)
        if not np.all(np.isfinite(run.estimate)):
            raise SMCError("non-finite additive estimate")
    except SMCError as exc:
        T = cfg.T
        nan = np.full(T + 1, np.nan)
        return RunRecord(replicate, nan, nan, np.zeros(T + 1, dtype=np.int64), nan,
                         time.perf_counter() - start, f"{type(exc).__name__}: {exc}")
    return RunRecord(replicate, run.estimate, run.ess, run.cost, run.meet, time.perf_counter() - start)


def _run_one(args):
    cfg_json, seed, rep = args
    return run_replicate(ExperimentConfig(**json.loads(cfg_json)), seed, rep)


def run_experiment(cfg, seed=None, out=None, workers=1):
    """Run all replicates (in parallel when ``workers > 1``) and optionally write the results file."""
    seed = resolve_seed(cfg.seed if seed is None else seed)
    jobs = [(cfg.to_json(), seed, r) for r in range(cfg.replicates)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_one, jobs))
    else:
        records = [run_replicate(cfg, seed, r) for r in range(cfg.replicates)]
    records.sort(key=lambda r: r.replicate)
    out = out or cfg.output
    if out:
        write_results(out, cfg, seed, records)
    return records


def _fmt(x):
    x = float(x)
    return "" if np.isnan(x) else repr(x)


def write_results(path, cfg, seed, records):
    problem = _problem(json.dumps(cfg.model, sort_keys=True), cfg.T, seed)
    meta = {
        "format": FORMAT_TAG,
        "seed": seed,
        "config": json.loads(cfg.to_json()),
        "reference": None if problem.reference is None else [float(v) for v in problem.reference],
        "failed": {str(r.replicate): r.error for r in records if not r.ok},
    }
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True, separators=(',', ':'))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        if not r.ok:
            continue
        for t in range(len(r.estimate)):
            w.writerow([r.replicate, t, _fmt(r.estimate[t]), _fmt(r.ess[t]), int(r.cost[t]), _fmt(r.meet[t])])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    with open(str(path) + ".timing.json", "w") as fh:
        json.dump({str(r.replicate): r.wall_time for r in records}, fh, indent=1)


def read_results(path):
    """Parse a results file into ``(meta, records)``."""
    meta = {}
    lines = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(":")
                try:
                    meta[key.strip()] = json.loads(val)
                except json.JSONDecodeError:
                    raise ValueError(f"malformed metadata line: {line.strip()!r}") from None
            else:
                lines.append(line)
    if meta.get("format") != FORMAT_TAG:
        raise ValueError(f"{path} is not a results file")
    reader = csv.reader(lines)
    header = next(reader, None)
    if tuple(header or ()) != COLUMNS:
        raise ValueError(f"unexpected columns {header!r}")
    rows = {}
    for row in reader:
        if len(row) != len(COLUMNS):
            raise ValueError(f"malformed record {row!r}")
        rep, t = int(row[0]), int(row[1])
        vals = [float(v) if v else np.nan for v in row[2:4]] + [int(row[4]), float(row[5]) if row[5] else np.nan]
        rows.setdefault(rep, []).append((t, vals))
    records = []
    for rep in sorted(rows):
        entries = sorted(rows[rep])
        if [t for t, _ in entries] != list(range(len(entries))):
            raise ValueError(f"replicate {rep} has missing time steps")
        arr = np.array([v for _, v in entries], dtype=float)
        records.append(RunRecord(rep, arr[:, 0], arr[:, 1], arr[:, 2].astype(np.int64), arr[:, 3]))
    return meta, records
