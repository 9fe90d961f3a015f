"""Command-line entry point: ``smcsmooth {run,summarize,tails,hybrid-growth,bench-kernels}``."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ConfigError
from .config import load_config
from .kernels import benchmark_backends, format_benchmark
from .runner import resolve_seed, run_experiment
from .summary import hybrid_growth_report, summarize, tail_report


def _dump(obj, out=None):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_run(args):
    cfg = load_config(args.config)
    seed = resolve_seed(args.seed if args.seed is not None else cfg.seed)
    out = args.out or cfg.output
    if not out:
        raise ConfigError("no output path: pass --out or set output.path in the config")
    records = run_experiment(cfg, seed=seed, out=out, workers=args.workers)
    failed = [r.replicate for r in records if not r.ok]
    print(f"wrote {len(records) - len(failed)} replicates to {out}" + (f" ({len(failed)} failed)" if failed else ""))
    return 0


def _cmd_summarize(args):
    res = summarize(args.inp, window=tuple(args.window) if args.window else None)
    _dump(res, args.out)
    return 0


def _cmd_tails(args):
    res = tail_report(args.inp, t=args.t)
    res.pop("mean_trials")
    _dump(res, args.out)
    return 0


def _cmd_growth(args):
    cfg = load_config(args.config)
    seed = resolve_seed(args.seed if args.seed is not None else cfg.seed)
    _dump(hybrid_growth_report(cfg, seed=seed), args.out)
    return 0


def _cmd_bench(args):
    print(format_benchmark(benchmark_backends(n=args.n, repeat=args.repeat)))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="smcsmooth", description="Particle smoothing experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a replicated experiment")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default=None)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("summarize", help="summarise a results file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--window", type=float, nargs=2, default=None, metavar=("T_MIN", "T_MAX"))
    s.set_defaults(func=_cmd_summarize)

    t = sub.add_parser("tails", help="rejection-time tail diagnostics")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--t", type=int, default=1)
    t.add_argument("--out", default=None)
    t.set_defaults(func=_cmd_tails)

    g = sub.add_parser("hybrid-growth", help="growth of hybrid rejection cost with N")
    g.add_argument("--config", required=True)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_growth)

    b = sub.add_parser("bench-kernels", help="time compiled vs pure-Python kernels")
    b.add_argument("--n", type=int, default=10_000)
    b.add_argument("--repeat", type=int, default=5)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
