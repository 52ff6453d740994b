"""Command-line front end.

Subcommands: ingest (ratings file to trace), gen (synthetic traces),
simulate (policy replay to CSV), oracle (best fixed configuration),
bounds (theoretical envelopes to CSV).  Usage mistakes exit with 2,
domain errors with 1, success with 0.
"""

import argparse
import os
import sys

from . import bounds as bounds_mod
from .core import SystemParams, feasible_count
from .errors import CodedCacheError, ScheduleError
from .harness import RunConfig, export_csv, run_simulation
from .oracle import static_oracle, stochastic_oracle
from .policies import SwitchSchedule
from .traces import (
    gen_adversarial_cycle,
    gen_stochastic,
    ingest_ratings,
    read_trace,
    write_trace,
    zipf_preferences,
)

ENV_SEED = "CODEDCACHE_SEED"


def _default_seed() -> int:
    return int(os.environ.get(ENV_SEED, "0"))


def _parse_schedule(text: str, horizon: int) -> SwitchSchedule:
    if text == "all":
        return SwitchSchedule.all_slots(horizon)
    if text.startswith("every:"):
        try:
            gap = int(text.split(":", 1)[1])
        except ValueError:
            raise ScheduleError(f"bad schedule gap in {text!r}")
        return SwitchSchedule.every(gap, horizon)
    if text.startswith("file:"):
        path = text.split(":", 1)[1]
        with open(path, "r", encoding="utf-8") as fh:
            slots = tuple(int(tok) for tok in fh.read().split())
        return SwitchSchedule(slots)
    raise ScheduleError(f"unknown schedule spec {text!r}")


def _add_system_flags(p):
    p.add_argument("--n", type=int, required=True, help="catalog size N")
    p.add_argument("--k", type=int, required=True, help="number of users K")
    p.add_argument("--m", type=int, required=True, help="per-user cache size M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codedcache")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a trace from a ratings file")
    _add_system_flags(p)
    p.add_argument("--ratings", required=True)
    p.add_argument("--min-requests", type=int, default=1000)
    p.add_argument("--delimiter", default="::")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen", help="generate a synthetic trace")
    gsub = p.add_subparsers(dest="kind", required=True)
    ps = gsub.add_parser("stochastic", help="i.i.d. requests from Zipf preferences")
    _add_system_flags(ps)
    ps.add_argument("--zipf", type=float, default=1.0, help="Zipf exponent")
    ps.add_argument("--horizon", type=int, required=True)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--out", required=True)
    pc = gsub.add_parser("cycle", help="cyclic trace defeating the linearized policy")
    pc.add_argument("--k", type=int, required=True, help="repeats of the common profile per cycle")
    pc.add_argument("--cycles", type=int, required=True)
    pc.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="replay a trace under a policy")
    p.add_argument("--policy", required=True,
                   choices=["ftpl", "linear", "uniform", "local-ftpl", "local-lru"])
    p.add_argument("--trace", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seeds", type=int, default=20, help="number of perturbation seeds")
    p.add_argument("--master-seed", type=int, default=None)
    p.add_argument("--schedule", default="all", help="all | every:<gap> | file:<path>")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="best fixed configuration in hindsight")
    p.add_argument("--trace", required=True)

    p = sub.add_parser("bounds", help="evaluate a theoretical envelope to CSV")
    p.add_argument("--kind", required=True, choices=["t1", "t2", "t3", "stoch"])
    _add_system_flags(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--schedule", default="all")
    p.add_argument("--zipf", type=float, default=1.0,
                   help="Zipf exponent for the stochastic gap table")
    p.add_argument("--gw-samples", type=int, default=10000,
                   help="Monte-Carlo samples for the perturbation-width estimate")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    return parser


def _cmd_ingest(args) -> int:
    params = SystemParams(args.n, args.k, args.m)
    seed = args.seed if args.seed is not None else _default_seed()
    trace = ingest_ratings(args.ratings, params, min_requests=args.min_requests,
                           delimiter=args.delimiter, seed=seed)
    write_trace(trace, args.out)
    print(f"wrote {len(trace)} slots to {args.out}")
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "stochastic":
        params = SystemParams(args.n, args.k, args.m)
        seed = args.seed if args.seed is not None else _default_seed()
        prefs = zipf_preferences(params, args.zipf)
        trace = gen_stochastic(prefs, params, args.horizon, seed)
    else:
        trace = gen_adversarial_cycle(args.k, args.cycles)
    write_trace(trace, args.out)
    print(f"wrote {len(trace)} slots to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    trace = read_trace(args.trace)
    schedule = _parse_schedule(args.schedule, len(trace))
    master_seed = args.master_seed if args.master_seed is not None else _default_seed()
    cfg = RunConfig(
        policy=args.policy,
        seeds=tuple(range(args.seeds)),
        alpha=args.alpha,
        master_seed=master_seed,
        schedule=schedule,
    )
    result = run_simulation(trace, cfg)
    comments = [
        f"simulate policy={args.policy} trace={args.trace} alpha={args.alpha:.12g}"
        f" seeds={args.seeds} master_seed={master_seed} schedule={args.schedule}"
    ]
    export_csv([result], args.out, comments)
    print(f"wrote {result.horizon * args.seeds} rows to {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    trace = read_trace(args.trace)
    res = static_oracle(trace)
    files = ",".join(str(j) for j in range(trace.params.n_files)
                     if res.best_config.mask >> j & 1)
    print(f"config=0x{res.best_config.mask:x} files={files} "
          f"cumulative={res.best_cumulative:.12g}")
    return 0


def _cmd_bounds(args) -> int:
    params = SystemParams(args.n, args.k, args.m)
    seed = args.seed if args.seed is not None else _default_seed()
    gw, _ = bounds_mod.gaussian_width_estimate(params, args.gw_samples, seed)
    inputs = bounds_mod.BoundInputs(params, args.alpha, gw)
    rows = []
    if args.kind == "t1":
        rows = bounds_mod.unrestricted_regret_bound(inputs, args.horizon).per_t
    elif args.kind == "t2":
        rows = bounds_mod.switching_bound(inputs, args.horizon).per_t
    elif args.kind == "t3":
        schedule = _parse_schedule(args.schedule, args.horizon)
        value = bounds_mod.restricted_regret_bound(inputs, schedule, args.horizon)
        rows = [(args.horizon, value)]
    else:
        prefs = zipf_preferences(params, args.zipf)
        table = stochastic_oracle(prefs, params)
        schedule = _parse_schedule(args.schedule, args.horizon)
        sb = bounds_mod.stochastic_bounds(table, inputs, schedule, args.horizon)
        rows = [(args.horizon, sb.regret)]
        extra = [f"# switches={sb.switches:.12g}", f"# restricted={sb.restricted:.12g}"]
    lines = [f"# bounds kind={args.kind} N={args.n} K={args.k} M={args.m}"
             f" alpha={args.alpha:.12g} cardinality={feasible_count(params)}"
             f" gaussian_width={gw:.12g} seed={seed}"]
    if args.kind == "stoch":
        lines.extend(extra)
    lines.append("t,bound")
    lines.extend(f"{t},{v:.12g}" for t, v in rows)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "gen": _cmd_gen,
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
    "bounds": _cmd_bounds,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScheduleError as exc:
        # A malformed --schedule flag is a usage mistake, not a domain error.
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (CodedCacheError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
