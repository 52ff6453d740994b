"""Simulation harness: replay traces, account regret, export CSV.

A run replays one trace under one policy for several perturbation seeds.
The per-slot cost is the analytic expected rate, so the only averaging
is over the perturbation (and whatever randomness produced the trace).
The regret reference is either the best fixed configuration in
hindsight or, for stationary request processes, t times the best
stationary expected rate.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FeasibleSet, SystemParams
from .errors import CodedCacheError
from .oracle import static_oracle
from .policies import (
    FtplState,
    LocalCacheState,
    SwitchSchedule,
    ftpl_step,
    linear_step,
    local_delivery_rate,
    local_ftpl_step,
    local_lru_step,
)
from .traces import Trace

POLICY_IDS = ("ftpl", "linear", "uniform", "local-ftpl", "local-lru")

#: Policies that pick one global configuration per slot (the rest keep
#: per-user caches and use plain uncoded delivery).
GLOBAL_POLICIES = ("ftpl", "linear", "uniform")


@dataclass(frozen=True)
class SimulationRecord:
    """One slot of one seeded run."""

    t: int
    rate: float
    cum_rate: float
    oracle_cum: float
    regret: float
    switched: bool
    config_mask: int


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run bit-for-bit."""

    policy: str
    seeds: tuple
    alpha: float = 1.0
    master_seed: int = 0
    schedule: SwitchSchedule = None  # None means switch every slot
    reference: str = "static"  # "static" or "stochastic"
    stationary_oracle_rate: float = None
    eta_fn: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.policy not in POLICY_IDS:
            raise ValueError(f"unknown policy {self.policy!r}, expected one of {POLICY_IDS}")
        if not self.seeds:
            raise ValueError("seed list must be non-empty")
        if self.reference not in ("static", "stochastic"):
            raise ValueError(f"unknown regret reference {self.reference!r}")
        if self.reference == "stochastic" and self.stationary_oracle_rate is None:
            raise ValueError("stochastic reference needs stationary_oracle_rate")


@dataclass(frozen=True)
class SimulationResult:
    policy: str
    cfg: RunConfig
    params: SystemParams
    per_seed: tuple  # one tuple of SimulationRecord per seed, cfg.seeds order
    mean_regret: np.ndarray
    stderr_regret: np.ndarray
    mean_switches: np.ndarray  # cumulative switch count, averaged over seeds
    stderr_switches: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.mean_regret)


def _oracle_cumulative(trace: Trace, cfg: RunConfig, feasible: FeasibleSet) -> np.ndarray:
    """Reference cumulative cost at every t, per the configured regret notion."""
    if cfg.reference == "stochastic":
        t = np.arange(1, len(trace) + 1, dtype=np.float64)
        return t * cfg.stationary_oracle_rate
    best = static_oracle(trace, feasible).best_config
    idx = feasible.index_of(best.mask)
    x, y = trace.patterns()
    per_slot = _config_rates(feasible, idx, x, y)
    return np.cumsum(per_slot)


def _config_rates(fs: FeasibleSet, idx: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-slot expected rate of one fixed configuration over a whole trace."""
    row = fs.matrix[idx]
    uncoded = y.sum(axis=1) - y @ row
    coded = fs.coded_coef[idx] * (1.0 - fs.decay_base[idx] ** (x @ row))
    return uncoded + coded


def _slot_rate(fs: FeasibleSet, idx: int, x_t: np.ndarray, y_t: np.ndarray) -> float:
    row = fs.matrix[idx]
    uncoded = y_t.sum() - y_t @ row
    coded = fs.coded_coef[idx] * (1.0 - fs.decay_base[idx] ** (x_t @ row))
    return float(uncoded + coded)


def _run_global_seed(trace, cfg, fs, schedule, rng, x, y, oracle_cum):
    """One seeded run of a global-configuration policy."""
    T = len(trace)
    state = FtplState(trace.params, cfg.alpha, rng, eta_fn=cfg.eta_fn, feasible=fs)
    step = ftpl_step if cfg.policy == "ftpl" else linear_step
    all_ones_idx = fs.index_of((1 << trace.params.n_files) - 1)
    records = []
    cum = 0.0
    prev_idx = None
    for t in range(1, T + 1):
        if cfg.policy == "uniform":
            idx = all_ones_idx
        else:
            step(state, x[t - 2] if t >= 2 else None, t, schedule)
            idx = state.current_index
        rate = _slot_rate(fs, idx, x[t - 1], y[t - 1])
        cum += rate
        switched = prev_idx is not None and idx != prev_idx
        records.append(SimulationRecord(
            t, rate, cum, float(oracle_cum[t - 1]), cum - float(oracle_cum[t - 1]),
            switched, int(fs.masks[idx]),
        ))
        prev_idx = idx
    return tuple(records)


def _run_local_seed(trace, cfg, rng, oracle_cum):
    """One seeded run of a per-user-cache benchmark policy."""
    T = len(trace)
    state = LocalCacheState(trace.params, rng if cfg.policy == "local-ftpl" else None)
    records = []
    cum = 0.0
    prev_caches = None
    for t in range(1, T + 1):
        r_prev = trace.slots[t - 2] if t >= 2 else None
        if cfg.policy == "local-ftpl":
            local_ftpl_step(state, r_prev, t, cfg.alpha)
        else:
            local_lru_step(state, r_prev)
        rate = local_delivery_rate(state, trace.slots[t - 1])
        cum += rate
        switched = prev_caches is not None and state.caches != prev_caches
        records.append(SimulationRecord(
            t, rate, cum, float(oracle_cum[t - 1]), cum - float(oracle_cum[t - 1]),
            switched, 0,
        ))
        prev_caches = list(state.caches)
    return tuple(records)


def run_simulation(trace: Trace, cfg: RunConfig,
                   feasible: FeasibleSet = None) -> SimulationResult:
    """Replay the trace once per seed and aggregate regret and switches.

    Each seed gets an independent generator derived from
    (master_seed, seed), so seeds can run in any order with identical
    results.
    """
    T = len(trace)
    schedule = cfg.schedule if cfg.schedule is not None else SwitchSchedule.all_slots(T)
    fs = feasible
    if fs is None and (cfg.policy in GLOBAL_POLICIES or cfg.reference == "static"):
        # Local policies with a stationary reference never enumerate
        # configurations, so they work above the enumeration cap.
        fs = FeasibleSet(trace.params)
    x, y = trace.patterns()
    oracle_cum = _oracle_cumulative(trace, cfg, fs)

    per_seed = []
    for seed in cfg.seeds:
        rng = np.random.default_rng([cfg.master_seed, seed])
        if cfg.policy in GLOBAL_POLICIES:
            per_seed.append(_run_global_seed(trace, cfg, fs, schedule, rng, x, y, oracle_cum))
        else:
            per_seed.append(_run_local_seed(trace, cfg, rng, oracle_cum))

    regret = np.array([[rec.regret for rec in run] for run in per_seed])
    switches = np.array([
        np.cumsum([1.0 if rec.switched else 0.0 for rec in run]) for run in per_seed
    ])
    n = len(cfg.seeds)
    scale = math.sqrt(n) if n > 1 else 1.0
    ddof = 1 if n > 1 else 0
    return SimulationResult(
        cfg.policy, cfg, trace.params, tuple(per_seed),
        regret.mean(axis=0), regret.std(axis=0, ddof=ddof) / scale,
        switches.mean(axis=0), switches.std(axis=0, ddof=ddof) / scale,
    )


def compare_policies(trace: Trace, cfgs) -> dict:
    """Average regret per slot, keyed by (policy, t), on a shared oracle."""
    fs = FeasibleSet(trace.params)
    table = {}
    for cfg in cfgs:
        result = run_simulation(trace, cfg, fs)
        t = np.arange(1, result.horizon + 1)
        for ti, v in zip(t, result.mean_regret / t):
            table[(cfg.policy, int(ti))] = float(v)
    return table


CSV_HEADER = "t,policy,seed,rate,cum_rate,oracle_cum,regret,switched,config_hex"


def export_csv(results, path, comments=()):
    """Write runs to CSV, rows ordered by (policy, seed, t).

    Floats use 12 significant digits; lines starting with '#' carry the
    resolved run configuration so the file is self-describing.
    """
    lines = [f"# {c}" for c in comments]
    for result in results:
        cfg = result.cfg
        if cfg.schedule is None:
            sched = "all"
        else:
            ts = cfg.schedule.slots
            sched = f"{len(ts)}slots:{ts[0]}..{ts[-1]}"
        lines.append(
            f"# run policy={cfg.policy} alpha={cfg.alpha:.12g} master_seed={cfg.master_seed}"
            f" seeds={','.join(str(s) for s in cfg.seeds)} reference={cfg.reference}"
            f" schedule={sched}"
        )
    lines.append(CSV_HEADER)
    for result in results:
        for seed, run in zip(result.cfg.seeds, result.per_seed):
            for rec in run:
                lines.append(
                    f"{rec.t},{result.policy},{seed},{rec.rate:.12g},{rec.cum_rate:.12g},"
                    f"{rec.oracle_cum:.12g},{rec.regret:.12g},{1 if rec.switched else 0},"
                    f"{rec.config_mask:x}"
                )
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise CodedCacheError(f"cannot write {path}: {exc}") from exc
