"""Online cache-configuration policies.

The main policy follows the perturbed leader: it tracks the cumulative
distinct-request vector Y_t and, per feasible configuration, the scalar
part of the cumulative coded-rate term, then at every switching slot
picks the configuration minimizing the perturbed historical cost.  The
perturbation vector is sampled once per run and rescaled by eta_t.

Benchmarks: a linearized variant of the same objective, static uniform
coded caching, and two purely local (uncoded) schemes with a shared
broadcast delivery rule.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import CacheConfig, FeasibleSet, RequestPattern, RequestProfile, SystemParams
from .errors import ScheduleError


@dataclass(frozen=True)
class SwitchSchedule:
    """Slots at which the configuration may change; all other slots keep it."""

    slots: tuple

    def __post_init__(self):
        prev = 0
        for t in self.slots:
            if t <= prev:
                raise ScheduleError(f"switching slots must be strictly increasing, got {self.slots}")
            prev = t
        if not self.slots:
            raise ScheduleError("schedule needs at least one switching slot")

    def __contains__(self, t: int) -> bool:
        i = np.searchsorted(self.slots, t)
        return i < len(self.slots) and self.slots[i] == t

    @classmethod
    def all_slots(cls, horizon: int) -> "SwitchSchedule":
        return cls(tuple(range(1, horizon + 1)))

    @classmethod
    def every(cls, gap: int, horizon: int) -> "SwitchSchedule":
        if gap < 1:
            raise ScheduleError(f"schedule gap must be >= 1, got {gap}")
        return cls(tuple(range(1, horizon + 1, gap)))

    def gaps(self, horizon: int):
        """Inter-switch gaps l_k with boundaries t_0 = 0 and t_L = horizon."""
        ts = [t for t in self.slots if t <= horizon]
        if not ts:
            raise ScheduleError("no switching slot within the horizon")
        if ts[-1] != horizon:
            ts.append(horizon)
        prev = 0
        out = []
        for t in ts:
            out.append(t - prev)
            prev = t
        return out


def default_eta(alpha: float):
    """eta_t = alpha * sqrt(t), the standard learning-rate schedule."""
    return lambda t: alpha * math.sqrt(t)


class FtplState:
    """Running state of the perturbed-leader policy.

    Tracks Y_t (cumulative distinct-request vector) and, per feasible
    configuration, the cumulative coded scalar
    Sum_{i<t} (1 - (1 - M/n_s)^<x_i, s>).  The perturbation gamma is
    sampled once from N(0, I_N) before the time loop.
    """

    def __init__(self, params: SystemParams, alpha: float, rng, eta_fn=None,
                 feasible: FeasibleSet = None):
        self.params = params
        self.alpha = alpha
        self.feasible = feasible if feasible is not None else FeasibleSet(params)
        self.gamma = rng.standard_normal(params.n_files)
        self.eta_fn = eta_fn if eta_fn is not None else default_eta(alpha)
        self.cum_distinct = np.zeros(params.n_files)
        self.coded_accumulator = np.zeros(len(self.feasible))
        self.slot = 0
        self.current_index = self.feasible.index_of((1 << params.n_files) - 1)

    @property
    def current_config(self) -> CacheConfig:
        return self.feasible.config(self.current_index)

    def objective(self, t: int) -> np.ndarray:
        """Perturbed cumulative cost of every feasible configuration.

        The configuration-independent (M/N) <1, Ybar> term is dropped.
        """
        ybar = self.cum_distinct - self.eta_fn(t) * self.gamma
        return (self.feasible.coded_coef * self.coded_accumulator
                - self.feasible.matrix @ ybar)

    def ingest(self, x_prev: np.ndarray):
        """Fold the previous slot's request pattern into the accumulators."""
        self.cum_distinct += np.minimum(x_prev, 1.0)
        self.coded_accumulator += self.feasible.coded_increments(x_prev)


def ftpl_select(state: FtplState, t: int) -> int:
    """Argmin of the perturbed objective; first occurrence wins ties,
    which is the smallest mask because enumeration is ascending."""
    return int(np.argmin(state.objective(t)))


def ftpl_step(state: FtplState, x_prev, t: int, schedule: SwitchSchedule) -> CacheConfig:
    """Advance one slot: update accumulators from x_{t-1}, then either
    reselect (switching slot) or keep the previous configuration."""
    if t != state.slot + 1:
        raise ValueError(f"slots must advance one at a time, got t={t} after {state.slot}")
    if t >= 2:
        if x_prev is None:
            raise ValueError("x_prev is required for t >= 2")
        state.ingest(np.asarray(x_prev, dtype=np.float64))
    if t in schedule:
        state.current_index = ftpl_select(state, t)
    state.slot = t
    return state.current_config


def linear_select(state: FtplState, t: int) -> int:
    """Closed-form argmin of the linearized objective.

    Replacing the coded term by its large-<x,s> limit makes the cost
    separable: file j carries coefficient (t-1)/M - Ybar[j].  Include
    every file with a negative coefficient, then pad to popcount M with
    the smallest coefficients (ties by file index).
    """
    m = state.params.cache_size
    ybar = state.cum_distinct - state.eta_fn(t) * state.gamma
    coeff = (t - 1) / m - ybar
    order = np.argsort(coeff, kind="stable")
    chosen = [j for j in range(len(coeff)) if coeff[j] < 0]
    if len(chosen) < m:
        for j in order:
            if coeff[j] >= 0:
                chosen.append(int(j))
            if len(chosen) == m:
                break
    mask = 0
    for j in chosen:
        mask |= 1 << int(j)
    return state.feasible.index_of(mask)


def linear_select_bruteforce(state: FtplState, t: int) -> int:
    """Exhaustive argmin of the same linear objective, for cross-checks."""
    m = state.params.cache_size
    ybar = state.cum_distinct - state.eta_fn(t) * state.gamma
    # The (M/N) <1, Ybar> term is configuration-independent and dropped.
    obj = (t - 1) * (state.feasible.popcounts - m) / m - state.feasible.matrix @ ybar
    return int(np.argmin(obj))


def linear_step(state: FtplState, x_prev, t: int, schedule: SwitchSchedule) -> CacheConfig:
    """Linearized counterpart of ftpl_step (shares state layout)."""
    if t != state.slot + 1:
        raise ValueError(f"slots must advance one at a time, got t={t} after {state.slot}")
    if t >= 2:
        if x_prev is None:
            raise ValueError("x_prev is required for t >= 2")
        state.cum_distinct += np.minimum(np.asarray(x_prev, dtype=np.float64), 1.0)
    if t in schedule:
        state.current_index = linear_select(state, t)
    state.slot = t
    return state.current_config


def uniform_policy(params: SystemParams) -> CacheConfig:
    """Store equal fractions of every file, forever."""
    return CacheConfig.all_ones(params)


class LocalCacheState:
    """Per-user caches for the local (uncoded) benchmarks."""

    def __init__(self, params: SystemParams, rng=None):
        self.params = params
        self.caches = [frozenset() for _ in range(params.n_users)]
        self.counts = np.zeros((params.n_users, params.n_files))
        self.gammas = (rng.standard_normal((params.n_users, params.n_files))
                       if rng is not None else None)
        self.recency = [[] for _ in range(params.n_users)]


def local_ftpl_step(state: LocalCacheState, r_prev, t: int, alpha: float) -> LocalCacheState:
    """Each user caches its M most-requested files after perturbation."""
    k_users, m = state.params.n_users, state.params.cache_size
    if r_prev is not None:
        for k, j in enumerate(r_prev.requests):
            state.counts[k, j] += 1
    eta = alpha * math.sqrt(t)
    for k in range(k_users):
        score = state.counts[k] + eta * state.gammas[k]
        # Stable sort on the negated score keeps equal-score files in
        # index order, giving the smallest-index tie-break.
        top = np.argsort(-score, kind="stable")[:m]
        state.caches[k] = frozenset(int(j) for j in top)
    return state


def local_lru_step(state: LocalCacheState, r_prev) -> LocalCacheState:
    """Each user keeps its M most recently requested distinct files."""
    m = state.params.cache_size
    if r_prev is not None:
        for k, j in enumerate(r_prev.requests):
            rec = state.recency[k]
            if j in rec:
                rec.remove(j)
            rec.append(j)
            del rec[:-m]
            state.caches[k] = frozenset(rec)
    return state


def local_delivery_rate(state: LocalCacheState, r: RequestProfile) -> float:
    """One broadcast per file that some requester is missing."""
    missing = {j for k, j in enumerate(r.requests) if j not in state.caches[k]}
    return float(len(missing))
