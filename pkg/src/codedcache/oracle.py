"""Exact static oracles.

The hindsight oracle minimizes the cumulative expected rate of a fixed
configuration over a whole trace; it is exact (full enumeration of the
feasible set), since regret against an approximate oracle would be
meaningless.  The stochastic oracle minimizes the closed-form expected
per-slot rate under stationary per-user preferences and reports the
optimality gap of every configuration.
"""

from dataclasses import dataclass

import numpy as np

from .core import CacheConfig, FeasibleSet, SystemParams
from .errors import DegenerateGapError
from .traces import PreferenceProfile, Trace


@dataclass(frozen=True)
class OracleResult:
    best_config: CacheConfig
    best_cumulative: float
    per_config_cumulative: dict  # mask -> cumulative rate


@dataclass(frozen=True)
class GapTable:
    gaps: dict  # mask -> Delta_s
    oracle_value: float
    oracle_config: CacheConfig


def cumulative_rates(trace: Trace, feasible: FeasibleSet = None) -> np.ndarray:
    """Cumulative expected rate of every feasible configuration.

    Single accumulator pass: the uncoded part only needs the summed
    distinct vector, the coded part one scalar accumulator per config.
    """
    fs = feasible if feasible is not None else FeasibleSet(trace.params)
    x, y = trace.patterns()
    y_total = y.sum(axis=0)
    uncoded = y_total.sum() - fs.matrix @ y_total
    coded_acc = np.zeros(len(fs))
    for t in range(len(trace)):
        coded_acc += fs.coded_increments(x[t])
    return uncoded + fs.coded_coef * coded_acc


def static_oracle(trace: Trace, feasible: FeasibleSet = None) -> OracleResult:
    """Best fixed configuration in hindsight; ties go to the smallest mask."""
    fs = feasible if feasible is not None else FeasibleSet(trace.params)
    totals = cumulative_rates(trace, fs)
    best = int(np.argmin(totals))
    per_config = {int(m): float(v) for m, v in zip(fs.masks, totals)}
    return OracleResult(fs.config(best), float(totals[best]), per_config)


def stochastic_expected_rate(s: CacheConfig, prefs: PreferenceProfile,
                             params: SystemParams) -> float:
    """Closed-form expectation of the per-slot rate under i.i.d. requests.

    Uncoded: file j outside s is broadcast iff someone requests it,
    probability 1 - prod_k (1 - p_k(j)).  Coded: the number of users
    requesting stored files is a sum of independent Bernoulli(q_k) with
    q_k = sum_{j in s} p_k(j), so the expectation of the decay term
    factorizes into prod_k (1 - q_k M/n).
    """
    s.require_feasible(params)
    P = prefs.as_matrix()
    sv = s.as_vector().astype(np.float64)
    n = s.popcount
    m = params.cache_size
    p_nobody = np.prod(1.0 - P, axis=0)  # per file: nobody requests it
    uncoded = float(((1.0 - sv) * (1.0 - p_nobody)).sum())
    q = P @ sv  # per user: probability of requesting a stored file
    coded = (n / m - 1.0) * (1.0 - float(np.prod(1.0 - q * m / n)))
    return uncoded + coded


def stochastic_rates(prefs: PreferenceProfile, params: SystemParams,
                     feasible: FeasibleSet = None) -> np.ndarray:
    """Vectorized stochastic_expected_rate over the whole feasible set."""
    fs = feasible if feasible is not None else FeasibleSet(params)
    P = prefs.as_matrix()
    m = params.cache_size
    p_nobody = np.prod(1.0 - P, axis=0)
    uncoded = (1.0 - p_nobody).sum() - fs.matrix @ (1.0 - p_nobody)
    q = P @ fs.matrix.T  # (K, |S|)
    coded = fs.coded_coef * (1.0 - np.prod(1.0 - q * (m / fs.popcounts), axis=0))
    return uncoded + coded


def stochastic_oracle(prefs: PreferenceProfile, params: SystemParams,
                      feasible: FeasibleSet = None) -> GapTable:
    """Exhaustive minimization plus per-configuration gaps Delta_s."""
    fs = feasible if feasible is not None else FeasibleSet(params)
    rates = stochastic_rates(prefs, params, fs)
    best = int(np.argmin(rates))
    value = float(rates[best])
    gaps = {int(m): float(r - value) for m, r in zip(fs.masks, rates)}
    return GapTable(gaps, value, fs.config(best))


def require_unique_optimum(table: GapTable, tol: float = 0.0):
    """Raise when any non-optimal configuration ties the optimum."""
    best_mask = table.oracle_config.mask
    for mask, gap in table.gaps.items():
        if mask != best_mask and gap <= tol:
            raise DegenerateGapError(
                f"configuration {mask:#x} ties the optimum (gap {gap})"
            )
