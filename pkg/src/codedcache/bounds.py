"""Numeric evaluators of the regret and switching-cost upper bounds.

Every function here evaluates a closed-form envelope; nothing is proved,
the formulas are simply computed so simulated curves can be checked
against (and plotted under) their theoretical ceilings.  The Gaussian
width of the feasible set enters the adversarial bounds and is estimated
by Monte Carlo.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import FeasibleSet, SystemParams, feasible_count
from .oracle import GapTable, require_unique_optimum
from .policies import SwitchSchedule

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BoundInputs:
    """Constants feeding the bound formulas.

    r_max bounds the per-slot rate and r_max_coded the coded part alone;
    both are at most K (at most one transmission per user) and default
    to it, but can be overridden with trace-measured maxima for tighter
    envelopes.
    """

    params: SystemParams
    alpha: float
    gaussian_width: float
    r_max: float = None
    r_max_coded: float = None
    cardinality: int = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        k = float(self.params.n_users)
        if self.r_max is None:
            object.__setattr__(self, "r_max", k)
        if self.r_max_coded is None:
            object.__setattr__(self, "r_max_coded", k)
        if self.cardinality is None:
            object.__setattr__(self, "cardinality", feasible_count(self.params))
        if not self.r_max_coded <= self.r_max <= k + 1e-12:
            raise ValueError(
                f"need r_max_coded <= r_max <= K, got "
                f"{self.r_max_coded}, {self.r_max}, K={k}"
            )


@dataclass(frozen=True)
class BoundReport:
    """A bound evaluated cumulatively: per_t[i] = (t, value at horizon t)."""

    kind: str
    per_t: tuple

    def final(self) -> float:
        return self.per_t[-1][1]

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.per_t])


def gaussian_width_estimate(params: SystemParams, samples: int, seed) -> tuple:
    """Monte-Carlo estimate of E[max over feasible s of <s, gamma>].

    Returns (mean, std_err).  The exact value is at most N/sqrt(2*pi),
    the width of the full hypercube.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    fs = FeasibleSet(params)
    rng = np.random.default_rng(seed)
    maxima = np.empty(samples)
    # Chunked so the (configs x samples) product stays in cache-friendly sizes.
    chunk = max(1, 10_000_000 // max(1, len(fs)))
    for start in range(0, samples, chunk):
        g = rng.standard_normal((min(chunk, samples - start), params.n_files))
        maxima[start:start + len(g)] = (g @ fs.matrix.T).max(axis=1)
    mean = float(maxima.mean())
    std_err = float(maxima.std(ddof=1) / math.sqrt(samples))
    return mean, std_err


def unrestricted_regret_bound(inputs: BoundInputs, horizon: int,
                              schedule_etas=None) -> BoundReport:
    """Adversarial regret ceiling under unrestricted switching.

    With the default learning rate eta_t = alpha*sqrt(t) the value at
    horizon t is

        3 r_max r_max^C (|S|-1) / (2 sqrt(2 pi) alpha) * Sum 1/sqrt(i)
        + alpha sqrt(t) G + K^2 max{M/N, 1-M/N} / sqrt(2 pi)
          * Sum 1/(alpha sqrt(i)) + alpha G + r_max^C.

    Passing schedule_etas (a length-horizon sequence of eta values for a
    general non-decreasing schedule) replaces both 1/(alpha sqrt(i))
    sums by 1/eta_i and the leading alpha sqrt(t) by eta_t.
    """
    p = inputs.params
    k = p.n_users
    g = inputs.gaussian_width
    card = inputs.cardinality
    ratio = max(p.cache_size / p.n_files, 1.0 - p.cache_size / p.n_files)
    switch_coef = 3.0 * inputs.r_max * inputs.r_max_coded * (card - 1) / (2.0 * SQRT_2PI)
    noise_coef = k * k * ratio / SQRT_2PI
    if schedule_etas is None:
        etas = inputs.alpha * np.sqrt(np.arange(1, horizon + 1, dtype=np.float64))
    else:
        etas = np.asarray(schedule_etas, dtype=np.float64)
        if len(etas) != horizon:
            raise ValueError(f"need {horizon} eta values, got {len(etas)}")
        if (etas <= 0).any() or (np.diff(etas) < 0).any():
            raise ValueError("eta schedule must be positive and non-decreasing")
    inv_eta_cum = np.cumsum(1.0 / etas)
    values = ((switch_coef + noise_coef) * inv_eta_cum + etas * g
              + etas[0] * g + inputs.r_max_coded)
    per_t = tuple((t, float(v)) for t, v in enumerate(values, start=1))
    return BoundReport("unrestricted-regret", per_t)


def switching_bound(inputs: BoundInputs, horizon: int,
                    use_rate_bound: bool = False) -> BoundReport:
    """Expected-switch-count ceiling under unrestricted switching.

    value(t) = 3 c (|S|-1) / (2 sqrt(2 pi) alpha) * Sum_{i<=t} 1/sqrt(i)
    with c = K by default, or c = r_max when use_rate_bound is set.
    """
    c = inputs.r_max if use_rate_bound else float(inputs.params.n_users)
    coef = 3.0 * c * (inputs.cardinality - 1) / (2.0 * SQRT_2PI * inputs.alpha)
    cum = np.cumsum(1.0 / np.sqrt(np.arange(1, horizon + 1, dtype=np.float64)))
    per_t = tuple((t, float(coef * v)) for t, v in enumerate(cum, start=1))
    return BoundReport("switch-count", per_t)


def restricted_regret_bound(inputs: BoundInputs, schedule: SwitchSchedule,
                            horizon: int) -> float:
    """Adversarial regret ceiling when switching only at scheduled slots.

    Unrestricted bound at the horizon plus

        Sum_k 3 K^2 (|S|-1) l_k (l_k - 1)
              / (4 alpha sqrt(pi) sqrt(Sum_{i<k} l_i + 1))

    over the inter-switch gaps l_k; an all-slot schedule makes every
    gap 1 and the extra term vanishes exactly.
    """
    k = float(inputs.params.n_users)
    base = unrestricted_regret_bound(inputs, horizon).final()
    extra = 0.0
    prefix = 0
    for gap in schedule.gaps(horizon):
        extra += (3.0 * k * k * (inputs.cardinality - 1) * gap * (gap - 1)
                  / (4.0 * inputs.alpha * math.sqrt(math.pi) * math.sqrt(prefix + 1)))
        prefix += gap
    return base + extra


@dataclass(frozen=True)
class StochasticBounds:
    regret: float
    switches: float
    restricted: float = None


def stochastic_bounds(gaps: GapTable, inputs: BoundInputs,
                      schedule: SwitchSchedule = None,
                      horizon: int = None) -> StochasticBounds:
    """Constant ceilings for i.i.d. requests, from the gap table.

    regret   = Sum_{s != s*} 64/Delta_s   ((r_max^C)^2 + K^2 + beta)
    switches = Sum_{s != s*} 64/Delta_s^2 ((r_max^C)^2 + K^2 + beta)

    with beta = alpha^2 max{M^2/N, (N-M)^2/N}.  When a schedule and
    horizon are given, the restricted-switching regret ceiling

        r_max l_1 + Sum_k Sum_{s != s*} 2 l_k Delta_s
            (e^{-t_k Delta_s^2 / 32 (r_max^C)^2}
             + e^{-t_k Delta_s^2 / 32 K^2}
             + e^{-t_k Delta_s^2 / 32 beta})

    is evaluated as well, with t_k the k-th switching slot.
    """
    require_unique_optimum(gaps)
    p = inputs.params
    k2 = float(p.n_users) ** 2
    rc2 = inputs.r_max_coded ** 2
    beta = inputs.alpha ** 2 * max(
        p.cache_size ** 2 / p.n_files,
        (p.n_files - p.cache_size) ** 2 / p.n_files,
    )
    deltas = np.array([d for m, d in gaps.gaps.items() if m != gaps.oracle_config.mask])
    const = rc2 + k2 + beta
    regret = float((64.0 / deltas).sum() * const) if len(deltas) else 0.0
    switches = float((64.0 / deltas ** 2).sum() * const) if len(deltas) else 0.0

    restricted = None
    if schedule is not None:
        if horizon is None:
            raise ValueError("restricted evaluation needs a horizon")
        gaps_l = schedule.gaps(horizon)
        restricted = inputs.r_max * gaps_l[0]
        t_k = 0
        for gap in gaps_l:
            t_k += gap
            if len(deltas):
                d2 = deltas ** 2
                tail = (np.exp(-t_k * d2 / (32.0 * rc2))
                        + np.exp(-t_k * d2 / (32.0 * k2))
                        + np.exp(-t_k * d2 / (32.0 * beta)))
                restricted += float((2.0 * gap * deltas * tail).sum())
    return StochasticBounds(regret, switches, restricted)
