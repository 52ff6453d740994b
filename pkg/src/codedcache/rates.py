"""Expected transmission-rate model.

For a configuration storing n >= M files and a request pattern x, the
server broadcast has two parts: one uncoded transmission per distinct
requested unstored file, and a coded multicast for the users requesting
stored files whose expected length is

    (n/M - 1) * (1 - (1 - M/n)^<x, s>).

The same rate can be rewritten as an inner product against the shifted
configuration (s - (M/N) 1) plus a configuration-independent offset
h(x) = (1 - M/N) * (number of distinct requested files); the inner term
is what the online policies minimize.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import CacheConfig, RequestPattern, SystemParams


@dataclass(frozen=True)
class RateBreakdown:
    uncoded: float
    coded: float

    @property
    def total(self) -> float:
        return self.uncoded + self.coded


def coded_rate_scalar(n_stored: int, cache_size: int, stored_requests: float) -> float:
    """Expected coded transmission length for n stored files and
    <x, s> users requesting stored files."""
    if n_stored == cache_size or stored_requests == 0:
        return 0.0
    p = cache_size / n_stored
    return (n_stored / cache_size - 1.0) * (1.0 - (1.0 - p) ** stored_requests)


def expected_rate(s: CacheConfig, x: RequestPattern, params: SystemParams) -> RateBreakdown:
    """Per-slot expected rate, uncoded plus coded, in file units."""
    s.require_feasible(params)
    sv = s.as_vector()
    y = x.distinct_array()
    uncoded = float(((1 - sv) * y).sum())
    stored_requests = int((x.counts_array() * sv).sum())
    coded = coded_rate_scalar(s.popcount, params.cache_size, stored_requests)
    return RateBreakdown(uncoded, coded)


def rewrite_rate(s: CacheConfig, x: RequestPattern, params: SystemParams):
    """Shifted-inner-product form of the rate.

    Returns (inner, h, total) with total = inner + h, where
    inner = <s - (M/N) 1, f(x, s) - y> and h = (1 - M/N) <y, 1>.
    Agrees with expected_rate to floating-point tolerance.
    """
    s.require_feasible(params)
    n_files, m = params.n_files, params.cache_size
    sv = s.as_vector().astype(np.float64)
    y = x.distinct_array().astype(np.float64)
    n = s.popcount
    stored_requests = int((x.counts_array() * s.as_vector()).sum())
    f_scalar = (1.0 - (1.0 - m / n) ** stored_requests) / m
    f_vec = np.full(n_files, f_scalar)
    shifted = sv - m / n_files
    inner = float(shifted @ (f_vec - y))
    h = (1.0 - m / n_files) * float(y.sum())
    return inner, h, inner + h


def coded_sum_identity(k: int, p: float):
    """Subset-sum and closed-form evaluations of the coded message size.

    lhs = Sum_{u=1}^{k} C(k, u) p^(u-1) (1-p)^(k-u+1)
    rhs = (1/p - 1) (1 - (1-p)^k)

    The two agree analytically; both are returned so tests can compare.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not 0 <= k <= 64:
        raise ValueError(f"k must lie in [0, 64], got {k}")
    lhs = sum(comb(k, u) * p ** (u - 1) * (1.0 - p) ** (k - u + 1) for u in range(1, k + 1))
    rhs = (1.0 / p - 1.0) * (1.0 - (1.0 - p) ** k)
    return lhs, rhs
