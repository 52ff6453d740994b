"""Domain types, request-vector transforms, and feasible-set enumeration.

A cache configuration is an N-bit mask (bit j set means file j is a
"stored" file, cached in equal random fractions at every user).  A
configuration is feasible when it stores at least M files; the feasible
set has Sum_{m=M}^{N} C(N, m) members, which is why enumeration is
capped at a configurable N.
"""

from dataclasses import dataclass
from math import comb
from typing import Iterator

import numpy as np

from .errors import CapacityError, InfeasibleConfigError, InvalidRequestError

#: Largest N for which exhaustive enumeration of configurations is allowed.
DEFAULT_ENUMERATION_CAP = 20


@dataclass(frozen=True)
class SystemParams:
    """System size: N files, K users, per-user cache of M files.

    Rates are normalized to units of one file, so the file size F never
    appears.
    """

    n_files: int
    n_users: int
    cache_size: int

    def __post_init__(self):
        if self.n_files < 1:
            raise ValueError(f"n_files must be positive, got {self.n_files}")
        if self.n_users < 1:
            raise ValueError(f"n_users must be positive, got {self.n_users}")
        if not 1 <= self.cache_size <= self.n_files:
            raise ValueError(
                f"cache_size must satisfy 1 <= M <= N, got M={self.cache_size} N={self.n_files}"
            )


@dataclass(frozen=True)
class CacheConfig:
    """Feasible cache configuration: an N-bit mask with popcount >= M."""

    mask: int
    n_files: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.n_files):
            raise ValueError(f"mask {self.mask:#x} does not fit in {self.n_files} bits")

    @property
    def popcount(self) -> int:
        return self.mask.bit_count()

    def as_vector(self) -> np.ndarray:
        """0/1 vector s of length N, index j = bit j."""
        return np.array([(self.mask >> j) & 1 for j in range(self.n_files)], dtype=np.int64)

    @classmethod
    def from_vector(cls, s, n_files=None) -> "CacheConfig":
        s = np.asarray(s)
        n = n_files if n_files is not None else len(s)
        mask = 0
        for j in range(len(s)):
            if s[j]:
                mask |= 1 << j
        return cls(mask, n)

    @classmethod
    def all_ones(cls, params: SystemParams) -> "CacheConfig":
        return cls((1 << params.n_files) - 1, params.n_files)

    def require_feasible(self, params: SystemParams):
        if self.popcount < params.cache_size:
            raise InfeasibleConfigError(
                f"config stores {self.popcount} files, need at least M={params.cache_size}"
            )


@dataclass(frozen=True)
class RequestProfile:
    """One request per user: a length-K tuple of file indices."""

    requests: tuple

    def __len__(self):
        return len(self.requests)


@dataclass(frozen=True)
class RequestPattern:
    """Per-file request counts x and the distinct-request indicator y."""

    counts: tuple
    distinct: tuple

    def counts_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    def distinct_array(self) -> np.ndarray:
        return np.asarray(self.distinct, dtype=np.int64)


def profile_to_pattern(r: RequestProfile, params: SystemParams) -> RequestPattern:
    """Count requests per file and mark which files were requested at all."""
    counts = [0] * params.n_files
    for k, j in enumerate(r.requests):
        if not 0 <= j < params.n_files:
            raise InvalidRequestError(
                f"user {k} requested file {j}, catalog has {params.n_files} files"
            )
        counts[j] += 1
    distinct = tuple(min(c, 1) for c in counts)
    return RequestPattern(tuple(counts), distinct)


def enumerate_feasible(
    params: SystemParams, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[CacheConfig]:
    """Yield every feasible configuration in ascending mask order."""
    n, m = params.n_files, params.cache_size
    if n > cap:
        raise CapacityError(f"N={n} exceeds the enumeration cap {cap}")
    for mask in range(1 << n):
        if mask.bit_count() >= m:
            yield CacheConfig(mask, n)


def feasible_count(params: SystemParams) -> int:
    """|S| = Sum_{m=M}^{N} C(N, m), without enumerating."""
    n, m = params.n_files, params.cache_size
    return sum(comb(n, j) for j in range(m, n + 1))


class FeasibleSet:
    """Dense feasible set with per-config constants for vectorized scans.

    Configurations appear in ascending mask order, so argmin with
    first-occurrence tie-breaking selects the smallest mask.
    """

    def __init__(self, params: SystemParams, cap: int = DEFAULT_ENUMERATION_CAP):
        self.params = params
        self.masks, self.matrix = feasible_matrix(params, cap)
        self.popcounts = self.matrix.sum(axis=1)
        m = params.cache_size
        self.coded_coef = self.popcounts / m - 1.0  # n/M - 1
        self.decay_base = 1.0 - m / self.popcounts  # 1 - M/n

    def __len__(self):
        return len(self.masks)

    def config(self, index: int) -> CacheConfig:
        return CacheConfig(int(self.masks[index]), self.params.n_files)

    def index_of(self, mask: int) -> int:
        i = int(np.searchsorted(self.masks, mask))
        if i >= len(self.masks) or self.masks[i] != mask:
            raise InfeasibleConfigError(f"mask {mask:#x} is not feasible")
        return i

    def coded_increments(self, x: np.ndarray) -> np.ndarray:
        """Per-config scalar 1 - (1 - M/n)^<x, s> for one request pattern."""
        return 1.0 - self.decay_base ** (self.matrix @ x)


def feasible_matrix(params: SystemParams, cap: int = DEFAULT_ENUMERATION_CAP):
    """Dense view of the feasible set for vectorized per-config scans.

    Returns (masks, S) where masks is the ascending list of mask values and
    S is the |S| x N 0/1 matrix with S[i, j] = bit j of masks[i].
    """
    n = params.n_files
    if n > cap:
        raise CapacityError(f"N={n} exceeds the enumeration cap {cap}")
    all_masks = np.arange(1 << n, dtype=np.int64)
    bits = (all_masks[:, None] >> np.arange(n)) & 1
    keep = bits.sum(axis=1) >= params.cache_size
    return all_masks[keep], bits[keep].astype(np.float64)
