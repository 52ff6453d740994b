"""Tests for domain types and feasible-set enumeration."""

import math

import numpy as np
import pytest

from codedcache.core import (
    CacheConfig,
    FeasibleSet,
    RequestProfile,
    SystemParams,
    enumerate_feasible,
    feasible_count,
    feasible_matrix,
    profile_to_pattern,
)
from codedcache.errors import CapacityError, InfeasibleConfigError, InvalidRequestError


def test_params_validation():
    SystemParams(5, 3, 2)
    with pytest.raises(ValueError):
        SystemParams(0, 3, 2)
    with pytest.raises(ValueError):
        SystemParams(5, 0, 2)
    with pytest.raises(ValueError):
        SystemParams(5, 3, 0)
    with pytest.raises(ValueError):
        SystemParams(5, 3, 6)


def test_config_vector_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 16))
        mask = int(rng.integers(0, 1 << n))
        cfg = CacheConfig(mask, n)
        assert CacheConfig.from_vector(cfg.as_vector()) == cfg
        assert cfg.popcount == bin(mask).count("1")


def test_config_mask_must_fit():
    with pytest.raises(ValueError):
        CacheConfig(1 << 4, 4)


def test_require_feasible():
    p = SystemParams(5, 2, 3)
    CacheConfig(0b10101, 5).require_feasible(p)
    with pytest.raises(InfeasibleConfigError):
        CacheConfig(0b00011, 5).require_feasible(p)


def test_profile_to_pattern_counts_and_distinct():
    p = SystemParams(4, 3, 1)
    pat = profile_to_pattern(RequestProfile((2, 2, 0)), p)
    assert pat.counts == (1, 0, 2, 0)
    assert pat.distinct == (1, 0, 1, 0)


def test_profile_rejects_out_of_range():
    p = SystemParams(4, 2, 1)
    with pytest.raises(InvalidRequestError):
        profile_to_pattern(RequestProfile((0, 4)), p)


@pytest.mark.parametrize("n,m,expected", [
    (10, 3, 968),
    (6, 2, 57),
    (7, 1, 127),
    (5, 3, 16),
])
def test_feasible_count_known_sizes(n, m, expected):
    assert feasible_count(SystemParams(n, 2, m)) == expected


def test_enumeration_matches_count_and_order():
    p = SystemParams(6, 2, 2)
    configs = list(enumerate_feasible(p))
    assert len(configs) == feasible_count(p)
    masks = [c.mask for c in configs]
    assert masks == sorted(masks)
    assert all(c.popcount >= 2 for c in configs)


def test_enumeration_cap():
    p = SystemParams(21, 2, 1)
    with pytest.raises(CapacityError):
        list(enumerate_feasible(p))
    with pytest.raises(CapacityError):
        feasible_matrix(p)


def test_feasible_set_consistency():
    p = SystemParams(5, 3, 2)
    fs = FeasibleSet(p)
    assert len(fs) == feasible_count(p)
    for i in range(len(fs)):
        cfg = fs.config(i)
        assert fs.index_of(cfg.mask) == i
        assert np.array_equal(fs.matrix[i], cfg.as_vector())
        assert fs.popcounts[i] == cfg.popcount
        assert math.isclose(fs.coded_coef[i], cfg.popcount / 2 - 1)


def test_feasible_set_rejects_unknown_mask():
    fs = FeasibleSet(SystemParams(5, 3, 2))
    with pytest.raises(InfeasibleConfigError):
        fs.index_of(0b00001)  # popcount 1 < M


def test_coded_increments_formula():
    p = SystemParams(4, 3, 1)
    fs = FeasibleSet(p)
    x = np.array([2.0, 1.0, 0.0, 0.0])
    inc = fs.coded_increments(x)
    for i in range(len(fs)):
        n = fs.popcounts[i]
        dot = float(fs.matrix[i] @ x)
        assert math.isclose(inc[i], 1.0 - (1.0 - 1.0 / n) ** dot)
