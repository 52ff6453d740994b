"""Tests for the online policies and switching schedules."""

import math

import numpy as np
import pytest

from codedcache.core import FeasibleSet, RequestProfile, SystemParams, profile_to_pattern
from codedcache.errors import ScheduleError
from codedcache.policies import (
    FtplState,
    LocalCacheState,
    SwitchSchedule,
    default_eta,
    ftpl_select,
    ftpl_step,
    linear_select,
    linear_select_bruteforce,
    linear_step,
    local_delivery_rate,
    local_ftpl_step,
    local_lru_step,
    uniform_policy,
)
from codedcache.traces import gen_stochastic, zipf_preferences


def test_schedule_validation():
    SwitchSchedule((1, 5, 9))
    with pytest.raises(ScheduleError):
        SwitchSchedule((5, 5))
    with pytest.raises(ScheduleError):
        SwitchSchedule((3, 1))
    with pytest.raises(ScheduleError):
        SwitchSchedule(())
    with pytest.raises(ScheduleError):
        SwitchSchedule((0, 2))


def test_schedule_membership_and_builders():
    s = SwitchSchedule.every(10, 35)
    assert s.slots == (1, 11, 21, 31)
    assert 11 in s and 12 not in s
    assert SwitchSchedule.all_slots(4).slots == (1, 2, 3, 4)
    with pytest.raises(ScheduleError):
        SwitchSchedule.every(0, 10)


def test_schedule_gaps_include_horizon_tail():
    s = SwitchSchedule((1, 11, 21))
    assert s.gaps(25) == [1, 10, 10, 4]
    assert SwitchSchedule.all_slots(5).gaps(5) == [1, 1, 1, 1, 1]
    with pytest.raises(ScheduleError):
        SwitchSchedule((10,)).gaps(5)


def test_default_eta():
    eta = default_eta(2.0)
    assert eta(1) == 2.0
    assert math.isclose(eta(9), 6.0)


def test_ftpl_initial_state_is_all_ones():
    p = SystemParams(5, 3, 2)
    state = FtplState(p, 1.0, np.random.default_rng(0))
    assert state.current_config.mask == 0b11111
    assert state.slot == 0


def test_ftpl_objective_matches_manual_evaluation():
    p = SystemParams(4, 2, 2)
    fs = FeasibleSet(p)
    state = FtplState(p, 0.5, np.random.default_rng(3), feasible=fs)
    x1 = np.array([1.0, 1.0, 0.0, 0.0])
    x2 = np.array([0.0, 2.0, 0.0, 0.0])
    state.ingest(x1)
    state.ingest(x2)
    t = 3
    obj = state.objective(t)
    ybar = np.minimum(x1, 1) + np.minimum(x2, 1) - 0.5 * math.sqrt(t) * state.gamma
    for i in range(len(fs)):
        n = fs.popcounts[i]
        acc = sum(
            1.0 - (1.0 - 2.0 / n) ** float(fs.matrix[i] @ x) for x in (x1, x2)
        )
        expect = (n / 2.0 - 1.0) * acc - float(fs.matrix[i] @ ybar)
        assert math.isclose(obj[i], expect, rel_tol=1e-12, abs_tol=1e-12)


def test_ftpl_follows_leader_on_constant_costs():
    # With a vanishing perturbation and one profile repeated, the policy
    # settles on the best fixed configuration after one observation.
    p = SystemParams(5, 3, 2)
    state = FtplState(p, 1e-9, np.random.default_rng(1))
    schedule = SwitchSchedule.all_slots(30)
    x = np.array([1.0, 1.0, 1.0, 0.0, 0.0])
    ftpl_step(state, None, 1, schedule)
    for t in range(2, 31):
        cfg = ftpl_step(state, x, t, schedule)
    assert cfg.mask == 0b00111


def test_ftpl_step_requires_sequential_slots():
    p = SystemParams(4, 2, 2)
    state = FtplState(p, 1.0, np.random.default_rng(0))
    schedule = SwitchSchedule.all_slots(5)
    ftpl_step(state, None, 1, schedule)
    with pytest.raises(ValueError):
        ftpl_step(state, np.zeros(4), 3, schedule)
    with pytest.raises(ValueError):
        ftpl_step(state, None, 2, schedule)


def test_ftpl_holds_config_between_switching_slots():
    p = SystemParams(5, 3, 2)
    prefs = zipf_preferences(p)
    tr = gen_stochastic(prefs, p, 40, 2)
    x, _ = tr.patterns()
    state = FtplState(p, 1.0, np.random.default_rng(5))
    schedule = SwitchSchedule.every(7, 40)
    configs = []
    for t in range(1, 41):
        cfg = ftpl_step(state, x[t - 2] if t >= 2 else None, t, schedule)
        configs.append(cfg.mask)
    for t in range(2, 41):
        if t not in schedule:
            assert configs[t - 1] == configs[t - 2]


def test_linear_closed_form_equals_bruteforce():
    p = SystemParams(6, 4, 2)
    fs = FeasibleSet(p)
    rng = np.random.default_rng(8)
    state = FtplState(p, 1.0, rng, feasible=fs)
    for t in (1, 2, 5, 17, 100):
        state.cum_distinct = rng.integers(0, t, 6).astype(np.float64)
        assert linear_select(state, t) == linear_select_bruteforce(state, t)


def test_linear_closed_form_equals_bruteforce_with_ties():
    p = SystemParams(5, 2, 2)
    fs = FeasibleSet(p)
    state = FtplState(p, 1e-12, np.random.default_rng(0), feasible=fs)
    state.cum_distinct = np.array([3.0, 3.0, 3.0, 1.0, 1.0])
    t = 4
    assert linear_select(state, t) == linear_select_bruteforce(state, t)


def test_linear_step_tracks_history():
    p = SystemParams(5, 3, 1)
    state = FtplState(p, 1e-9, np.random.default_rng(2))
    schedule = SwitchSchedule.all_slots(10)
    linear_step(state, None, 1, schedule)
    x = np.array([0.0, 3.0, 0.0, 0.0, 0.0])
    for t in range(2, 11):
        cfg = linear_step(state, x, t, schedule)
    # File 1 was requested every slot: its coefficient is negative.
    assert cfg.mask & 0b00010


def test_uniform_policy_stores_everything():
    p = SystemParams(6, 2, 3)
    assert uniform_policy(p).mask == 0b111111


def test_local_ftpl_caches_top_counts():
    p = SystemParams(4, 2, 2)
    state = LocalCacheState(p, np.random.default_rng(0))
    state.gammas = np.zeros((2, 4))  # deterministic for the check
    local_ftpl_step(state, RequestProfile((0, 3)), 1, 1.0)
    local_ftpl_step(state, RequestProfile((0, 3)), 2, 1.0)
    local_ftpl_step(state, RequestProfile((1, 3)), 3, 1.0)
    assert state.caches[0] == {0, 1}
    assert state.caches[1] == {3, 0}  # ties broken toward smaller index


def test_local_lru_keeps_recent_distinct():
    p = SystemParams(5, 1, 2)
    state = LocalCacheState(p)
    for j in (0, 1, 2, 1):
        local_lru_step(state, RequestProfile((j,)))
    assert state.caches[0] == {2, 1}


def test_local_delivery_counts_missing_files():
    p = SystemParams(4, 3, 1)
    state = LocalCacheState(p)
    state.caches[0] = frozenset({0})
    state.caches[1] = frozenset({1})
    state.caches[2] = frozenset({0})
    # User 0 hits, user 1 misses file 2, user 2 misses file 2 (shared).
    assert local_delivery_rate(state, RequestProfile((0, 2, 2))) == 1.0
    assert local_delivery_rate(state, RequestProfile((1, 0, 3))) == 3.0
