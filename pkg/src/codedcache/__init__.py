"""Online coded caching: expected-rate model, policies, oracles, bounds."""

from .core import (
    CacheConfig,
    FeasibleSet,
    RequestPattern,
    RequestProfile,
    SystemParams,
    enumerate_feasible,
    feasible_count,
    profile_to_pattern,
)
from .errors import CodedCacheError
from .oracle import static_oracle, stochastic_expected_rate, stochastic_oracle
from .policies import FtplState, SwitchSchedule, ftpl_step, linear_step
from .rates import expected_rate, rewrite_rate
from .traces import Trace, gen_adversarial_cycle, gen_stochastic, zipf_preferences

__version__ = "0.1.0"

__all__ = [
    "CacheConfig",
    "CodedCacheError",
    "FeasibleSet",
    "FtplState",
    "RequestPattern",
    "RequestProfile",
    "SwitchSchedule",
    "SystemParams",
    "Trace",
    "enumerate_feasible",
    "expected_rate",
    "feasible_count",
    "ftpl_step",
    "gen_adversarial_cycle",
    "gen_stochastic",
    "linear_step",
    "profile_to_pattern",
    "rewrite_rate",
    "static_oracle",
    "stochastic_expected_rate",
    "stochastic_oracle",
    "zipf_preferences",
]
