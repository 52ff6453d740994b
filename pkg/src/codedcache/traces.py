"""Request traces: generation, ratings ingestion, and on-disk format.

Trace file format (bit-exact): UTF-8 text, LF endings. Line 1 holds
"N K M" as space-separated decimals; each following non-comment line
holds K space-separated zero-based file indices for one slot.  Lines
starting with '#' are comments.
"""

import zlib
from dataclasses import dataclass, field

import numpy as np

from .core import RequestProfile, SystemParams, profile_to_pattern
from .errors import (
    DistributionError,
    InsufficientCatalogError,
    InsufficientUsersError,
    TraceFormatError,
)


@dataclass(frozen=True)
class PreferenceProfile:
    """Per-user request distributions over the N files."""

    per_user: tuple  # K tuples of N probabilities

    def __post_init__(self):
        for k, p in enumerate(self.per_user):
            arr = np.asarray(p, dtype=np.float64)
            if (arr < 0).any():
                raise DistributionError(f"user {k}: negative probability")
            if abs(arr.sum() - 1.0) > 1e-12:
                raise DistributionError(f"user {k}: probabilities sum to {arr.sum()!r}, not 1")

    def as_matrix(self) -> np.ndarray:
        return np.asarray(self.per_user, dtype=np.float64)


@dataclass(frozen=True)
class Trace:
    params: SystemParams
    slots: tuple  # ordered RequestProfile objects
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.slots) < 1:
            raise ValueError("a trace needs at least one slot")
        for r in self.slots:
            if len(r) != self.params.n_users:
                raise ValueError("profile length does not match K")
            profile_to_pattern(r, self.params)  # validates indices

    def __len__(self):
        return len(self.slots)

    def patterns(self):
        """(T, N) count matrix and (T, N) distinct indicator matrix."""
        T, N = len(self.slots), self.params.n_files
        x = np.zeros((T, N), dtype=np.float64)
        for t, r in enumerate(self.slots):
            for j in r.requests:
                x[t, j] += 1
        y = np.minimum(x, 1.0)
        return x, y


def zipf_preferences(params: SystemParams, exponent: float = 1.0) -> PreferenceProfile:
    """Shared Zipf popularity: p(j) proportional to 1/(j+1)^exponent."""
    w = 1.0 / np.arange(1, params.n_files + 1, dtype=np.float64) ** exponent
    p = w / w.sum()
    # Renormalize in float so the profile passes its own sum check.
    p = p / p.sum()
    return PreferenceProfile(tuple(tuple(p) for _ in range(params.n_users)))


def gen_stochastic(prefs: PreferenceProfile, params: SystemParams, horizon: int, seed) -> Trace:
    """Draw each user's request i.i.d. from its preference vector."""
    rng = np.random.default_rng(seed)
    P = prefs.as_matrix()
    if P.shape != (params.n_users, params.n_files):
        raise DistributionError(
            f"preference matrix shape {P.shape} does not match (K, N)="
            f"({params.n_users}, {params.n_files})"
        )
    slots = []
    for _ in range(horizon):
        reqs = tuple(int(rng.choice(params.n_files, p=P[k])) for k in range(params.n_users))
        slots.append(RequestProfile(reqs))
    return Trace(params, tuple(slots), provenance=f"stochastic seed={seed}")


#: Cyclic counterexample geometry: N=7 files A..G, K=4 users, M=1.
CYCLE_PARAMS = SystemParams(n_files=7, n_users=4, cache_size=1)


def gen_adversarial_cycle(k: int, cycles: int) -> Trace:
    """Cyclic trace defeating the linearized policy.

    Each cycle is one slot of requests (A, E, F, G) followed by k slots
    of (A, B, C, D); files A..G are indices 0..6.
    """
    if k < 1 or cycles < 1:
        raise ValueError("k and cycles must both be >= 1")
    odd = RequestProfile((0, 4, 5, 6))
    common = RequestProfile((0, 1, 2, 3))
    slots = ([odd] + [common] * k) * cycles
    return Trace(CYCLE_PARAMS, tuple(slots), provenance=f"cycle k={k} cycles={cycles}")


def ingest_ratings(
    path,
    params: SystemParams,
    min_requests: int = 1000,
    delimiter: str = "::",
    seed=0,
) -> Trace:
    """Build a trace from a (user, item, rating, timestamp) ratings file.

    Items with at least min_requests events form the candidate catalog;
    N of them are picked uniformly at random (seeded).  Original users
    are folded into K virtual users by a stable hash of the user id,
    each virtual user's events are ordered by timestamp, and slot t
    pairs every virtual user's t-th event.  The horizon is the shortest
    virtual stream.
    """
    events = []  # (user, item, timestamp)
    item_counts = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter)
            if len(parts) != 4:
                raise TraceFormatError(
                    f"expected 4 fields separated by {delimiter!r}, got {len(parts)}", lineno
                )
            user, item, _rating, ts = parts
            try:
                ts_val = int(ts)
            except ValueError as exc:
                raise TraceFormatError(f"bad timestamp {ts!r}", lineno) from exc
            events.append((user, item, ts_val))
            item_counts[item] = item_counts.get(item, 0) + 1

    qualifying = sorted(i for i, c in item_counts.items() if c >= min_requests)
    if len(qualifying) < params.n_files:
        raise InsufficientCatalogError(
            f"only {len(qualifying)} items have >= {min_requests} events, need N={params.n_files}"
        )
    rng = np.random.default_rng(seed)
    chosen = [qualifying[i] for i in sorted(rng.choice(len(qualifying), params.n_files, replace=False))]
    file_index = {item: j for j, item in enumerate(chosen)}

    streams = [[] for _ in range(params.n_users)]
    for order, (user, item, ts_val) in enumerate(events):
        j = file_index.get(item)
        if j is None:
            continue
        k = zlib.crc32(user.encode("utf-8")) % params.n_users
        streams[k].append((ts_val, order, j))
    for k, stream in enumerate(streams):
        if not stream:
            raise InsufficientUsersError(f"virtual user {k} has no events")
        stream.sort()

    horizon = min(len(s) for s in streams)
    slots = tuple(
        RequestProfile(tuple(streams[k][t][2] for k in range(params.n_users)))
        for t in range(horizon)
    )
    return Trace(params, slots, provenance=f"ratings {path} seed={seed}")


def write_trace(trace: Trace, path):
    lines = [f"{trace.params.n_files} {trace.params.n_users} {trace.params.cache_size}"]
    for r in trace.slots:
        lines.append(" ".join(str(j) for j in r.requests))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace(path) -> Trace:
    params = None
    slots = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if params is None:
                if len(fields) != 3:
                    raise TraceFormatError("header must be 'N K M'", lineno)
                try:
                    n, k, m = (int(f) for f in fields)
                except ValueError as exc:
                    raise TraceFormatError("non-integer header field", lineno) from exc
                try:
                    params = SystemParams(n, k, m)
                except ValueError as exc:
                    raise TraceFormatError(str(exc), lineno) from exc
                continue
            if len(fields) != params.n_users:
                raise TraceFormatError(
                    f"expected {params.n_users} requests, got {len(fields)}", lineno
                )
            try:
                reqs = tuple(int(f) for f in fields)
            except ValueError as exc:
                raise TraceFormatError("non-integer request index", lineno) from exc
            for j in reqs:
                if not 0 <= j < params.n_files:
                    raise TraceFormatError(f"request index {j} out of range [0, {params.n_files})", lineno)
            slots.append(RequestProfile(reqs))
    if params is None:
        raise TraceFormatError("empty trace file")
    if not slots:
        raise TraceFormatError("trace has no request slots")
    return Trace(params, tuple(slots), provenance=str(path))
