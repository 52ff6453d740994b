"""Turn simulation CSV files into regret-per-slot figures.

Input CSVs come from the simulator's export: one row per (slot, seed)
with columns t, policy, seed, rate, cum_rate, oracle_cum, regret,
switched, config_hex ('#' lines are comments).  Each policy becomes one
curve: the seed mean of R(t)/t with a standard-error band.  An optional
bound CSV (columns t, bound) is drawn dashed on the same axes.
"""

import argparse
from dataclasses import dataclass, field

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

REQUIRED_COLUMNS = ("t", "policy", "seed", "regret")


class RenderError(Exception):
    """Anything that stops a figure from being produced."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple  # CSV paths, at least one
    output: str
    bound: str = None
    log_x: bool = False
    image_format: str = "png"  # "png" or "svg"

    def __post_init__(self):
        if not self.inputs:
            raise RenderError("at least one input CSV is required")
        if self.image_format not in ("png", "svg"):
            raise RenderError(f"unsupported image format {self.image_format!r}")


@dataclass(frozen=True)
class RenderResult:
    output: str
    series: dict  # policy -> (t, mean R(t)/t, stderr of R(t)/t)
    bound: tuple = None  # (t, bound(t)/t) when an overlay was drawn


def _load_runs(path) -> pd.DataFrame:
    try:
        # config_hex mixes digits and letters; read whole columns at once
        # so pandas does not guess chunk-local dtypes.
        df = pd.read_csv(path, comment="#", low_memory=False)
    except (OSError, pd.errors.ParserError) as exc:
        raise RenderError(f"cannot read {path}: {exc}") from exc
    for col in REQUIRED_COLUMNS:
        if col not in df.columns:
            raise RenderError(f"{path}: missing column {col!r}")
    if df.empty:
        raise RenderError(f"{path}: no data rows")
    return df[["t", "policy", "seed", "regret"]]


def _series(df: pd.DataFrame) -> dict:
    out = {}
    for policy, grp in df.groupby("policy", sort=True):
        wide = grp.pivot_table(index="t", columns="seed", values="regret")
        t = wide.index.to_numpy(dtype=np.float64)
        per_slot = wide.to_numpy() / t[:, None]
        mean = per_slot.mean(axis=1)
        n = per_slot.shape[1]
        err = per_slot.std(axis=1, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
        out[str(policy)] = (t, mean, err)
    return out


def _load_bound(path):
    try:
        df = pd.read_csv(path, comment="#")
    except (OSError, pd.errors.ParserError) as exc:
        raise RenderError(f"cannot read {path}: {exc}") from exc
    for col in ("t", "bound"):
        if col not in df.columns:
            raise RenderError(f"{path}: missing column {col!r}")
    if df.empty:
        raise RenderError(f"{path}: no data rows")
    t = df["t"].to_numpy(dtype=np.float64)
    return t, df["bound"].to_numpy(dtype=np.float64) / t


def render(spec: PlotSpec) -> RenderResult:
    """Draw one figure from the spec and return the plotted series."""
    frames = [_load_runs(p) for p in spec.inputs]
    series = _series(pd.concat(frames, ignore_index=True))
    bound = _load_bound(spec.bound) if spec.bound else None

    out = str(spec.output)
    if not out.endswith("." + spec.image_format):
        out = out + "." + spec.image_format

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for policy, (t, mean, err) in sorted(series.items()):
        line, = ax.plot(t, mean, label=policy)
        ax.fill_between(t, mean - err, mean + err,
                        color=line.get_color(), alpha=0.25, linewidth=0)
    if bound is not None:
        ax.plot(bound[0], bound[1], linestyle="--", color="black", label="bound")
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel("horizon t")
    ax.set_ylabel("average regret per slot R(t)/t")
    ax.legend()
    fig.tight_layout()
    try:
        fig.savefig(out, format=spec.image_format, dpi=120)
    finally:
        plt.close(fig)
    return RenderResult(out, series, bound)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="codedcache-plot")
    parser.add_argument("inputs", nargs="+", help="simulation CSV files")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--bound", default=None, help="optional bound CSV overlay")
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--svg", action="store_true", help="write SVG instead of PNG")
    args = parser.parse_args(argv)
    spec = PlotSpec(tuple(args.inputs), args.out, bound=args.bound,
                    log_x=args.log_x, image_format="svg" if args.svg else "png")
    try:
        result = render(spec)
    except RenderError as exc:
        print(f"error: {exc}")
        return 1
    print(f"wrote {result.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
