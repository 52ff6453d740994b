"""Render average-regret-per-slot figures from simulation CSV files."""

from .render import PlotSpec, RenderError, RenderResult, render

__all__ = ["PlotSpec", "RenderError", "RenderResult", "render"]
