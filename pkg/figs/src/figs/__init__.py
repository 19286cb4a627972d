"""Render belltomo result CSVs into publication-style figures."""

from figs.render import FigureSpec, KINDS, render
from figs.schema import read_per_sigma_csv, read_scan_csv

__all__ = ["FigureSpec", "KINDS", "render", "read_per_sigma_csv", "read_scan_csv"]
