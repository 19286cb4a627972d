"""Readers for the belltomo CSV schemas.

Two table shapes exist: single-analyzer scans (theta, mean_count, std_count,
theory_count) and per-sigma sweep aggregates (scenario_id, sigma, f_mean,
f_std, c_mean, c_std, n_nonconverged). A comparison CSV is a per-sigma table
holding several scenario_ids. Schema violations raise ValueError naming the
offending column.
"""
import csv
from dataclasses import dataclass

import numpy as np

SCAN_HEADER = ("theta", "mean_count", "std_count", "theory_count")
PER_SIGMA_HEADER = ("scenario_id", "sigma", "f_mean", "f_std", "c_mean", "c_std", "n_nonconverged")


@dataclass(frozen=True)
class ScanTable:
    """One scan CSV: counts versus analyzer angle with spread and theory."""

    theta: np.ndarray
    mean_count: np.ndarray
    std_count: np.ndarray
    theory_count: np.ndarray


@dataclass(frozen=True)
class SweepSeries:
    """Per-sigma aggregates of one scenario from a sweep or comparison CSV."""

    scenario_id: str
    sigma: np.ndarray
    f_mean: np.ndarray
    f_std: np.ndarray
    c_mean: np.ndarray
    c_std: np.ndarray
    n_nonconverged: np.ndarray


def _read_rows(path, expected_header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected header {','.join(expected_header)}")
        if len(header) != len(expected_header):
            raise ValueError(
                f"{path}: expected {len(expected_header)} columns, found {len(header)}"
            )
        for i, (want, got) in enumerate(zip(expected_header, header)):
            if want != got:
                raise ValueError(f"{path}: expected column '{want}' at position {i}, found '{got}'")
        rows = []
        for n, row in enumerate(reader, start=2):
            if len(row) != len(expected_header):
                raise ValueError(f"{path} line {n}: expected {len(expected_header)} cells, found {len(row)}")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _column(path, rows, header, name):
    i = header.index(name)
    out = np.empty(len(rows))
    for n, row in enumerate(rows):
        try:
            out[n] = float(row[i])
        except ValueError:
            raise ValueError(f"{path}: column '{name}' has non-numeric value {row[i]!r}") from None
    return out


def read_scan_csv(path):
    """Parse one scan CSV into arrays; raises ValueError on schema mismatch."""
    rows = _read_rows(path, SCAN_HEADER)
    return ScanTable(*(_column(path, rows, SCAN_HEADER, name) for name in SCAN_HEADER))


def read_per_sigma_csv(path):
    """Parse a per-sigma or comparison CSV into one SweepSeries per scenario_id.

    Series keep first-appearance order; rows of one scenario_id need not be
    contiguous.
    """
    rows = _read_rows(path, PER_SIGMA_HEADER)
    grouped = {}
    for row in rows:
        grouped.setdefault(row[0], []).append(row)
    series = []
    for scenario_id, block in grouped.items():
        columns = {
            name: _column(path, block, PER_SIGMA_HEADER, name)
            for name in PER_SIGMA_HEADER[1:]
        }
        series.append(SweepSeries(scenario_id=scenario_id, **columns))
    return series
