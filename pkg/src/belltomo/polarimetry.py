"""Six-state polarization projectors, the 36-operator coincidence set, and the analyzer scan."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import ensure_cmat, kron

POL_LABELS = ("H", "V", "D", "A", "L", "R")

_ISQ2 = 1.0 / np.sqrt(2.0)
_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_ISQ2, _ISQ2], dtype=complex),
    "A": np.array([_ISQ2, -_ISQ2], dtype=complex),
    "R": np.array([_ISQ2, -1j * _ISQ2], dtype=complex),
    "L": np.array([_ISQ2, 1j * _ISQ2], dtype=complex),
}

# two-photon labels in first-photon-major order: HH, HV, ..., RR
PAIR_LABELS = tuple(a + b for a in POL_LABELS for b in POL_LABELS)


def pol_ket(label):
    """Unit-norm single-photon polarization ket for one of the six analyzer settings."""
    if label not in _KETS:
        raise ValueError(f"unknown polarization label {label!r}, expected one of {POL_LABELS}")
    return _KETS[label].copy()


def _proj(ket):
    return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class MeasurementSet:
    """The 36 two-photon projectors and their labels, in first-photon-major order."""

    operators: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.operators) != 36 or len(self.labels) != 36:
            raise ValueError("a measurement set holds exactly 36 operators and labels")


def build_measurement_set():
    """Projector pairs |a><a| (x) |b><b| over all 36 analyzer label pairs."""
    ops = tuple(kron(_proj(_KETS[a]), _proj(_KETS[b])) for a in POL_LABELS for b in POL_LABELS)
    return MeasurementSet(operators=ops, labels=PAIR_LABELS)


def scan_operator(theta):
    """Coincidence projector |H><H| (x) |theta><theta| for the rotating-analyzer scan.

    The rotating arm's ket is (sin(theta), cos(theta)), so theta = 0 selects V
    and theta = pi/2 selects H. Periodic in theta with period 2*pi.
    """
    th = float(theta)
    if not np.isfinite(th):
        raise ValueError("theta must be finite")
    ket = np.array([np.sin(th), np.cos(th)], dtype=complex)
    return kron(_proj(_KETS["H"]), _proj(ket))
