"""Scoring of reconstructed states: fidelity, concurrence, and sample statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import gen_eigvals
from .states import validate_density_matrix

_SY = np.array([[0.0, -1j], [1j, 0.0]])
_SYSY = np.kron(_SY, _SY)

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class SampleStats:
    """Mean and population standard deviation of a finite sample."""

    mean: float
    std_dev: float
    count: int


def fidelity_pure(x, rho):
    """Overlap <x|rho|x> of a unit-norm target vector with a density matrix, clamped to [0, 1]."""
    v = np.asarray(x, dtype=complex)
    if v.shape != (4,) or not np.all(np.isfinite(v)):
        raise ValueError("target must be a finite 4-component vector")
    if abs(float(np.linalg.norm(v)) - 1.0) > _NORM_TOL:
        raise ValueError("target vector must have unit norm")
    a = validate_density_matrix(rho)
    val = float(np.real(np.vdot(v, a @ v)))
    return min(max(val, 0.0), 1.0)


def spin_flip(rho):
    """Spin-flipped state (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)."""
    a = validate_density_matrix(rho)
    return _SYSY @ a.conj() @ _SYSY


def concurrence(rho):
    """Two-qubit concurrence of rho.

    Computed from the square roots of the eigenvalues of rho @ spin_flip(rho),
    sorted descending: max(0, a1 - a2 - a3 - a4). Tiny negative eigenvalue
    real parts are clamped to zero before the square root.
    """
    a = validate_density_matrix(rho)
    lam = np.real(gen_eigvals(a @ spin_flip(a)))
    alphas = np.sort(np.sqrt(np.clip(lam, 0.0, None)))[::-1]
    c = alphas[0] - alphas[1] - alphas[2] - alphas[3]
    return min(max(c, 0.0), 1.0)


def sample_stats(values):
    """Mean and population standard deviation (divide by N) of a non-empty sample."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("sample must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(v)):
        raise ValueError("sample contains non-finite values")
    if np.all(v == v[0]):
        # identical samples spread exactly zero; np.mean would round
        return SampleStats(mean=float(v[0]), std_dev=0.0, count=int(v.size))
    mean = float(np.mean(v))
    std = float(np.sqrt(np.mean((v - mean) ** 2)))
    return SampleStats(mean=mean, std_dev=std, count=int(v.size))
