"""Maximally entangled two-photon input states and density-matrix constructors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import ensure_cmat

FAMILY_PHI = "phi"
FAMILY_PSI = "psi"
FAMILIES = (FAMILY_PHI, FAMILY_PSI)

_TWO_PI = 2.0 * np.pi
# boundary tolerances for density-matrix physicality checks
DENSITY_TOL = 1e-10
_NORM_TOL = 1e-9


@dataclass(frozen=True)
class BellFamily:
    """One maximally entangled input state: family tag plus relative phase.

    tag "phi" pairs |00> with |11>, tag "psi" pairs |01> with |10>; the
    phase multiplies the second branch.
    """

    tag: str
    phase: float

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ValueError(f"unknown family tag {self.tag!r}, expected one of {FAMILIES}")
        if not (0.0 <= self.phase < _TWO_PI):
            raise ValueError(f"phase must lie in [0, 2*pi), got {self.phase}")


def validate_density_matrix(rho):
    """Check 4x4 Hermiticity, unit trace and positivity; return the array.

    Raises ValueError when any physicality condition fails beyond DENSITY_TOL.
    """
    a = ensure_cmat(rho, 4, "density matrix")
    if float(np.max(np.abs(a - a.conj().T))) > DENSITY_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > DENSITY_TOL:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    w = np.linalg.eigvalsh(a)
    if w[0] < -DENSITY_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return a


def bell_state(family):
    """Unit-norm state vector of a BellFamily in the |00>,|01>,|10>,|11> basis."""
    if not isinstance(family, BellFamily):
        raise TypeError("family must be a BellFamily")
    amp = 1.0 / np.sqrt(2.0)
    branch = amp * np.exp(1j * family.phase)
    if family.tag == FAMILY_PHI:
        return np.array([amp, 0.0, 0.0, branch], dtype=complex)
    return np.array([0.0, amp, branch, 0.0], dtype=complex)


def pure_density(x):
    """Rank-1 density matrix |x><x| of a unit-norm 4-component state vector."""
    v = np.asarray(x, dtype=complex)
    if v.shape != (4,):
        raise ValueError(f"state vector must have 4 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("state vector contains non-finite entries")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state vector norm is {norm}, expected 1")
    return validate_density_matrix(np.outer(v, v.conj()))


def with_dark_counts(rho, p):
    """Mix accidental coincidences into rho: (1-p)*rho + (p/4)*identity."""
    a = validate_density_matrix(rho)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"dark-count fraction p must lie in [0, 1], got {p}")
    return validate_density_matrix((1.0 - p) * a + (p / 4.0) * np.eye(4, dtype=complex))


def phase_sample(family_tag, count):
    """Evenly spaced phase sample of one family: phases 2*pi*j/count, j = 0..count-1."""
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    return [BellFamily(family_tag, _TWO_PI * j / count) for j in range(count)]
