"""Dense complex linear algebra for the 2x2 and 4x4 matrices used everywhere else.

All functions take and return plain numpy arrays (complex128). Inputs are
validated at the boundary; the tolerances are module constants so every
caller applies the same physicality thresholds.
"""

from __future__ import annotations

import numpy as np

# max |m - m^dag| entry allowed before a matrix stops counting as Hermitian
HERM_TOL = 1e-10
# eigenvalues in [-PSD_CLAMP, 0) are treated as numerically zero
PSD_CLAMP = 1e-10


class NotPSDError(ValueError):
    """Matrix required to be positive semidefinite has a genuinely negative eigenvalue."""


def ensure_cmat(m, dim=None, name="matrix"):
    """Validate a square complex matrix and return it as a complex128 array.

    Only 2x2 and 4x4 matrices are supported; `dim` pins the size exactly.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if dim is not None:
        if a.shape[0] != dim:
            raise ValueError(f"{name} must be {dim}x{dim}, got shape {a.shape}")
    elif a.shape[0] not in (2, 4):
        raise ValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def _require_hermitian(a, name="matrix"):
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > HERM_TOL:
        raise ValueError(f"{name} is not Hermitian (max deviation {dev:.3e})")


def kron(a, b):
    """Kronecker product of two 2x2 matrices, giving the 4x4 two-photon operator."""
    a = ensure_cmat(a, 2, "a")
    b = ensure_cmat(b, 2, "b")
    return np.kron(a, b)


def herm_eig(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with real eigenvalues sorted in
    descending order and the matching orthonormal eigenvectors as columns.
    """
    a = ensure_cmat(m)
    _require_hermitian(a)
    w, v = np.linalg.eigh(a)
    return w[::-1].copy(), v[:, ::-1].copy()


def psd_sqrt(m):
    """Hermitian square root s of a PSD matrix m, with s @ s == m.

    Eigenvalues in [-PSD_CLAMP, 0) are clamped to zero; anything below
    -PSD_CLAMP raises NotPSDError.
    """
    a = ensure_cmat(m)
    _require_hermitian(a)
    w, v = np.linalg.eigh(a)
    if w[0] < -PSD_CLAMP:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} is below -{PSD_CLAMP:g}")
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def gen_eigvals(m):
    """Eigenvalues (with multiplicity, any order) of a general 4x4 matrix."""
    a = ensure_cmat(m, 4)
    return np.linalg.eigvals(a)
