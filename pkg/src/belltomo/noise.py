"""Random analyzer errors, seeded streams, and photon-count simulation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .matcore import ensure_cmat, kron
from .polarimetry import scan_operator
from .states import validate_density_matrix, with_dark_counts

_UNITARY_TOL = 1e-9


def _label_to_int(label):
    # string labels hash through sha256 so stream keys are stable across
    # processes and runs (the builtin hash() is salted per interpreter)
    if isinstance(label, (bool, float)):
        raise TypeError(f"stream labels must be ints or strings, got {label!r}")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"integer stream labels must be non-negative, got {label}")
        return int(label)
    if isinstance(label, str):
        return int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:8], "big")
    raise TypeError(f"stream labels must be ints or strings, got {label!r}")


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by (master_seed, labels...).

    Equal keys yield identical draw sequences regardless of thread count or
    evaluation order. Child streams extend the key, so independent substreams
    never share draws.
    """

    key: tuple

    @classmethod
    def from_seed(cls, master_seed, *labels):
        seed = int(master_seed)
        if seed < 0:
            raise ValueError(f"master_seed must be non-negative, got {master_seed}")
        return cls((seed,) + tuple(_label_to_int(x) for x in labels))

    def child(self, *labels):
        return RngStream(self.key + tuple(_label_to_int(x) for x in labels))

    def generator(self):
        """Fresh numpy Generator positioned at the start of this stream."""
        return np.random.default_rng(np.random.SeedSequence(self.key))


@dataclass(frozen=True)
class NoiseConfig:
    """Noise settings of one simulated acquisition.

    sigma: scale of the Normal(0, sigma^2) analyzer error angles.
    p: accidental-coincidence (dark count) fraction mixed into the state.
    n_mean: mean photon-pair number per measurement.
    poisson_enabled: draw the pair number per measurement from Poisson(n_mean)
        when True, use exactly n_mean when False.
    """

    sigma: float
    p: float
    n_mean: float
    poisson_enabled: bool = True
    master_seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"sigma must be finite and non-negative, got {self.sigma}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not (np.isfinite(self.n_mean) and self.n_mean > 0.0):
            raise ValueError(f"n_mean must be finite and positive, got {self.n_mean}")
        if int(self.master_seed) < 0:
            raise ValueError(f"master_seed must be non-negative, got {self.master_seed}")


def random_unitary(omega1, omega2, omega3):
    """2x2 unitary from two phase angles and one mixing angle.

    Diagonal carries e^{+-i*omega1/2} cos(omega3); the off-diagonal couples
    through -i e^{+-i*omega2} sin(omega3). Determinant is 1.
    """
    w1, w2, w3 = float(omega1), float(omega2), float(omega3)
    if not (np.isfinite(w1) and np.isfinite(w2) and np.isfinite(w3)):
        raise ValueError("rotation angles must be finite")
    c, s = np.cos(w3), np.sin(w3)
    return np.array(
        [
            [np.exp(0.5j * w1) * c, -1j * np.exp(1j * w2) * s],
            [-1j * np.exp(-1j * w2) * s, np.exp(-0.5j * w1) * c],
        ]
    )


def draw_perturbation(sigma, rng):
    """One 4x4 analyzer-error unitary U(w1,w2,w3) (x) U(w4,w5,w6).

    All six angles are independent Normal(0, sigma^2) draws from rng.
    sigma = 0 short-circuits to the identity without consuming any draws.
    """
    s = float(sigma)
    if not (np.isfinite(s) and s >= 0.0):
        raise ValueError(f"sigma must be finite and non-negative, got {sigma}")
    if s == 0.0:
        return np.eye(4, dtype=complex)
    w = rng.normal(0.0, s, size=6)
    return kron(random_unitary(w[0], w[1], w[2]), random_unitary(w[3], w[4], w[5]))


def perturb_operator(m, sigma, rng):
    """Conjugate a 4x4 projector by a fresh perturbation: P m P^dag."""
    a = ensure_cmat(m, 4, "operator")
    if float(sigma) == 0.0:
        return a.copy()
    pert = draw_perturbation(sigma, rng)
    return pert @ a @ pert.conj().T


# analyzer setting of projector k: both arms pick one of three wave-plate
# bases (H/V, D/A, L/R), so the 36 projectors fall into 9 settings of 4
_SETTING_OF = tuple(3 * (i1 // 2) + (i2 // 2) for i1 in range(6) for i2 in range(6))


def simulate_counts(rho, mset, cfg, rng):
    """Coincidence counts for all 36 projectors of mset against rho.

    One analyzer configuration measures its four projectors at once, so a
    fresh perturbation is drawn per setting (9 per acquisition, in setting
    order) and shared by that setting's projectors; the pair number is drawn
    per projector (Poisson(n_mean), or exactly n_mean when disabled). Dark
    counts mix p/4 of the identity into the state first. Counts are real,
    never rounded. Perturbation and Poisson draws come from separate child
    streams, so sigma = 0 leaves the Poisson sequence unchanged.
    """
    rho_eff = with_dark_counts(rho, cfg.p)
    perturb_rng = rng.child("perturb").generator()
    poisson_rng = rng.child("poisson").generator()
    if cfg.sigma > 0.0:
        perts = [draw_perturbation(cfg.sigma, perturb_rng) for _ in range(9)]
    counts = np.empty(36, dtype=float)
    for k, op in enumerate(mset.operators):
        if cfg.sigma > 0.0:
            pert = perts[_SETTING_OF[k]]
            mk = pert @ op @ pert.conj().T
        else:
            mk = op
        if cfg.poisson_enabled:
            pairs = float(poisson_rng.poisson(cfg.n_mean))
        else:
            pairs = cfg.n_mean
        counts[k] = max(pairs * float(np.real(np.trace(mk @ rho_eff))), 0.0)
    return counts


def simulate_scan(rho, thetas, cfg, fixed_arm_error, rng):
    """Counts along a rotating-analyzer scan with one fixed-arm error.

    Per angle theta the measured operator is
    P_rot (F M(theta) F^dag) P_rot^dag with F = fixed_arm_error held for the
    whole scan and P_rot freshly drawn per angle.
    """
    rho_eff = with_dark_counts(rho, cfg.p)
    f = ensure_cmat(fixed_arm_error, 4, "fixed_arm_error")
    if float(np.max(np.abs(f @ f.conj().T - np.eye(4)))) > _UNITARY_TOL:
        raise ValueError("fixed_arm_error must be unitary")
    grid = np.asarray(thetas, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("thetas must be a non-empty 1-d grid of finite angles")
    rot_rng = rng.child("rot").generator()
    poisson_rng = rng.child("poisson").generator()
    counts = np.empty(grid.size, dtype=float)
    for i, th in enumerate(grid):
        base = f @ scan_operator(th) @ f.conj().T
        q = perturb_operator(base, cfg.sigma, rot_rng)
        if cfg.poisson_enabled:
            pairs = float(poisson_rng.poisson(cfg.n_mean))
        else:
            pairs = cfg.n_mean
        counts[i] = max(pairs * float(np.real(np.trace(q @ rho_eff))), 0.0)
    return counts
