"""Maximum-likelihood density-matrix reconstruction from coincidence counts.

The candidate state is parameterized by 16 reals t through a lower-triangular
factor T, rho(t) = T^dag T / Tr(T^dag T), which keeps every candidate
physical by construction. The fit minimizes a Gaussian-approximation
log-likelihood against the ideal (unperturbed) projectors and the configured
mean pair number.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .polarimetry import PAIR_LABELS
from .states import validate_density_matrix

# floor inside the likelihood quotient and logarithm
LIKELIHOOD_FLOOR = 1e-9

# Parameter layout of T: t[0..3] fill the real diagonal; the sub-diagonal
# entries are (real, imag) pairs filled along the first sub-diagonal, then
# the second, then the bottom-left corner:
#   row 2: t[4]+i t[5]
#   row 3: t[10]+i t[11], t[6]+i t[7]
#   row 4: t[14]+i t[15], t[12]+i t[13], t[8]+i t[9]
_DIAG_IDX = ((0, 0), (1, 1), (2, 2), (3, 3))
_LOWER_IDX = ((1, 0), (2, 1), (3, 2), (2, 0), (3, 1), (3, 0))

# basis matrices with T(t) = sum_m t[m] * _TBASIS[m]
_TBASIS = np.zeros((16, 4, 4), dtype=complex)
for _i, (_r, _c) in enumerate(_DIAG_IDX):
    _TBASIS[_i, _r, _c] = 1.0
for _j, (_r, _c) in enumerate(_LOWER_IDX):
    _TBASIS[4 + 2 * _j, _r, _c] = 1.0
    _TBASIS[5 + 2 * _j, _r, _c] = 1j
# pairwise products B_m^dag B_n, used to reduce Tr(M T^dag T) to a real
# quadratic form in t
_TPAIR = np.einsum("mba,nbc->mnac", _TBASIS.conj(), _TBASIS)

# Hermitian (two-qubit Pauli) basis for the linear-inversion warm start
_PAULI1 = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1j], [1j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)
_HBASIS = np.stack([np.kron(a, b) for a in _PAULI1 for b in _PAULI1])


@dataclass(frozen=True)
class MleOptions:
    """Optimizer settings for reconstruct(); defaults are the deterministic standard run."""

    restarts: int = 5
    max_evals_per_restart: int = 200_000
    rel_tol: float = 1e-10
    start_jitter: float = 0.005
    seed: int = 7

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_evals_per_restart < 1:
            raise ValueError("max_evals_per_restart must be at least 1")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class MleReport:
    """Result of one reconstruction: state, objective, and optimizer bookkeeping."""

    rho: np.ndarray
    final_objective: float
    evaluations: int
    restarts_used: int
    converged: bool


def _check_params(params):
    t = np.asarray(params, dtype=float)
    if t.shape != (16,) or not np.all(np.isfinite(t)):
        raise ValueError("params must be 16 finite reals")
    return t


def t_matrix(params):
    """Lower-triangular factor T built from the 16 real parameters."""
    t = _check_params(params)
    m = np.zeros((4, 4), dtype=complex)
    for i, (r, c) in enumerate(_DIAG_IDX):
        m[r, c] = t[i]
    for j, (r, c) in enumerate(_LOWER_IDX):
        m[r, c] = t[4 + 2 * j] + 1j * t[5 + 2 * j]
    return m


def rho_from_params(params):
    """Physical density matrix rho = T^dag T / Tr(T^dag T)."""
    t = t_matrix(params)
    g = t.conj().T @ t
    tr = float(np.real(np.trace(g)))
    if tr <= 1e-30:
        raise ValueError("degenerate parameters: Tr(T^dag T) vanishes")
    rho = 0.5 * (g + g.conj().T) / tr
    return validate_density_matrix(rho)


def expected_counts(params, mset, n_mean):
    """Ideal-apparatus expected counts n_mean * Tr(M_k rho(params)) for all 36 projectors."""
    if not (np.isfinite(n_mean) and n_mean > 0.0):
        raise ValueError(f"n_mean must be finite and positive, got {n_mean}")
    rho = rho_from_params(params)
    out = np.empty(36, dtype=float)
    for k, op in enumerate(mset.operators):
        out[k] = max(float(n_mean) * float(np.real(np.trace(op @ rho))), 0.0)
    return out


def likelihood(measured, expected):
    """Gaussian-approximation objective sum_k (m_k - e_k)^2 / max(e_k, eps) + ln max(e_k, eps)."""
    m = np.asarray(measured, dtype=float)
    e = np.asarray(expected, dtype=float)
    if m.shape != e.shape or m.ndim != 1:
        raise ValueError("measured and expected must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(e))):
        raise ValueError("counts must be finite")
    ef = np.maximum(e, LIKELIHOOD_FLOOR)
    d = m - e
    return float(np.sum(d * d / ef + np.log(ef)))


def _gram_tensor(ops):
    # G[k] reduces Tr(M_k T^dag T) to t . G[k] . t; returned flattened for one-gemv evaluation
    g = np.real(np.einsum("kij,mnji->kmn", ops, _TPAIR))
    g = 0.5 * (g + g.transpose(0, 2, 1))
    return np.ascontiguousarray(g.reshape(36, 256))


def _linear_inversion_params(measured, ops, n_mean):
    """Least-squares estimate of rho from the count equations, projected to parameters.

    Solves the 36 linear equations for the 16 Pauli coefficients, clips the
    estimate to the PSD cone, renormalizes, and factors it back into t.
    """
    a = np.real(np.einsum("kij,mji->km", ops, _HBASIS))
    coef, _, _, _ = np.linalg.lstsq(a, measured / n_mean, rcond=None)
    rho = np.einsum("m,mij->ij", coef, _HBASIS)
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    if total <= 1e-12:
        t = np.zeros(16)
        t[:4] = 0.5
        return t
    rho = (v * w) @ v.conj().T / total
    # small ridge so the triangular factorization exists for rank-deficient estimates
    rho = (rho + 1e-10 * np.eye(4)) / (1.0 + 4e-10)
    return _params_from_density(rho)


def _params_from_density(rho):
    """Parameters t with rho = T^dag T (requires rho positive definite)."""
    j = np.eye(4)[::-1]
    lower = np.linalg.cholesky(j @ rho @ j)
    t_mat = (j @ lower @ j).conj().T
    t = np.empty(16, dtype=float)
    for i, (r, c) in enumerate(_DIAG_IDX):
        t[i] = t_mat[r, c].real
    for k, (r, c) in enumerate(_LOWER_IDX):
        t[4 + 2 * k] = t_mat[r, c].real
        t[5 + 2 * k] = t_mat[r, c].imag
    return t


def _nelder_mead(f, x0, rel_tol, max_evals, step):
    """Simplex descent with adaptive coefficients for the 16-parameter search.

    Stops when the objective spread across the simplex drops below
    rel_tol * max(1, |f_best|) or the evaluation budget runs out. Returns
    (x_best, f_best, evaluations, converged).
    """
    n = x0.size
    alpha = 1.0
    gamma = 1.0 + 2.0 / n
    beta = 0.75 - 1.0 / (2.0 * n)
    delta = 1.0 - 1.0 / n

    sim = np.repeat(x0[None, :], n + 1, axis=0)
    for i in range(n):
        h = step * abs(x0[i]) if abs(x0[i]) > 1e-2 else step * 0.4
        sim[i + 1, i] += h
    fx = np.array([f(v) for v in sim])
    evals = n + 1
    converged = False

    while True:
        order = np.argsort(fx, kind="stable")
        sim = sim[order]
        fx = fx[order]
        if fx[-1] - fx[0] <= rel_tol * max(1.0, abs(fx[0])):
            converged = True
            break
        if evals >= max_evals:
            break
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - sim[-1])
        fr = f(xr)
        evals += 1
        if fr < fx[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            evals += 1
            if fe < fr:
                sim[-1], fx[-1] = xe, fe
            else:
                sim[-1], fx[-1] = xr, fr
        elif fr < fx[-2]:
            sim[-1], fx[-1] = xr, fr
        else:
            if fr < fx[-1]:
                xc = centroid + beta * (xr - centroid)
            else:
                xc = centroid + beta * (sim[-1] - centroid)
            fc = f(xc)
            evals += 1
            if fc < min(fr, fx[-1]):
                sim[-1], fx[-1] = xc, fc
            else:
                # shrink toward the best vertex
                for i in range(1, n + 1):
                    sim[i] = sim[0] + delta * (sim[i] - sim[0])
                    fx[i] = f(sim[i])
                evals += n
    best = int(np.argmin(fx))
    return sim[best].copy(), float(fx[best]), evals, converged


def _minimize_restart(f, x0, opts):
    """One restart: simplex descent plus re-seeded polish rounds within the eval budget."""
    budget = opts.max_evals_per_restart
    x = x0
    fx = None
    evals = 0
    converged = False
    step = 0.05
    for _ in range(3):
        remaining = budget - evals
        if remaining <= 0:
            break
        x, f_new, used, conv = _nelder_mead(f, x, opts.rel_tol, remaining, step)
        evals += used
        settled = conv and fx is not None and fx - f_new <= opts.rel_tol * max(1.0, abs(f_new))
        fx = f_new
        converged = conv
        if settled:
            break
        step *= 0.25
    return x, fx, evals, converged


def reconstruct(measured, mset, n_mean, opts=None):
    """Maximum-likelihood state estimate from 36 measured counts.

    Runs multi-start simplex descent: one identity-like start plus seeded
    small perturbations of the linear-inversion warm start. Deterministic
    for identical inputs and options.
    """
    if opts is None:
        opts = MleOptions()
    meas = np.asarray(measured, dtype=float)
    if meas.shape != (36,) or not np.all(np.isfinite(meas)):
        raise ValueError("measured must be 36 finite counts")
    if np.any(meas < 0.0):
        raise ValueError("measured counts must be non-negative")
    if not (np.isfinite(n_mean) and n_mean > 0.0):
        raise ValueError(f"n_mean must be finite and positive, got {n_mean}")

    ops = np.stack(mset.operators)
    gram = _gram_tensor(ops)
    nm = float(n_mean)

    def objective(t):
        w = np.outer(t, t)
        tt = float(w.trace())
        if tt <= 1e-300:
            return np.inf
        e = gram @ w.ravel()
        e *= nm / tt
        ef = np.maximum(e, LIKELIHOOD_FLOOR)
        d = meas - e
        return float(np.sum(d * d / ef + np.log(ef)))

    starts = [np.concatenate([np.full(4, 0.5), np.zeros(12)])]
    if opts.restarts > 1:
        t_li = _linear_inversion_params(meas, ops, nm)
        for j in range(opts.restarts - 1):
            rng = np.random.default_rng(np.random.SeedSequence((int(opts.seed), j)))
            s = t_li + opts.start_jitter * rng.standard_normal(16)
            norm = float(np.linalg.norm(s))
            starts.append(s / norm if norm > 1e-12 else starts[0])

    best_x = None
    best_f = np.inf
    best_conv = False
    total_evals = 0
    for s in starts:
        x, f_val, used, conv = _minimize_restart(objective, s, opts)
        total_evals += used
        if f_val is not None and f_val < best_f:
            best_x, best_f, best_conv = x, f_val, conv
    return MleReport(
        rho=rho_from_params(best_x),
        final_objective=best_f,
        evaluations=total_evals,
        restarts_used=len(starts),
        converged=best_conv,
    )


def read_counts_csv(path):
    """Parse a counts CSV (scenario_id, state_index, then the 36 labeled columns).

    Returns a list of (scenario_id, state_index, counts) tuples.
    """
    expected_header = ["scenario_id", "state_index", *PAIR_LABELS]
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty counts CSV")
        if header != expected_header:
            for got, want in zip(header, expected_header):
                if got != want:
                    raise ValueError(f"{path}: bad counts column {got!r}, expected {want!r}")
            raise ValueError(f"{path}: counts header has {len(header)} columns, expected {len(expected_header)}")
        for line in reader:
            if not line:
                continue
            if len(line) != len(expected_header):
                raise ValueError(f"{path}: counts row has {len(line)} fields, expected {len(expected_header)}")
            rows.append((line[0], int(line[1]), np.array([float(x) for x in line[2:]])))
    if not rows:
        raise ValueError(f"{path}: counts CSV has no data rows")
    return rows


def format_rho_text(rho, objective):
    """Plain-text form of a density matrix: a comment line with the objective, then 4 rows of a+bi entries."""

    def fmt(z):
        # adding 0.0 folds IEEE negative zero into plain zero
        return f"{z.real + 0.0:.12g}{z.imag + 0.0:+.12g}i"

    lines = [f"# objective = {objective:.12g}"]
    for row in np.asarray(rho, dtype=complex):
        lines.append(" ".join(fmt(z) for z in row))
    return "\n".join(lines) + "\n"
