"""Experiment driver: seeded noise sweeps, analyzer scans, aggregation, CSV, and configs."""

from __future__ import annotations

import configparser
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .metrics import SampleStats, concurrence, fidelity_pure, sample_stats
from .mle import MleOptions, reconstruct
from .noise import NoiseConfig, RngStream, draw_perturbation, simulate_counts, simulate_scan
from .polarimetry import build_measurement_set, scan_operator
from .states import FAMILIES, bell_state, phase_sample, pure_density

SIGMA_MAX = np.pi / 2.0
# concurrence level above which a CHSH violation is certain
CHSH_THRESHOLD = 1.0 / np.sqrt(2.0)

_TWO_PI = 2.0 * np.pi

_SWEEP_KEYS = {"family", "sample_size", "sigma_grid", "p", "n_mean", "poisson", "seed", "id"}
_SCAN_KEYS = {"theta_grid", "repetitions", "sigma", "p", "n_mean", "poisson", "seed", "id"}
_SCAN_OPTIONAL = {"family", "phase"}


@dataclass(frozen=True)
class Scenario:
    """One sweep: a family sampled over phases, run across a sigma grid."""

    scenario_id: str
    family_tag: str
    sample_size: int
    sigma_grid: tuple
    p: float
    n_mean: float
    poisson_enabled: bool = True
    master_seed: int = 0

    def __post_init__(self):
        if not self.scenario_id:
            raise ValueError("scenario_id must be non-empty")
        if self.family_tag not in FAMILIES:
            raise ValueError(f"unknown family tag {self.family_tag!r}")
        if self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        grid = tuple(float(s) for s in self.sigma_grid)
        if len(grid) == 0:
            raise ValueError("sigma_grid must be non-empty")
        if any(not (0.0 <= s <= SIGMA_MAX + 1e-12) for s in grid):
            raise ValueError("sigma_grid entries must lie in [0, pi/2]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sigma_grid must be strictly ascending")
        object.__setattr__(self, "sigma_grid", grid)
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not (np.isfinite(self.n_mean) and self.n_mean > 0.0):
            raise ValueError(f"n_mean must be finite and positive, got {self.n_mean}")
        if int(self.master_seed) < 0:
            raise ValueError("master_seed must be non-negative")


@dataclass(frozen=True)
class ScanSpec:
    """One rotating-analyzer scan: theta grid, repetition count, and noise settings."""

    theta_grid: tuple
    repetitions: int
    sigma: float
    p: float
    n_mean: float
    poisson_enabled: bool = True
    master_seed: int = 0

    def __post_init__(self):
        grid = tuple(float(t) for t in self.theta_grid)
        if len(grid) == 0:
            raise ValueError("theta_grid must be non-empty")
        if any(not (0.0 <= t < _TWO_PI) for t in grid):
            raise ValueError("theta_grid entries must lie in [0, 2*pi)")
        object.__setattr__(self, "theta_grid", grid)
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        # noise-field validation is shared with NoiseConfig
        NoiseConfig(self.sigma, self.p, self.n_mean, self.poisson_enabled, self.master_seed)


@dataclass(frozen=True)
class StateResult:
    """Reconstruction scores of one (sigma, state) cell."""

    sigma_index: int
    state_index: int
    sigma: float
    phase: float
    fidelity: float
    concurrence: float
    converged: bool


@dataclass(frozen=True)
class SigmaSummary:
    """Aggregates over the converged reconstructions at one sigma."""

    sigma: float
    fidelity: SampleStats
    concurrence: SampleStats
    n_nonconverged: int


@dataclass(frozen=True)
class ScanPoint:
    theta: float
    mean_count: float
    std_count: float
    theory_count: float


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    per_state: tuple
    per_sigma: tuple


def _cell_noise_config(scenario, sigma):
    return NoiseConfig(
        sigma=sigma,
        p=scenario.p,
        n_mean=scenario.n_mean,
        poisson_enabled=scenario.poisson_enabled,
        master_seed=scenario.master_seed,
    )


def _sweep_cell(scenario, mset, opts, sigma_index, state_index):
    family = phase_sample(scenario.family_tag, scenario.sample_size)[state_index]
    target = bell_state(family)
    rho_in = pure_density(target)
    sigma = scenario.sigma_grid[sigma_index]
    cfg = _cell_noise_config(scenario, sigma)
    stream = RngStream.from_seed(scenario.master_seed, "sweep", sigma_index, state_index)
    counts = simulate_counts(rho_in, mset, cfg, stream)
    report = reconstruct(counts, mset, scenario.n_mean, opts)
    return StateResult(
        sigma_index=sigma_index,
        state_index=state_index,
        sigma=sigma,
        phase=family.phase,
        fidelity=fidelity_pure(target, report.rho),
        concurrence=concurrence(report.rho),
        converged=report.converged,
    )


_WORKER = None


def _init_sweep_worker(scenario, opts):
    global _WORKER
    _WORKER = (scenario, build_measurement_set(), opts)


def _run_sweep_cell(indices):
    scenario, mset, opts = _WORKER
    return _sweep_cell(scenario, mset, opts, indices[0], indices[1])


def _aggregate(scenario, records):
    per_sigma = []
    for si, sigma in enumerate(scenario.sigma_grid):
        here = [r for r in records if r.sigma_index == si]
        good = [r for r in here if r.converged]
        if good:
            f_stats = sample_stats([r.fidelity for r in good])
            c_stats = sample_stats([r.concurrence for r in good])
        else:
            f_stats = SampleStats(float("nan"), float("nan"), 0)
            c_stats = SampleStats(float("nan"), float("nan"), 0)
        per_sigma.append(
            SigmaSummary(
                sigma=sigma,
                fidelity=f_stats,
                concurrence=c_stats,
                n_nonconverged=len(here) - len(good),
            )
        )
    return RunResult(scenario=scenario, per_state=tuple(records), per_sigma=tuple(per_sigma))


def run_sweep(scenario, threads=1, mle_options=None):
    """Simulate and reconstruct every (sigma, state) cell of a scenario.

    Cells are keyed by (master_seed, sigma index, state index), so the result
    is identical for any thread count and any evaluation order. Per-sigma
    statistics cover converged reconstructions only; the nonconverged count
    is carried alongside.
    """
    opts = mle_options if mle_options is not None else MleOptions()
    cells = [(si, ki) for si in range(len(scenario.sigma_grid)) for ki in range(scenario.sample_size)]
    if threads <= 1:
        mset = build_measurement_set()
        records = [_sweep_cell(scenario, mset, opts, si, ki) for si, ki in cells]
    else:
        with ProcessPoolExecutor(
            max_workers=threads, initializer=_init_sweep_worker, initargs=(scenario, opts)
        ) as pool:
            chunk = max(1, len(cells) // (threads * 4))
            records = list(pool.map(_run_sweep_cell, cells, chunksize=chunk))
    return _aggregate(scenario, records)


def run_scan(spec, rho):
    """Mean/std counts per theta over repeated noisy scans of a fixed state.

    Every repetition draws its own fixed-arm error and per-angle rotating-arm
    errors; the ideal-apparatus theory curve n_mean * Tr(M(theta) rho) is
    returned alongside.
    """
    target = np.asarray(rho, dtype=complex)
    theory = [
        float(spec.n_mean) * float(np.real(np.trace(scan_operator(th) @ target)))
        for th in spec.theta_grid
    ]
    cfg = NoiseConfig(spec.sigma, spec.p, spec.n_mean, spec.poisson_enabled, spec.master_seed)
    all_counts = np.empty((spec.repetitions, len(spec.theta_grid)), dtype=float)
    for rep in range(spec.repetitions):
        fixed_rng = RngStream.from_seed(spec.master_seed, "scan", rep, "fixed").generator()
        fixed_err = draw_perturbation(spec.sigma, fixed_rng)
        stream = RngStream.from_seed(spec.master_seed, "scan", rep)
        all_counts[rep] = simulate_scan(target, spec.theta_grid, cfg, fixed_err, stream)
    points = []
    for i, th in enumerate(spec.theta_grid):
        stats = sample_stats(all_counts[:, i])
        points.append(
            ScanPoint(theta=th, mean_count=stats.mean, std_count=stats.std_dev, theory_count=theory[i])
        )
    return points


def compare_scenarios(scenarios, threads=1, mle_options=None):
    """Run several scenarios over one shared sigma grid; results keyed by scenario id."""
    if not scenarios:
        raise ValueError("compare_scenarios needs at least one scenario")
    ids = [s.scenario_id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ValueError("scenario ids must be unique")
    grid = scenarios[0].sigma_grid
    for s in scenarios[1:]:
        if s.sigma_grid != grid:
            raise ValueError("compared scenarios must share the same sigma_grid")
    return {s.scenario_id: run_sweep(s, threads=threads, mle_options=mle_options) for s in scenarios}


def chsh_violation_region(result):
    """Sigma grid points whose mean concurrence guarantees a CHSH violation (c_mean > 1/sqrt(2))."""
    return [s.sigma for s in result.per_sigma if s.concurrence.mean > CHSH_THRESHOLD]


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x):
    return f"{float(x):.12g}"


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_per_state_csv(path, result):
    """Per-state rows: scenario_id, sigma, state_index, phase, fidelity, concurrence, converged."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["scenario_id", "sigma", "state_index", "phase", "fidelity", "concurrence", "converged"])
        for r in result.per_state:
            w.writerow(
                [
                    result.scenario.scenario_id,
                    _fmt(r.sigma),
                    r.state_index,
                    _fmt(r.phase),
                    _fmt(r.fidelity),
                    _fmt(r.concurrence),
                    "true" if r.converged else "false",
                ]
            )


def _per_sigma_row(scenario_id, s):
    return [
        scenario_id,
        _fmt(s.sigma),
        _fmt(s.fidelity.mean),
        _fmt(s.fidelity.std_dev),
        _fmt(s.concurrence.mean),
        _fmt(s.concurrence.std_dev),
        s.n_nonconverged,
    ]


_PER_SIGMA_HEADER = ["scenario_id", "sigma", "f_mean", "f_std", "c_mean", "c_std", "n_nonconverged"]


def write_per_sigma_csv(path, result):
    """Per-sigma rows: scenario_id, sigma, f_mean, f_std, c_mean, c_std, n_nonconverged."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(_PER_SIGMA_HEADER)
        for s in result.per_sigma:
            w.writerow(_per_sigma_row(result.scenario.scenario_id, s))


def write_comparison_csv(path, results):
    """Merged per-sigma rows of several runs sharing a grid, keyed by scenario_id."""
    runs = list(results.values())
    grid = runs[0].scenario.sigma_grid
    for r in runs[1:]:
        if r.scenario.sigma_grid != grid:
            raise ValueError("compared results must share the same sigma_grid")
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(_PER_SIGMA_HEADER)
        for sid, res in results.items():
            for s in res.per_sigma:
                w.writerow(_per_sigma_row(sid, s))


def write_scan_csv(path, points):
    """Scan rows: theta, mean_count, std_count, theory_count."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["theta", "mean_count", "std_count", "theory_count"])
        for pt in points:
            w.writerow([_fmt(pt.theta), _fmt(pt.mean_count), _fmt(pt.std_count), _fmt(pt.theory_count)])


# ---------------------------------------------------------------------------
# Config parsing (INI sections, one scenario or scan per section)


def _parse_grid(text, what):
    text = text.strip()
    if text.startswith("linspace:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"{what}: linspace grid needs linspace:start:stop:count, got {text!r}")
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        if count < 1:
            raise ValueError(f"{what}: linspace count must be at least 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    values = tuple(float(v) for v in text.split(",") if v.strip())
    if not values:
        raise ValueError(f"{what}: empty grid")
    return values


def _parse_bool(text, what):
    lowered = text.strip().lower()
    if lowered in ("1", "yes", "true", "on"):
        return True
    if lowered in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"{what}: expected a boolean, got {text!r}")


def _read_config(path):
    cp = configparser.ConfigParser(default_section="", interpolation=None)
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise ValueError(f"config file {path} not found or unreadable")
    if not cp.sections():
        raise ValueError(f"config file {path} has no sections")
    return cp


def parse_sweep_config(path):
    """Scenarios from an INI file; every section needs exactly the sweep keys."""
    cp = _read_config(path)
    scenarios = []
    for section in cp.sections():
        keys = set(cp[section].keys())
        missing = _SWEEP_KEYS - keys
        extra = keys - _SWEEP_KEYS
        if missing:
            raise ValueError(f"[{section}]: missing keys {sorted(missing)}")
        if extra:
            raise ValueError(f"[{section}]: unknown keys {sorted(extra)}")
        sec = cp[section]
        scenarios.append(
            Scenario(
                scenario_id=sec["id"].strip(),
                family_tag=sec["family"].strip(),
                sample_size=int(sec["sample_size"]),
                sigma_grid=_parse_grid(sec["sigma_grid"], f"[{section}] sigma_grid"),
                p=float(sec["p"]),
                n_mean=float(sec["n_mean"]),
                poisson_enabled=_parse_bool(sec["poisson"], f"[{section}] poisson"),
                master_seed=int(sec["seed"]),
            )
        )
    ids = [s.scenario_id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ValueError("scenario ids must be unique across the config")
    return scenarios


def parse_scan_config(path):
    """Scan specs from an INI file.

    Required keys: theta_grid, repetitions, sigma, p, n_mean, poisson, seed,
    id. Optional: family (default phi) and phase (default 0) select the
    scanned input state. Returns (scan_id, ScanSpec, BellFamily) triples.
    """
    from .states import BellFamily

    cp = _read_config(path)
    scans = []
    for section in cp.sections():
        keys = set(cp[section].keys())
        missing = _SCAN_KEYS - keys
        extra = keys - _SCAN_KEYS - _SCAN_OPTIONAL
        if missing:
            raise ValueError(f"[{section}]: missing keys {sorted(missing)}")
        if extra:
            raise ValueError(f"[{section}]: unknown keys {sorted(extra)}")
        sec = cp[section]
        spec = ScanSpec(
            theta_grid=_parse_grid(sec["theta_grid"], f"[{section}] theta_grid"),
            repetitions=int(sec["repetitions"]),
            sigma=float(sec["sigma"]),
            p=float(sec["p"]),
            n_mean=float(sec["n_mean"]),
            poisson_enabled=_parse_bool(sec["poisson"], f"[{section}] poisson"),
            master_seed=int(sec["seed"]),
        )
        family = BellFamily(sec.get("family", "phi").strip(), float(sec.get("phase", "0")))
        scans.append((sec["id"].strip(), spec, family))
    ids = [sid for sid, _, _ in scans]
    if len(set(ids)) != len(ids):
        raise ValueError("scan ids must be unique across the config")
    return scans


def apply_full_scale(scenarios, enabled, sample_size=200):
    """Override every scenario's sample_size for a full-scale run."""
    if not enabled:
        return list(scenarios)
    return [replace(s, sample_size=sample_size) for s in scenarios]
