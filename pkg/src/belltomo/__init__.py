"""Two-photon polarization tomography of Bell states under random measurement noise.

The package simulates coincidence counts for the standard 36-projector
two-photon measurement set with randomly perturbed analyzers, Poisson pair
statistics and accidental (dark) counts, reconstructs density matrices by
maximum likelihood over a triangular-factor parameterization, and drives
seeded fidelity/concurrence sweeps over the noise strength.
"""

from .states import BellFamily, bell_state, pure_density, with_dark_counts, phase_sample
from .polarimetry import MeasurementSet, build_measurement_set, pol_ket, scan_operator
from .noise import NoiseConfig, RngStream, draw_perturbation, perturb_operator, random_unitary, simulate_counts, simulate_scan
from .mle import MleOptions, MleReport, expected_counts, likelihood, reconstruct, rho_from_params
from .metrics import SampleStats, concurrence, fidelity_pure, sample_stats, spin_flip
from .harness import (
    RunResult,
    ScanSpec,
    Scenario,
    chsh_violation_region,
    compare_scenarios,
    run_scan,
    run_sweep,
)

__version__ = "0.1.0"
