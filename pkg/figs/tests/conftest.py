import subprocess
import sys

import pytest

SWEEP_INI = """
[a]
id = demo_phi
family = phi
sample_size = 2
sigma_grid = 0.3, 0.9
p = 0
n_mean = 300
poisson = true
seed = 4

[b]
id = demo_psi
family = psi
sample_size = 2
sigma_grid = 0.3, 0.9
p = 0
n_mean = 300
poisson = true
seed = 4
"""

SCAN_INI = """
[flat]
id = flat
theta_grid = linspace:0:3.1:9
repetitions = 6
sigma = 0
p = 0
n_mean = 800
poisson = false
seed = 2

[wavy]
id = wavy
theta_grid = linspace:0:3.1:9
repetitions = 6
sigma = 0.35
p = 0
n_mean = 800
poisson = true
seed = 2
"""


def run_belltomo(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "belltomo.cli", *argv], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise AssertionError(f"belltomo failed ({proc.returncode}): {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def sample_dir(tmp_path_factory):
    """Small result CSVs produced through the belltomo command line."""
    root = tmp_path_factory.mktemp("csv")
    sweep_cfg = root / "sweep.ini"
    sweep_cfg.write_text(SWEEP_INI)
    scan_cfg = root / "scan.ini"
    scan_cfg.write_text(SCAN_INI)
    run_belltomo("sweep", str(sweep_cfg), "--out", str(root))
    run_belltomo("scan", str(scan_cfg), "--out", str(root))
    return root
