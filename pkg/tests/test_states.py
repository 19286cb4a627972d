import math

import numpy as np
import pytest

from belltomo.states import (
    FAMILIES,
    FAMILY_PHI,
    FAMILY_PSI,
    BellFamily,
    bell_state,
    phase_sample,
    pure_density,
    validate_density_matrix,
    with_dark_counts,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def test_family_tags():
    assert FAMILY_PHI == "phi"
    assert FAMILY_PSI == "psi"
    assert set(FAMILIES) == {"phi", "psi"}


def test_bell_family_rejects_unknown_tag():
    with pytest.raises(ValueError, match="family"):
        BellFamily("chi", 0.0)


@pytest.mark.parametrize("phase", [-0.1, 2 * math.pi, 7.0, float("nan")])
def test_bell_family_rejects_phase_outside_range(phase):
    with pytest.raises(ValueError):
        BellFamily(FAMILY_PHI, phase)


def test_phi_zero_phase_is_plus_state():
    ket = bell_state(BellFamily(FAMILY_PHI, 0.0))
    np.testing.assert_allclose(ket, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-15)


def test_psi_zero_phase_is_plus_state():
    ket = bell_state(BellFamily(FAMILY_PSI, 0.0))
    np.testing.assert_allclose(ket, [0, INV_SQRT2, INV_SQRT2, 0], atol=1e-15)


def test_phi_pi_phase_is_minus_state():
    ket = bell_state(BellFamily(FAMILY_PHI, math.pi))
    np.testing.assert_allclose(ket, [INV_SQRT2, 0, 0, -INV_SQRT2], atol=1e-15)


@pytest.mark.parametrize("tag", [FAMILY_PHI, FAMILY_PSI])
def test_bell_state_unit_norm_across_phases(tag):
    for fam in phase_sample(tag, 17):
        ket = bell_state(fam)
        assert abs(np.vdot(ket, ket).real - 1.0) < 1e-12


def test_phase_carried_on_second_branch():
    phase = 1.234
    ket = bell_state(BellFamily(FAMILY_PHI, phase))
    assert abs(ket[3] - INV_SQRT2 * np.exp(1j * phase)) < 1e-14
    ket = bell_state(BellFamily(FAMILY_PSI, phase))
    assert abs(ket[2] - INV_SQRT2 * np.exp(1j * phase)) < 1e-14


def test_pure_density_is_valid_projector():
    rho = pure_density(bell_state(BellFamily(FAMILY_PHI, 0.7)))
    validate_density_matrix(rho)
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)


def test_pure_density_rejects_unnormalized():
    with pytest.raises(ValueError):
        pure_density(np.array([1.0, 1.0, 0.0, 0.0]))


def test_dark_counts_zero_rate_is_identity_map():
    rho = pure_density(bell_state(BellFamily(FAMILY_PHI, 0.0)))
    np.testing.assert_allclose(with_dark_counts(rho, 0.0), rho, atol=0)


def test_dark_counts_full_rate_is_maximally_mixed():
    rho = pure_density(bell_state(BellFamily(FAMILY_PSI, 2.0)))
    np.testing.assert_allclose(with_dark_counts(rho, 1.0), np.eye(4) / 4, atol=1e-15)


def test_dark_counts_preserve_trace_and_validity():
    rho = pure_density(bell_state(BellFamily(FAMILY_PHI, 4.2)))
    for p in (0.1, 0.25, 0.6):
        mixed = with_dark_counts(rho, p)
        validate_density_matrix(mixed)
        assert abs(np.trace(mixed).real - 1.0) < 1e-12


def test_dark_counts_rejects_rate_outside_unit_interval():
    rho = np.eye(4) / 4
    with pytest.raises(ValueError):
        with_dark_counts(rho, -0.01)
    with pytest.raises(ValueError):
        with_dark_counts(rho, 1.01)


def test_phase_sample_grid():
    fams = phase_sample(FAMILY_PHI, 20)
    assert len(fams) == 20
    for j, fam in enumerate(fams):
        assert fam.tag == FAMILY_PHI
        assert abs(fam.phase - 2 * math.pi * j / 20) < 1e-15


def test_phase_sample_rejects_non_positive_count():
    with pytest.raises(ValueError):
        phase_sample(FAMILY_PHI, 0)


def test_validate_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        validate_density_matrix(np.eye(4) / 2)


def test_validate_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(ValueError):
        validate_density_matrix(np.diag([1.2, -0.2, 0.0, 0.0]))


def test_validate_density_matrix_rejects_non_hermitian():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.3
    with pytest.raises(ValueError):
        validate_density_matrix(m)
