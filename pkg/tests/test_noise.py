import math

import numpy as np
import pytest

from belltomo.noise import (
    NoiseConfig,
    RngStream,
    draw_perturbation,
    perturb_operator,
    random_unitary,
    simulate_counts,
    simulate_scan,
)
from belltomo.polarimetry import scan_operator
from belltomo.states import FAMILY_PHI, BellFamily, bell_state, pure_density

PHI_PLUS_RHO = pure_density(bell_state(BellFamily(FAMILY_PHI, 0.0)))


def stream(*labels):
    return RngStream.from_seed(99, *labels)


def test_noise_config_validation():
    NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0)
    with pytest.raises(ValueError):
        NoiseConfig(sigma=-0.1, p=0.0, n_mean=1000.0)
    with pytest.raises(ValueError):
        NoiseConfig(sigma=0.0, p=1.2, n_mean=1000.0)
    with pytest.raises(ValueError):
        NoiseConfig(sigma=0.0, p=0.0, n_mean=0.0)


def test_rng_stream_reproducible_and_distinct():
    a = stream("x").generator().normal(size=5)
    b = stream("x").generator().normal(size=5)
    c = stream("y").generator().normal(size=5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_rng_stream_child_extends_key():
    base = stream("x")
    assert base.child("poisson").key == base.key + RngStream.from_seed(0, "poisson").key[1:]
    a = base.child("poisson").generator().poisson(10.0, size=4)
    b = stream("x", "poisson").generator().poisson(10.0, size=4)
    np.testing.assert_array_equal(a, b)


def test_rng_stream_rejects_bad_labels():
    with pytest.raises(TypeError):
        RngStream.from_seed(0, 1.5)
    with pytest.raises(ValueError):
        RngStream.from_seed(0, -3)


def test_random_unitary_identity():
    np.testing.assert_allclose(random_unitary(0.0, 0.0, 0.0), np.eye(2), atol=1e-15)


def test_random_unitary_half_angle_diagonal():
    np.testing.assert_allclose(random_unitary(math.pi, 0.0, 0.0), np.diag([1j, -1j]), atol=1e-15)


def test_random_unitary_full_mixing_angle():
    got = random_unitary(0.0, 0.0, math.pi / 2)
    np.testing.assert_allclose(got, [[0, -1j], [-1j, 0]], atol=1e-15)


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(4)
    for _ in range(100):
        w = rng.uniform(-6, 6, size=3)
        u = random_unitary(*w)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_draw_perturbation_sigma_zero_identity_without_consuming_draws():
    gen = stream("p").generator()
    assert np.array_equal(draw_perturbation(0.0, gen), np.eye(4))
    # the generator position is untouched by the sigma = 0 short-circuit
    np.testing.assert_array_equal(gen.normal(size=3), stream("p").generator().normal(size=3))


def test_draw_perturbation_unitary():
    gen = stream("q").generator()
    for sigma in (0.05, 0.5, math.pi / 2):
        p = draw_perturbation(sigma, gen)
        np.testing.assert_allclose(p @ p.conj().T, np.eye(4), atol=1e-12)


def test_draw_perturbation_rejects_negative_sigma():
    with pytest.raises(ValueError):
        draw_perturbation(-1.0, stream("q").generator())


def test_draw_perturbation_dispersion_grows_with_sigma():
    def mean_distance(sigma):
        gen = stream("disp").generator()
        total = 0.0
        draws = 10_000
        for _ in range(draws):
            total += np.linalg.norm(draw_perturbation(sigma, gen) - np.eye(4))
        return total / draws

    assert mean_distance(math.pi / 4) > mean_distance(math.pi / 12)


def test_perturb_operator_sigma_zero_is_copy(mset):
    op = mset.operators[0]
    out = perturb_operator(op, 0.0, stream("z").generator())
    np.testing.assert_array_equal(out, op)
    assert out is not op


def test_perturb_operator_preserves_projector_structure(mset):
    gen = stream("w").generator()
    for op in mset.operators[:6]:
        out = perturb_operator(op, 0.7, gen)
        assert abs(np.trace(out).real - 1.0) < 1e-12
        np.testing.assert_allclose(out @ out, out, atol=1e-10)


def test_counts_noiseless_phi_plus_oracle(mset):
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("c"))
    byname = dict(zip(mset.labels, counts))
    assert abs(byname["HH"] - 500.0) < 1e-10
    for label in ("HV", "VH", "DA", "AD", "LL", "RR"):
        assert byname[label] < 1e-10
    # every count equals n_mean * trace(M rho) in the noiseless limit
    for op, got in zip(mset.operators, counts):
        want = 1000.0 * float(np.real(np.trace(op @ PHI_PLUS_RHO)))
        assert abs(got - max(want, 0.0)) < 1e-10


def test_counts_maximally_mixed_oracle(mset):
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(np.eye(4) / 4, mset, cfg, stream("c"))
    np.testing.assert_allclose(counts, 250.0, atol=1e-10)


def test_counts_full_dark_rate_oracle(mset):
    cfg = NoiseConfig(sigma=0.0, p=1.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("c"))
    np.testing.assert_allclose(counts, 250.0, atol=1e-10)


def test_counts_basis_blocks_sum_to_n_mean(mset):
    idx = {lab: i for i, lab in enumerate(mset.labels)}
    cfg = NoiseConfig(sigma=0.0, p=0.35, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("c"))
    for block in (("HH", "HV", "VH", "VV"), ("DD", "DA", "AD", "AA"), ("LL", "LR", "RL", "RR")):
        total = sum(counts[idx[lab]] for lab in block)
        assert abs(total - 1000.0) < 1e-9


def test_counts_setting_blocks_complete_under_noise(mset):
    # the four projectors of one analyzer setting share a perturbation, so
    # each setting's counts still resolve the identity: any sigma, any p
    cfg = NoiseConfig(sigma=0.9, p=0.2, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("blk"))
    idx = {lab: i for i, lab in enumerate(mset.labels)}
    bases = (("H", "V"), ("D", "A"), ("L", "R"))
    for b1 in bases:
        for b2 in bases:
            total = sum(counts[idx[a + b]] for a in b1 for b in b2)
            assert abs(total - 1000.0) < 1e-9


def test_counts_settings_perturbed_independently(mset):
    # different settings draw different perturbations: with the maximally
    # entangled input, HH and DD would both read 500 if errors were shared
    # and aligned, but their deviations must differ across settings
    cfg = NoiseConfig(sigma=0.5, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("ind"))
    idx = {lab: i for i, lab in enumerate(mset.labels)}
    deviations = {lab: counts[idx[lab]] - 500.0 for lab in ("HH", "DD", "LL")}
    vals = list(deviations.values())
    assert abs(vals[0] - vals[1]) > 1e-6 or abs(vals[0] - vals[2]) > 1e-6


def test_counts_deterministic_per_stream(mset):
    cfg = NoiseConfig(sigma=0.3, p=0.1, n_mean=1000.0, poisson_enabled=True)
    a = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("cell", 3))
    b = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("cell", 3))
    c = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("cell", 4))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_counts_poisson_stream_isolated_from_perturbations(mset):
    # with a maximally mixed state every perturbed projector still gives 1/4,
    # so counts expose the Poisson draws; sigma must not shift them
    quiet = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=True)
    noisy = NoiseConfig(sigma=0.8, p=0.0, n_mean=1000.0, poisson_enabled=True)
    a = simulate_counts(np.eye(4) / 4, mset, quiet, stream("iso"))
    b = simulate_counts(np.eye(4) / 4, mset, noisy, stream("iso"))
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_counts_poisson_moments(mset):
    for n_mean in (10.0, 1000.0):
        cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=n_mean, poisson_enabled=True)
        draws = []
        for i in range(2800):
            counts = simulate_counts(np.eye(4) / 4, mset, cfg, stream("pm", i))
            draws.extend(4.0 * counts)
        draws = np.array(draws)
        assert draws.size >= 100_000
        assert abs(draws.mean() - n_mean) < 0.01 * n_mean
        assert abs(draws.var() - n_mean) < 0.05 * n_mean


def test_counts_non_negative_under_heavy_noise(mset):
    cfg = NoiseConfig(sigma=math.pi / 2, p=0.0, n_mean=10.0, poisson_enabled=True)
    for i in range(10):
        counts = simulate_counts(PHI_PLUS_RHO, mset, cfg, stream("nn", i))
        assert np.all(counts >= 0.0)
        assert np.all(np.isfinite(counts))


def test_scan_noiseless_theory():
    thetas = np.linspace(0.0, 2 * math.pi, 25, endpoint=False)
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_scan(PHI_PLUS_RHO, thetas, cfg, np.eye(4), stream("s"))
    np.testing.assert_allclose(counts, 500.0 * np.sin(thetas) ** 2, atol=1e-9)


def test_scan_dark_count_oracle_at_zero_angle():
    cfg = NoiseConfig(sigma=0.0, p=0.25, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_scan(PHI_PLUS_RHO, [0.0], cfg, np.eye(4), stream("s"))
    assert abs(counts[0] - 62.5) < 1e-9


def test_scan_applies_fixed_arm_error():
    # swapping H and V on both arms turns M(0)=|HV> into |VH>, which has no
    # weight in the phi state, and turns M(pi/2)=|HH> into |VV>, which does
    swap = np.kron(np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 0]])).astype(complex)
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_scan(PHI_PLUS_RHO, [0.0, math.pi / 2], cfg, swap, stream("s"))
    assert counts[0] < 1e-9
    assert abs(counts[1] - 500.0) < 1e-9


def test_scan_rejects_non_unitary_fixed_error():
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    with pytest.raises(ValueError, match="unitary"):
        simulate_scan(PHI_PLUS_RHO, [0.0], cfg, np.diag([1.0, 2.0, 1.0, 1.0]), stream("s"))


def test_scan_deterministic_per_stream():
    thetas = np.linspace(0.0, 2 * math.pi, 9, endpoint=False)
    cfg = NoiseConfig(sigma=0.4, p=0.0, n_mean=1000.0, poisson_enabled=True)
    a = simulate_scan(PHI_PLUS_RHO, thetas, cfg, np.eye(4), stream("sd"))
    b = simulate_scan(PHI_PLUS_RHO, thetas, cfg, np.eye(4), stream("sd"))
    np.testing.assert_array_equal(a, b)


def test_scan_theory_matches_for_scan_operator():
    # consistency between the scan projector and the counts it produces
    thetas = [0.3, 1.1]
    cfg = NoiseConfig(sigma=0.0, p=0.0, n_mean=1000.0, poisson_enabled=False)
    counts = simulate_scan(PHI_PLUS_RHO, thetas, cfg, np.eye(4), stream("s"))
    for theta, got in zip(thetas, counts):
        want = 1000.0 * float(np.real(np.trace(scan_operator(theta) @ PHI_PLUS_RHO)))
        assert abs(got - want) < 1e-9
