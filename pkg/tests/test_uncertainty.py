import numpy as np
import pytest

from gcsieve import opsalg
from gcsieve.gcs import gcs_manifold
from gcsieve.liealg import boson_rep, collective_spin_rep, spin_rep
from gcsieve.uncertainty import (
    gcs_uncertainty_bound, invariant_uncertainty, invariant_uncertainty_batch,
    qfi_matrix, verify_uncertainty_bound,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
UP = np.array([1.0, 0.0], dtype=complex)


def test_qfi_pauli_diagonal():
    q = qfi_matrix(UP, [SX, SY, SZ])
    assert np.allclose(np.diag(q.entries).real, [4.0, 4.0, 0.0], atol=1e-12)


def test_qfi_single_generator_is_four_variances():
    rng = np.random.default_rng(6)
    k = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    k = k + k.conj().T
    psi = opsalg.random_state(5, rng)
    q = qfi_matrix(psi, [k])
    assert abs(q.entries[0, 0].real - 4 * opsalg.quasivariance(k, psi)) <= 1e-10


def test_qfi_eigenstate_has_zero_entry():
    q = qfi_matrix(UP, [SZ])
    assert abs(q.entries[0, 0]) <= 1e-12


def test_qfi_rejects_nonhermitian():
    with pytest.raises(ValueError):
        qfi_matrix(UP, [np.array([[0, 1], [0, 0]])])


def test_qfi_matrix_invariants():
    rng = np.random.default_rng(17)
    gens = []
    for _ in range(4):
        k = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        gens.append(k + k.conj().T)
    for _ in range(10):
        psi = opsalg.random_state(6, rng)
        q = qfi_matrix(psi, gens)
        assert np.min(np.diag(q.entries).real) >= -1e-10
        assert abs(np.trace(q.entries).imag) <= 1e-10
        assert np.min(np.linalg.eigvalsh(q.symmetrized)) >= -1e-8
        # literal matrix is hermitian, so the entrywise real part is its symmetrization
        assert np.linalg.norm(q.entries - q.entries.conj().T) <= 1e-10


def test_invariant_uncertainty_reference_values():
    for j in (0.5, 1.0, 1.5, 2.0):
        rep = spin_rep(j)
        assert abs(invariant_uncertainty(rep.highest_weight_vector, rep) - j) <= 1e-10
    rep1 = spin_rep(1)
    m0 = np.array([0, 1, 0], dtype=complex)
    assert abs(invariant_uncertainty(m0, rep1) - 2.0) <= 1e-10
    vac_rep = boson_rep(20)
    assert abs(invariant_uncertainty(vac_rep.highest_weight_vector, vac_rep) - 1.0) <= 1e-10


def test_invariant_uncertainty_group_invariance():
    rng = np.random.default_rng(23)
    rep = spin_rep(1.5)
    for _ in range(100):
        psi = opsalg.random_state(rep.dim, rng)
        u0 = invariant_uncertainty(psi, rep)
        c = rng.normal(size=3)
        gen = sum(ci * x for ci, x in zip(c, rep.hermitian_basis))
        rotated = opsalg.mat_exp(-1j * gen) @ psi
        assert abs(invariant_uncertainty(rotated, rep) - u0) <= 1e-9


def test_trace_qfi_equals_invariant_uncertainty():
    rng = np.random.default_rng(31)
    for rep in (spin_rep(1), spin_rep(2)):
        for _ in range(10):
            psi = opsalg.random_state(rep.dim, rng)
            q = qfi_matrix(psi, rep.hermitian_basis)
            assert abs(np.trace(q.entries).real / 4 - invariant_uncertainty(psi, rep)) <= 1e-12


def test_batch_matches_scalar():
    rng = np.random.default_rng(37)
    rep = spin_rep(1.5)
    states = opsalg.random_states(rep.dim, 40, rng)
    batch = invariant_uncertainty_batch(states, rep)
    for psi, val in zip(states, batch):
        assert abs(invariant_uncertainty(psi, rep) - val) <= 1e-12


def test_cramer_rao_saturation_two_level():
    # family e^{-i theta K}|up> with K = sigma_x/2: QFI = 4 (Delta K)^2 = 1.
    # measuring sigma_y is the optimal analytic estimator at theta = 0:
    # Var(theta_hat) = (Delta sigma_y)^2 / |d<sigma_y>/dtheta|^2
    k = SX / 2
    qfi = 4 * opsalg.quasivariance(k, UP)
    h = 1e-6
    def mean_sy(theta):
        state = opsalg.mat_exp(-1j * theta * k) @ UP
        return opsalg.expect(SY, state).real
    slope = (mean_sy(h) - mean_sy(-h)) / (2 * h)
    var_sy = opsalg.quasivariance(SY, UP)
    est_var = var_sy / slope ** 2
    assert qfi * est_var >= 1.0 - 1e-9
    assert abs(qfi * est_var - 1.0) <= 1e-6   # the optimal observable saturates

    # a sub-optimal observable must sit strictly above the bound
    m_bad = (SY + 0.8 * SZ)
    slope_bad = ((opsalg.expect(m_bad, opsalg.mat_exp(-1j * h * k) @ UP).real
                  - opsalg.expect(m_bad, opsalg.mat_exp(1j * h * k) @ UP).real) / (2 * h))
    var_bad = opsalg.quasivariance(m_bad, UP)
    assert qfi * var_bad / slope_bad ** 2 >= 1.0 - 1e-9


def test_bound_values():
    for j in (0.5, 1.0, 1.5, 2.0):
        assert abs(gcs_uncertainty_bound(spin_rep(j)) - j) <= 1e-10
    assert abs(gcs_uncertainty_bound(boson_rep(16)) - 1.0) <= 1e-10
    # two collective qubits: the reference sits in the triplet block, bound = 1
    assert abs(gcs_uncertainty_bound(collective_spin_rep(2)) - 1.0) <= 1e-10


def test_verify_bound_spin_half_all_states_attain():
    rep = spin_rep(0.5)
    report = verify_uncertainty_bound(rep, 300, seed=5)
    assert report["bound_respected"]
    assert abs(report["min_over_random"] - 0.5) <= 1e-9
    assert abs(report["attainment_gap"]) <= 1e-9
    # every pure qubit state is a coherent state
    checks = {c["eps"]: c for c in report["eps_checks"]}
    assert checks[1e-3]["n_hits"] == 300
    assert checks[1e-3]["max_gcs_infidelity"] <= 1e-10
    assert report["infidelity_monotone_in_eps"]


def test_verify_bound_spin_one_random_sweep():
    report = verify_uncertainty_bound(spin_rep(1), 2000, seed=9)
    assert report["min_over_random"] >= 1.0 - 1e-9
    assert report["bound_respected"]


def test_verify_bound_spin_two():
    rep = spin_rep(2)
    report = verify_uncertainty_bound(rep, 500, seed=13)
    assert abs(report["bound"] - 2.0) <= 1e-10
    assert report["min_over_random"] >= 2.0 - 1e-9
    man = gcs_manifold(rep)
    assert invariant_uncertainty(rep.highest_weight_vector, rep) <= 2.0 + 1e-10


def test_invariant_uncertainty_requires_orthonormal_basis():
    from dataclasses import replace
    rep = spin_rep(1)
    skew = tuple(x * s for x, s in zip(rep.hermitian_basis, (2.0, 1.0, 1.0)))
    gram = np.array([[np.trace(a @ b).real / rep.dim for b in skew] for a in skew])
    bad = replace(rep, hermitian_basis=skew, gram=gram)
    with pytest.raises(ValueError):
        invariant_uncertainty(rep.highest_weight_vector, bad)
