import numpy as np
import pytest

from gcsieve import liealg, opsalg
from gcsieve.liealg import (
    boson_rep, closure_residual, collective_spin_rep, orthonormalize_basis,
    rep_from_config, spin_rep, squeeze_rep, wcl_check,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def test_spin_half_is_pauli_algebra():
    rep = spin_rep(0.5)
    jx, jy, jz = rep.hermitian_basis
    assert np.allclose(jx, SX / 2, atol=1e-12)
    assert np.allclose(jz, SZ / 2, atol=1e-12)
    assert np.linalg.norm(opsalg.comm(jx, jy) - 1j * jz) <= 1e-12


def test_spin_one_jz_from_ladder_construction():
    rep = spin_rep(1)
    assert np.allclose(np.diag(rep.basis[2]), [1, 0, -1])
    # ladder oracle: J+|1,m> = sqrt(2 - m(m+1)) |1,m+1>
    jp = rep.basis[0]
    assert abs(jp[0, 1] - np.sqrt(2)) <= 1e-12
    assert abs(jp[1, 2] - np.sqrt(2)) <= 1e-12


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.0])
def test_spin_casimir_identity(j):
    rep = spin_rep(j)
    assert np.linalg.norm(rep.casimir - j * (j + 1) * np.eye(rep.dim)) <= 1e-12


def test_spin_rejects_bad_j():
    with pytest.raises(ValueError):
        spin_rep(0.3)
    with pytest.raises(ValueError):
        spin_rep(0)


def test_boson_commutator_on_guarded_subspace():
    rep = boson_rep(12)
    a = rep.basis[1]
    c = opsalg.comm(a, opsalg.dag(a))
    # [a, a^dag] = 1 away from the truncation edge (top row excluded)
    assert np.allclose(c[:12, :12], np.eye(12), atol=1e-12)
    assert abs(c[12, 12] + 12) <= 1e-12


def test_boson_two_modes_commute():
    rep = boson_rep(5, modes=2)
    a1, a2 = rep.basis[1], rep.basis[3]
    assert np.linalg.norm(opsalg.comm(a1, opsalg.dag(a2))) <= 1e-12
    assert np.linalg.norm(opsalg.comm(a1, a2)) <= 1e-12


def test_boson_number_spectrum():
    rep = boson_rep(9)
    a = rep.basis[1]
    w, _ = opsalg.hermitian_eigen(opsalg.dag(a) @ a)
    assert np.allclose(w, np.arange(10), atol=1e-12)


def test_boson_rejects_small_cutoff():
    with pytest.raises(ValueError):
        boson_rep(3)


def test_squeeze_commutators():
    rep = squeeze_rep(14)
    a = rep.basis[1]
    a2, ad2, num = rep.basis[3], rep.basis[4], rep.basis[5]
    guard = rep.guard_isometry
    c = opsalg.comm(a2, ad2)
    expected = 4 * (num - np.eye(rep.dim) / 2) + 2 * np.eye(rep.dim)
    restricted = guard.conj().T @ (c - expected) @ guard
    assert np.linalg.norm(restricted) <= 1e-12
    assert np.linalg.norm(opsalg.comm(num, a) + a) <= 1e-12   # [n+1/2, a] = -a, exact


def test_squeeze_displacement_has_even_parity():
    rep = squeeze_rep(20)
    a = rep.basis[1]
    xi = 0.3 + 0.2j
    gen = np.conj(xi) * (a @ a) - xi * (opsalg.dag(a) @ opsalg.dag(a))
    state = opsalg.mat_exp(gen) @ rep.highest_weight_vector
    assert np.linalg.norm(state[1::2]) <= 1e-12


def test_squeeze_rejects_small_cutoff():
    with pytest.raises(ValueError):
        squeeze_rep(5)


def test_collective_one_spin_equals_spin_half():
    c1 = collective_spin_rep(1)
    s = spin_rep(0.5)
    for a, b in zip(c1.hermitian_basis, s.hermitian_basis):
        assert np.allclose(a, b, atol=1e-12)


def test_collective_two_spins_casimir():
    rep = collective_spin_rep(2)
    w, _ = opsalg.hermitian_eigen(rep.casimir)
    assert np.allclose(sorted(w), [0, 2, 2, 2], atol=1e-12)


def test_collective_four_spins_casimir_multiplicities():
    rep = collective_spin_rep(4)
    w, _ = opsalg.hermitian_eigen(rep.casimir)
    counts = {val: int(np.sum(np.abs(w - val) < 1e-8)) for val in (6.0, 2.0, 0.0)}
    assert counts == {6.0: 5, 2.0: 9, 0.0: 2}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_collective_multiplicities_are_standard(n):
    rep = collective_spin_rep(n)
    w, _ = opsalg.hermitian_eigen(rep.casimir)
    total = 0
    for j2 in sorted(set(np.round(w, 8)), reverse=True):
        j = 0.5 * (-1 + np.sqrt(1 + 4 * j2))
        j = round(2 * j) / 2
        count = int(np.sum(np.abs(w - j2) < 1e-8))
        dim_j = int(round(2 * j + 1))
        assert count % dim_j == 0
        # standard multiplicity of spin j in n qubits
        def binom(a, b):
            from math import comb
            return comb(a, b) if 0 <= b <= a else 0
        k = int(n / 2 - j)
        expected_mult = binom(n, k) - binom(n, k - 1)
        assert count // dim_j == expected_mult
        total += count
    assert total == 2 ** n


def test_collective_rejects_out_of_range():
    with pytest.raises(ValueError):
        collective_spin_rep(0)
    with pytest.raises(ValueError):
        collective_spin_rep(9)


def test_closure_residual_all_shipped_reps():
    reps = [spin_rep(0.5), spin_rep(2), boson_rep(10), boson_rep(5, modes=2),
            squeeze_rep(12), collective_spin_rep(3)]
    for rep in reps:
        assert closure_residual(rep) <= 1e-9, rep.name


def test_spin_variance_sum_casimir_decomposition():
    rng = np.random.default_rng(21)
    for j in (0.5, 1.0, 2.0):
        rep = spin_rep(j)
        for _ in range(100):
            psi = opsalg.random_state(rep.dim, rng)
            total = sum(opsalg.quasivariance(x, psi) for x in rep.hermitian_basis)
            jvec = np.array([opsalg.expect(x, psi).real for x in rep.hermitian_basis])
            assert abs(total - (j * (j + 1) - jvec @ jvec)) <= 1e-10


def test_highest_weight_annihilated():
    for rep in (spin_rep(1.5), boson_rep(8), squeeze_rep(10), collective_spin_rep(3)):
        for r in rep.raising_ops:
            assert np.linalg.norm(r @ rep.highest_weight_vector) <= 1e-10


def test_wcl_harmonic_cases():
    cutoff = 12
    a = liealg.destroy(cutoff)
    omega = 1.7
    h = omega * opsalg.dag(a) @ a
    cert = wcl_check(h, [a])
    assert cert.passed and abs(cert.lambdas[0] + omega) <= 1e-9

    cert2 = wcl_check(h, [a @ a])
    assert cert2.passed and abs(cert2.lambdas[0] + 2 * omega) <= 1e-9

    cert3 = wcl_check(h, [a + opsalg.dag(a)])
    assert not cert3.passed and cert3.residuals[0] > 0.1


def test_wcl_zero_operator_raises():
    with pytest.raises(ValueError):
        wcl_check(SZ, [np.zeros((2, 2))])


def test_wcl_scaling_invariance():
    cutoff = 10
    a = liealg.destroy(cutoff)
    h = 0.9 * opsalg.dag(a) @ a
    base = wcl_check(h, [a])
    for c in (2.0, -0.5j, 3.1 - 0.7j):
        scaled = wcl_check(h, [c * a])
        assert abs(scaled.lambdas[0] - base.lambdas[0]) <= 1e-9
        assert abs(scaled.residuals[0] - base.residuals[0]) <= 1e-9


def test_orthonormalize_spin_half_unchanged():
    rep = spin_rep(0.5)
    out = orthonormalize_basis(rep)
    for a, b in zip(out.hermitian_basis, rep.hermitian_basis):
        assert np.allclose(a, b, atol=1e-14)


def test_orthonormalize_spin_one_gram():
    rep = spin_rep(1)
    # tr(Ja Jb) = delta_ab J(J+1)(2J+1)/3; gram stores tr/dim
    expected = 1 * 2 * 3 / 3 / 3
    assert np.allclose(rep.gram, expected * np.eye(3), atol=1e-12)


def test_orthonormalize_rescaled_basis():
    from dataclasses import replace
    rep = spin_rep(1)
    jx, jy, jz = rep.hermitian_basis
    skewed = (2.0 * jx, 0.5 * jy + 0.1 * jx, 1.3 * jz)
    gram = np.array([[np.trace(x @ y).real / rep.dim for y in skewed] for x in skewed])
    bad = replace(rep, hermitian_basis=skewed, gram=gram)
    fixed = orthonormalize_basis(bad)
    cond = np.linalg.cond(fixed.gram)
    assert abs(cond - 1.0) <= 1e-10
    diag = np.diag(fixed.gram)
    assert np.ptp(diag) <= 1e-10 * diag.max()


def test_orthonormalize_degenerate_gram_raises():
    from dataclasses import replace
    rep = spin_rep(1)
    jx, jy, _ = rep.hermitian_basis
    skewed = (jx, jx, jy)
    gram = np.array([[np.trace(x @ y).real / rep.dim for y in skewed] for x in skewed])
    with pytest.raises(ValueError):
        orthonormalize_basis(replace(rep, hermitian_basis=skewed, gram=gram))


def test_rep_from_config():
    assert rep_from_config({"name": "spin", "parameters": {"J": 1.5}}).dim == 4
    assert rep_from_config({"name": "boson", "parameters": {"cutoff": 6, "modes": 2}}).dim == 49
    assert rep_from_config({"name": "squeeze", "parameters": {"cutoff": 8}}).dim == 9
    assert rep_from_config({"name": "collective", "parameters": {"N": 3}}).dim == 8
    with pytest.raises(ValueError):
        rep_from_config({"name": "fermion"})
