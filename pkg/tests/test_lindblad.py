import numpy as np
import pytest
import scipy.linalg

from gcsieve import liealg, opsalg
from gcsieve.lindblad import (
    average_purity_loss, dissipator, evolve, heisenberg_lindblads, is_unital,
    liouvillian, make_model, model_from_config, purity, purity_rate,
    purity_trace, steady_state,
)

SM = np.array([[0, 0], [1, 0]], dtype=complex)   # |g><e| with basis (|e>, |g>)
SP = np.array([[0, 1], [0, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def random_model(rng, dim, n_ops=2, with_h=True):
    h = None
    if with_h:
        h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (h + h.conj().T) / 2
    ops = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
           for _ in range(n_ops)]
    return make_model(h, ops, check_wcl=False)


def test_dissipator_dark_state():
    model = make_model(None, [SM])
    ground = np.zeros((2, 2), dtype=complex)
    ground[1, 1] = 1.0
    assert np.linalg.norm(dissipator(model, ground)) <= 1e-14


def test_dissipator_excited_state():
    model = make_model(None, [SM])
    excited = np.zeros((2, 2), dtype=complex)
    excited[0, 0] = 1.0
    expected = np.diag([-1.0, 1.0]).astype(complex)
    assert np.allclose(dissipator(model, excited), expected, atol=1e-14)


def test_dissipator_traceless_on_random_states():
    rng = np.random.default_rng(2)
    model = random_model(rng, 5, n_ops=3)
    for _ in range(10):
        psi = opsalg.random_state(5, rng)
        out = dissipator(model, opsalg.projector(psi))
        assert abs(np.trace(out)) <= 1e-12 * np.linalg.norm(out)
        assert np.linalg.norm(out - out.conj().T) <= 1e-12 * np.linalg.norm(out)


def test_liouvillian_matches_generator_action():
    rng = np.random.default_rng(3)
    model = random_model(rng, 4, n_ops=2)
    sup = liouvillian(model)
    h = model.hamiltonian
    for _ in range(20):
        r = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        r = (r + r.conj().T) / 2
        direct = -1j * (h @ r - r @ h) + dissipator(model, r)
        via_sup = (sup @ r.reshape(-1)).reshape(4, 4)
        assert np.linalg.norm(direct - via_sup) <= 1e-10 * max(np.linalg.norm(direct), 1.0)


def test_liouvillian_dephasing_keeps_diagonal():
    model = make_model(None, [SZ])
    rho = np.diag([0.3, 0.7]).astype(complex)
    assert np.linalg.norm(dissipator(model, rho)) <= 1e-14


def test_liouvillian_trace_preservation_left_null_vector():
    rng = np.random.default_rng(5)
    model = random_model(rng, 4)
    sup = liouvillian(model)
    vec_id = np.eye(4, dtype=complex).reshape(-1)
    assert np.linalg.norm(vec_id @ sup) <= 1e-10 * np.linalg.norm(sup)


def test_liouvillian_unital_right_null_vector():
    # collective spin jumps are hermitian, hence unital
    rep = liealg.spin_rep(1)
    model = make_model(None, list(rep.hermitian_basis), check_wcl=False)
    assert is_unital(model)
    sup = liouvillian(model)
    vec_mixed = (np.eye(3, dtype=complex) / 3).reshape(-1)
    assert np.linalg.norm(sup @ vec_mixed) <= 1e-10


def test_liouvillian_spectrum_no_positive_real_parts():
    rng = np.random.default_rng(7)
    for _ in range(5):
        model = random_model(rng, 4)
        w = np.linalg.eigvals(liouvillian(model))
        assert w.real.max() <= 1e-9


def test_evolve_amplitude_damping_closed_form():
    gamma = 0.8
    model = make_model(None, [SM], rates=[gamma])
    excited = np.zeros((2, 2), dtype=complex)
    excited[0, 0] = 1.0
    times = np.linspace(0.0, 4.0, 9)
    rhos = evolve(model, excited, times)
    for t, r in zip(times, rhos):
        assert abs(r[0, 0].real - np.exp(-gamma * t)) <= 1e-10


def test_evolve_hamiltonian_only_keeps_purity():
    h = np.diag([0.0, 1.0, 2.5]).astype(complex)
    model = make_model(h, [], check_wcl=False)
    psi = np.array([1, 1, 1], dtype=complex) / np.sqrt(3)
    rhos = evolve(model, opsalg.projector(psi), np.linspace(0, 5, 11))
    for r in rhos:
        assert abs(purity(r) - 1.0) <= 1e-10


def test_evolve_validates_inputs():
    model = make_model(None, [SM])
    rho = np.diag([0.5, 0.5]).astype(complex)
    with pytest.raises(ValueError):
        evolve(model, rho, [-1.0])
    with pytest.raises(ValueError):
        evolve(model, rho, [1.0, 0.5])
    assert np.allclose(evolve(model, rho, [0.0])[0], rho)


def test_evolve_outputs_valid_density_matrices():
    rng = np.random.default_rng(11)
    model = random_model(rng, 6, n_ops=2)
    psi = opsalg.random_state(6, rng)
    rhos = evolve(model, opsalg.projector(psi), np.linspace(0, 2, 8))
    for r in rhos:
        assert abs(np.trace(r).real - 1.0) <= 1e-9
        assert np.linalg.eigvalsh((r + r.conj().T) / 2).min() >= -1e-8


def test_thermal_two_level_steady_state():
    from gcsieve.scenarios import two_level_thermal_model
    nbar, g1 = 2.0, 0.7
    model = two_level_thermal_model(g1, nbar * g1, nbar)
    rho_ss = steady_state(model)
    pg = (nbar + 1) / (2 * nbar + 1)
    assert abs(rho_ss[1, 1].real - pg) <= 1e-10
    # high temperature pushes the steady state to the maximally mixed state
    model_hot = two_level_thermal_model(g1, 1000 * g1, 1000.0)
    assert np.linalg.norm(steady_state(model_hot) - np.eye(2) / 2) <= 1e-3
    # and every initial state lands there
    psi = np.array([1, 1j], dtype=complex) / np.sqrt(2)
    final = evolve(model, opsalg.projector(psi), [20.0 / g1])[0]
    assert np.linalg.norm(final - rho_ss) <= 1e-8


def test_purity_rate_reference_values():
    cutoff = 25
    rep = liealg.boson_rep(cutoff)
    a = rep.basis[1]
    gamma = 0.9
    model = make_model(None, [a], rates=[gamma], check_wcl=False)
    from gcsieve.gcs import displace, gcs_manifold
    ccs = displace(gcs_manifold(rep), [0.3, 0.8])
    assert purity_rate(ccs, model) <= 1e-12
    fock1 = np.zeros(rep.dim, dtype=complex)
    fock1[1] = 1.0
    assert abs(purity_rate(fock1, model) - 2 * gamma) <= 1e-12
    model_up = make_model(None, [opsalg.dag(a)], rates=[gamma], check_wcl=False)
    assert abs(purity_rate(rep.highest_weight_vector, model_up) - 2 * gamma) <= 1e-12


def test_purity_rate_matches_finite_difference():
    rng = np.random.default_rng(13)
    for _ in range(50):
        dim = int(rng.integers(2, 13))
        model = random_model(rng, dim, n_ops=int(rng.integers(1, 4)))
        psi = opsalg.random_state(dim, rng)
        rate = purity_rate(psi, model)
        sup = liouvillian(model)
        scale = max(np.linalg.norm(sup, 2), 1.0)
        h = 1e-5 / scale
        rho0 = opsalg.projector(psi).reshape(-1)
        rp = (scipy.linalg.expm(h * sup) @ rho0).reshape(dim, dim)
        rm = (scipy.linalg.expm(-h * sup) @ rho0).reshape(dim, dim)
        fd = -(purity(rp) - purity(rm)) / (2 * h)
        assert abs(rate - fd) <= 1e-6 * max(abs(fd), 1e-3)


def test_average_purity_loss_first_order_regime():
    # weak coupling: average over a short window matches the instantaneous rate
    gamma, tau = 1e-3, 1.0
    h = 1.3 * np.diag([1.0, -1.0]).astype(complex)
    model = make_model(h, [SM], rates=[gamma])
    psi = np.array([0.8, 0.6], dtype=complex)
    rate = purity_rate(psi, model)
    avg = average_purity_loss(psi, model, tau)
    assert abs(avg - rate) <= 3 * gamma * tau * abs(rate)


def test_average_purity_loss_small_tau_limit():
    rng = np.random.default_rng(17)
    model = random_model(rng, 4)
    psi = opsalg.random_state(4, rng)
    rate = purity_rate(psi, model)
    avg = average_purity_loss(psi, model, 1e-5, n_steps=1)
    assert abs(avg - rate) <= 1e-4 * max(abs(rate), 1.0)


def test_average_purity_loss_dark_state():
    model = make_model(None, [SM])
    ground = np.array([0.0, 1.0], dtype=complex)
    for tau in (0.1, 1.0, 5.0):
        assert abs(average_purity_loss(ground, model, tau)) <= 1e-12
    with pytest.raises(ValueError):
        average_purity_loss(ground, model, 0.0)


def test_heisenberg_lindblads_harmonic():
    cutoff = 12
    a = liealg.destroy(cutoff)
    omega, t = 1.4, 0.77
    h = omega * (opsalg.dag(a) @ a)
    model = make_model(h, [a], check_wcl=False)
    (lt,) = heisenberg_lindblads(model, t)
    assert np.linalg.norm(lt - np.exp(-1j * omega * t) * a) <= 1e-9
    assert np.linalg.norm(heisenberg_lindblads(model, 0.0)[0] - a) <= 1e-14

    c, d = 0.9, 0.4j
    model2 = make_model(h, [c * a + d * opsalg.dag(a)], check_wcl=False)
    (lt2,) = heisenberg_lindblads(model2, t)
    expected = c * np.exp(-1j * omega * t) * a + d * np.exp(1j * omega * t) * opsalg.dag(a)
    assert np.linalg.norm(lt2 - expected) <= 1e-9


def test_heisenberg_matches_wcl_phase():
    cutoff = 10
    a = liealg.destroy(cutoff)
    omega = 0.9
    model = make_model(omega * opsalg.dag(a) @ a, [a])
    assert model.wcl is not None and model.wcl.passed
    lam = model.wcl.lambdas[0]
    for t in (0.3, 1.1):
        (lt,) = heisenberg_lindblads(model, t)
        assert np.linalg.norm(lt - np.exp(1j * lam * t) * a) <= 1e-9


def test_unital_purity_monotone():
    rep = liealg.spin_rep(1.5)
    model = make_model(None, list(rep.hermitian_basis), rates=[0.4] * 3, check_wcl=False)
    assert is_unital(model)
    rng = np.random.default_rng(19)
    psi = opsalg.random_state(rep.dim, rng)
    trace = purity_trace(model, psi, np.linspace(0, 4, 25))
    assert np.all(np.diff(trace.purity) <= 1e-8)
    assert np.all(trace.purity <= 1.0 + 1e-10) and np.all(trace.purity > 0)


def test_trace_preservation_along_trajectories():
    rng = np.random.default_rng(23)
    model = random_model(rng, 5)
    psi = opsalg.random_state(5, rng)
    rhos = evolve(model, opsalg.projector(psi), np.linspace(0, 3, 10))
    for r in rhos:
        assert abs(np.trace(r).real - 1.0) <= 1e-9


def test_make_model_validation():
    with pytest.raises(ValueError):
        make_model(None, [np.zeros((2, 2))])
    with pytest.raises(ValueError):
        make_model(None, [SM], rates=[-1.0])
    with pytest.raises(ValueError):
        make_model(np.array([[0, 1], [0, 0]]), [SM])   # non-hermitian H
    model = make_model(None, [SM, SP], rates=[1.0, 0.0])
    assert len(model.lindblads) == 1   # zero-rate channels dropped


def test_model_from_config():
    cfg = {
        "kind": "boson", "cutoff": 8,
        "hamiltonian": "1.5*n",
        "lindblads": [{"op": "a", "rate": 0.5}, {"op": "0.5*a + 0.1*ad", "rate": 1.0}],
    }
    model = model_from_config(cfg)
    assert model.dim == 9 and len(model.lindblads) == 2
    cfg_spin = {"kind": "spin", "J": 1.0, "hamiltonian": "0.3*Jz",
                "lindblads": [{"op": "Jm", "rate": 1.0}]}
    assert model_from_config(cfg_spin).dim == 3
    with pytest.raises(ValueError):
        model_from_config({"kind": "boson", "cutoff": 8, "lindblads": [{"op": "a*a"}]})
    with pytest.raises(ValueError):
        model_from_config({"kind": "boson", "cutoff": 8, "lindblads": [{"op": "__import__"}]})
    with pytest.raises(ValueError):
        model_from_config({"kind": "nope", "lindblads": []})
