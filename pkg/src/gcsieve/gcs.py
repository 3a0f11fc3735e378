"""Coherent-state manifolds: group displacements of a reference state.

A manifold is the orbit of a reference vector (by default the representation's
highest-weight vector) under single exponentials of the hermitian basis,
``exp(-i sum_k p_k X_k)|ref>``.  Over-parametrizing with the full basis keeps
the construction uniform across algebras; for distance computations the
redundancy is harmless.

``gcs_distance`` reports an upper bound on the infidelity between a state and
the manifold, obtained by multistart local optimization over the displacement
parameters.  The bound is monotone nonincreasing in the number of starts and
certified (search stops early) whenever a start reaches numerical zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.optimize

from . import opsalg
from .liealg import LieRepresentation
from .opsalg import Array
from .policy import POLICY, displacement_guard


@dataclass(frozen=True, eq=False)
class GcsManifold:
    rep: LieRepresentation
    reference: Array
    displacement_generators: tuple[Array, ...]
    param_dim: int
    param_box: Array          # per-parameter sampling/search half-widths
    mode_pairs: tuple[tuple[int, int], ...] = ()   # (x, p) parameter indices per bosonic mode

    @property
    def dim(self) -> int:
        return self.rep.dim


def gcs_manifold(rep: LieRepresentation, reference: Array | None = None) -> GcsManifold:
    """Build the displacement manifold of a representation.

    The reference defaults to the highest-weight vector; for reducible
    representations any unit vector (e.g. in a degenerate minimum-weight
    subspace) may be supplied instead.
    """
    ref = rep.highest_weight_vector if reference is None else opsalg.check_pure_state(reference)
    if ref.shape[0] != rep.dim:
        raise ValueError("reference dimension does not match the representation")
    gens, mode_pairs = [], []
    for label, x in zip(rep.hermitian_labels, rep.hermitian_basis):
        if label.startswith("x"):
            mode_pairs.append((len(gens), len(gens) + 1))
        gens.append(x)
    k = len(gens)
    if rep.is_bosonic:
        # |eta| <= sqrt(cutoff)/3 translates to ||(p_x, p_p)|| <= sqrt(2)*guard
        eta_box = displacement_guard(rep.cutoff)
        box = np.full(k, eta_box)
        for ix, ip in mode_pairs:
            box[ix] = box[ip] = eta_box  # per-component box inscribed in the eta disk
        # quadratic generators (squeeze rep): keep moderate to limit leakage
        for i, label in enumerate(rep.hermitian_labels):
            if "a^2" in label or label.startswith("n"):
                box[i] = min(box[i], 0.75)
    else:
        box = np.full(k, np.pi)
    return GcsManifold(rep=rep, reference=ref, displacement_generators=tuple(gens),
                       param_dim=k, param_box=box, mode_pairs=tuple(mode_pairs))


def _eta_per_mode(manifold: GcsManifold, params: Array) -> list[complex]:
    # exp(-i(p_x x + p_p p)) = exp(eta a^dag - eta^* a) with eta = (p_p - i p_x)/sqrt(2)
    return [complex(params[ip], -params[ix]) / np.sqrt(2) for ix, ip in manifold.mode_pairs]


def displace(manifold: GcsManifold, params) -> Array:
    """Apply exp(-i sum_k params_k X_k) to the reference state."""
    p = np.asarray(params, dtype=float).reshape(-1)
    if p.shape[0] != manifold.param_dim:
        raise ValueError(f"expected {manifold.param_dim} parameters, got {p.shape[0]}")
    if manifold.rep.is_bosonic:
        guard = displacement_guard(manifold.rep.cutoff)
        for eta in _eta_per_mode(manifold, p):
            if abs(eta) > guard * (1 + 1e-12):
                raise ValueError(
                    f"displacement amplitude |eta|={abs(eta):.3f} exceeds truncation guard {guard:.3f}"
                )
    gen = sum(c * x for c, x in zip(p, manifold.displacement_generators))
    w, v = np.linalg.eigh(gen)
    out = v @ (np.exp(-1j * w) * (v.conj().T @ manifold.reference))
    return out / np.linalg.norm(out)


def sample_gcs(manifold: GcsManifold, count: int, seed: int) -> list[Array]:
    """Deterministic manifold samples; parameters uniform in the guard box."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    return [displace(manifold, p) for p in sample_gcs_params(manifold, count, rng)]


def sample_gcs_params(manifold: GcsManifold, count: int, rng: np.random.Generator) -> Array:
    box = manifold.param_box
    draws = rng.uniform(-1.0, 1.0, size=(count, manifold.param_dim)) * box
    if manifold.rep.is_bosonic:
        # keep each mode's eta inside the guard disk (box corners poke out)
        guard = displacement_guard(manifold.rep.cutoff)
        for ix, ip in manifold.mode_pairs:
            r = np.hypot(draws[:, ix], draws[:, ip]) / np.sqrt(2)
            bad = r > guard
            scale = np.ones(count)
            scale[bad] = 0.99 * guard / r[bad]
            draws[:, ix] *= scale
            draws[:, ip] *= scale
    return draws


class DistanceResult(NamedTuple):
    infidelity: float
    params: Array
    n_starts: int
    agreed: bool

    def __float__(self) -> float:
        return self.infidelity


def _overlap_and_grad(params, manifold: GcsManifold, state: Array):
    """f = 1 - |<state|D(p)|ref>|^2 and its gradient via the spectral derivative of expm."""
    gen = sum(c * x for c, x in zip(params, manifold.displacement_generators))
    w, v = np.linalg.eigh(gen)
    phases = np.exp(-1j * w)
    u = v.conj().T @ state          # state in the eigenbasis
    r = v.conj().T @ manifold.reference
    c = np.vdot(u, phases * r)
    f = 1.0 - abs(c) ** 2
    # Daleckii-Krein first divided differences of exp(-i x)
    dw = w[:, None] - w[None, :]
    small = np.abs(dw) < 1e-12
    mid = np.exp(-1j * (w[:, None] + w[None, :]) / 2)
    phi = np.where(small, -1j * mid, (phases[:, None] - phases[None, :]) / np.where(small, 1.0, dw))
    grad = np.empty(len(params))
    for k, x in enumerate(manifold.displacement_generators):
        xt = v.conj().T @ x @ v
        dc = np.vdot(u, (phi * xt) @ r)
        grad[k] = -2.0 * np.real(np.conj(c) * dc)
    return f, grad


def _smart_starts(manifold: GcsManifold, state: Array) -> list[Array]:
    """Analytic initializations: align with <J> for spin manifolds, with <a> for bosons."""
    starts = []
    rep = manifold.rep
    if rep.name.startswith("su2") and manifold.param_dim == 3:
        jvec = np.array([opsalg.expect(x, state).real for x in manifold.displacement_generators])
        norm = np.linalg.norm(jvec)
        if norm > 1e-8:
            theta = np.arccos(np.clip(jvec[2] / norm, -1.0, 1.0))
            phi = np.arctan2(jvec[1], jvec[0])
            starts.append(theta * np.array([-np.sin(phi), np.cos(phi), 0.0]))
    elif rep.is_bosonic:
        # locate <a_i> from the hermitian pairs: <x> = sqrt(2) Re eta, <p> = sqrt(2) Im eta
        p0 = np.zeros(manifold.param_dim)
        guard = displacement_guard(rep.cutoff)
        for ix, ip in manifold.mode_pairs:
            xm = opsalg.expect(manifold.displacement_generators[ix], state).real
            pm = opsalg.expect(manifold.displacement_generators[ip], state).real
            eta = complex(xm, pm) / np.sqrt(2)
            if abs(eta) > 0.99 * guard:
                eta *= 0.99 * guard / abs(eta)
            p0[ip] = np.sqrt(2) * eta.real
            p0[ix] = -np.sqrt(2) * eta.imag
        starts.append(p0)
    starts.append(np.zeros(manifold.param_dim))
    return starts


def gcs_distance(state, manifold: GcsManifold, n_starts: int | None = None,
                 seed: int | None = None) -> DistanceResult:
    """Infidelity 1 - max_p |<state|D(p)|ref>|^2 by multistart local optimization.

    Returns an upper bound on the true infidelity.  The value is accepted when
    the two best starts agree within the policy tolerance; otherwise one extra
    batch of starts is run and the result flagged.
    """
    psi = opsalg.check_pure_state(state)
    if psi.shape[0] != manifold.dim:
        raise ValueError("state dimension does not match the manifold")
    n_starts = POLICY.distance_starts if n_starts is None else n_starts
    rng = np.random.default_rng(POLICY.distance_seed if seed is None else seed)
    bounds = [(-b, b) for b in manifold.param_box]

    def run(p0):
        res = scipy.optimize.minimize(
            _overlap_and_grad, p0, args=(manifold, psi), jac=True,
            method="L-BFGS-B", bounds=bounds,
            options={"maxiter": 400, "ftol": 1e-14, "gtol": 1e-12},
        )
        return float(res.fun), res.x

    starts = _smart_starts(manifold, psi)
    n_random = max(n_starts - len(starts), 0)
    starts += list(sample_gcs_params(manifold, n_random, rng))

    results = []
    for i, p0 in enumerate(starts):
        p0 = np.asarray(p0, dtype=float)
        f0, _ = _overlap_and_grad(p0, manifold, psi)
        # a start already at certified numerical zero cannot be improved
        results.append((f0, p0) if f0 <= POLICY.distance_zero_cut else run(p0))
        if results[-1][0] <= POLICY.distance_zero_cut:
            best = min(results, key=lambda t: t[0])
            return DistanceResult(max(best[0], 0.0), best[1], i + 1, True)

    results.sort(key=lambda t: t[0])
    agreed = len(results) > 1 and results[1][0] - results[0][0] <= POLICY.start_agree_tol
    used = len(results)
    if not agreed:
        extra = sample_gcs_params(manifold, POLICY.distance_extra_starts, rng)
        results += [run(p0) for p0 in extra]
        used += len(extra)
        results.sort(key=lambda t: t[0])
        agreed = results[1][0] - results[0][0] <= POLICY.start_agree_tol
    best_f, best_p = results[0]
    return DistanceResult(max(best_f, 0.0), best_p, used, agreed)
