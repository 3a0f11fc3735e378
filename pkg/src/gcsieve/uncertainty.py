"""Quantum Fisher information and the group-invariant scalar uncertainty.

For a pure state and hermitian generators K_j the QFI matrix is
``4 <(K_j - <K_j>)(K_k - <K_k>)>``; stored both literally (complex, hermitian)
and as its entrywise real part.  Only the trace is basis-independent: summed
over a trace-orthonormalized hermitian algebra basis it yields the invariant
uncertainty, which is bounded below by its value on the coherent-state
manifold and attains the bound exactly there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gcs as gcs_mod
from . import opsalg
from .liealg import LieRepresentation, is_orthonormalized
from .opsalg import Array
from .policy import POLICY


@dataclass(frozen=True, eq=False)
class QfiMatrix:
    generators: tuple[Array, ...]
    entries: Array        # literal complex matrix, hermitian
    symmetrized: Array    # entrywise real part, PSD

    @property
    def scalar_uncertainty(self) -> float:
        return float(np.trace(self.entries).real / 4.0)


def qfi_matrix(state, generators) -> QfiMatrix:
    """QFI matrix of a pure state for a list of hermitian generators."""
    psi = opsalg.check_pure_state(state)
    gens = tuple(opsalg.check_operator(k, hermitian=True) for k in generators)
    shifted = []
    for k in gens:
        mean = np.vdot(psi, k @ psi).real
        shifted.append(k @ psi - mean * psi)
    w = np.array(shifted)                      # rows: (K_j - <K_j>)|psi>
    entries = 4.0 * (w.conj() @ w.T)
    return QfiMatrix(generators=gens, entries=entries, symmetrized=entries.real.copy())


def invariant_uncertainty(state, rep: LieRepresentation) -> float:
    """Sum of variances over the representation's trace-orthonormalized hermitian basis."""
    psi = opsalg.check_pure_state(state)
    if psi.shape[0] != rep.dim:
        raise ValueError("state dimension does not match the representation")
    if not is_orthonormalized(rep):
        raise ValueError("representation basis is not orthonormalized")
    total = np.vdot(psi, rep.casimir @ psi).real
    for x in rep.hermitian_basis:
        total -= np.vdot(psi, x @ psi).real ** 2
    return float(total)


def invariant_uncertainty_batch(states: Array, rep: LieRepresentation) -> Array:
    """Vectorized invariant uncertainty for states given as rows of a matrix."""
    if not is_orthonormalized(rep):
        raise ValueError("representation basis is not orthonormalized")
    conj = states.conj()
    out = np.einsum("nd,de,ne->n", conj, rep.casimir, states).real
    for x in rep.hermitian_basis:
        out -= np.einsum("nd,de,ne->n", conj, x, states).real ** 2
    return out


def gcs_uncertainty_bound(rep: LieRepresentation) -> float:
    """The manifold value of the invariant uncertainty; a lower bound over all pure states.

    Evaluated at the highest-weight reference vector, where the bound is
    attained; the group invariance of the functional extends the value to the
    whole coherent-state orbit.
    """
    if rep.highest_weight_vector is None:
        raise ValueError("representation has no reference state")
    return invariant_uncertainty(rep.highest_weight_vector, rep)


def verify_uncertainty_bound(rep: LieRepresentation, n_random: int, seed: int,
                             eps_grid: tuple[float, ...] = (1e-3, 1e-2),
                             manifold: gcs_mod.GcsManifold | None = None) -> dict:
    """Random-state sweep of the uncertainty bound and its attainment.

    Checks that no Haar-random pure state dips below the bound, and that
    states within ``eps`` of the bound are close to the manifold (the maximal
    observed manifold infidelity is reported per eps and must be monotone).
    """
    rng = np.random.default_rng(seed)
    states = opsalg.random_states(rep.dim, n_random, rng)
    values = invariant_uncertainty_batch(states, rep)
    bound = gcs_uncertainty_bound(rep)
    manifold = gcs_mod.gcs_manifold(rep) if manifold is None else manifold
    eps_checks = []
    for eps in sorted(eps_grid):
        hits = np.nonzero(values <= bound + eps)[0]
        worst = 0.0
        for i in hits:
            worst = max(worst, gcs_mod.gcs_distance(states[i], manifold).infidelity)
        eps_checks.append({"eps": float(eps), "n_hits": int(hits.size),
                           "max_gcs_infidelity": float(worst)})
    monotone = all(a["max_gcs_infidelity"] <= b["max_gcs_infidelity"] + 1e-12
                   for a, b in zip(eps_checks, eps_checks[1:]))
    return {
        "rep": rep.name,
        "dim": rep.dim,
        "bound": float(bound),
        "n_random": int(n_random),
        "seed": int(seed),
        "min_over_random": float(values.min()),
        "attainment_gap": float(values.min() - bound),
        "bound_respected": bool(values.min() >= bound - 1e-9),
        "eps_checks": eps_checks,
        "infidelity_monotone_in_eps": bool(monotone),
    }
