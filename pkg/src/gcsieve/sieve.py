"""Pointer-state search: minimize purity-loss functionals over pure states.

Two objectives are supported, both smooth functions of the state through
quasivariances of fixed operators:

* ``rate``: the instantaneous loss 2 sum_l (Delta L_l)^2;
* ``average``: the first-order loss averaged over one period, i.e. the mean
  of 2 sum_l (Delta L_l(t))^2 over an equispaced grid of Heisenberg times in
  [0, tau).  (The grid average is spectrally exact for the trigonometric time
  dependence the first-order picture produces.)

Minimization is projected gradient descent with backtracking line search on
the unit sphere, phase-gauge fixed by making the largest-magnitude amplitude
real positive; multistart results are merged and clustered into distinct
local minima.  An optional isometry restricts the search to a subspace (used
for truncation-guarded bosonic searches and for block-restricted spin
searches); quasivariances are always evaluated with the full-space operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gcs as gcs_mod
from . import liealg, opsalg
from .lindblad import LindbladModel, heisenberg_lindblads
from .opsalg import Array
from .policy import POLICY


@dataclass(frozen=True)
class Objective:
    kind: str = "rate"            # "rate" | "average"
    tau: float | None = None      # averaging window for "average"
    n_times: int = 16

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "average":
            out.update({"tau": self.tau, "n_times": self.n_times})
        return out


@dataclass(frozen=True, eq=False)
class QuasivarianceSum:
    """Weighted operator set with stacked arrays for fast evaluation."""

    ops: Array       # (m, d, d)
    ops_dag: Array   # (m, d, d)
    weights: Array   # (m,)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]


def compile_objective(model: LindbladModel, objective: Objective | str) -> QuasivarianceSum:
    if isinstance(objective, str):
        objective = Objective(kind=objective)
    if objective.kind == "rate":
        ops = list(model.lindblads)
        weights = np.ones(len(ops))
    elif objective.kind == "average":
        if objective.tau is None or objective.tau <= 0:
            raise ValueError("average objective needs a positive tau")
        k = int(objective.n_times)
        ops, w = [], []
        for t in np.arange(k) * (objective.tau / k):
            ops.extend(heisenberg_lindblads(model, t))
            w.extend([1.0 / k] * len(model.lindblads))
        weights = np.array(w)
    else:
        raise ValueError(f"unknown objective kind {objective.kind!r}")
    if not ops:
        raise ValueError("model has no Lindblad operators")
    stacked = np.array(ops)
    return QuasivarianceSum(ops=stacked, ops_dag=stacked.conj().transpose(0, 2, 1),
                            weights=weights)


def objective_value(state: Array, terms: QuasivarianceSum) -> float:
    y = terms.ops @ state
    means = y @ state.conj()
    qv = np.einsum("md,md->m", y.conj(), y).real - np.abs(means) ** 2
    return 2.0 * float(terms.weights @ qv)


def objective_value_batch(states: Array, terms: QuasivarianceSum) -> Array:
    """Objective on states given as rows of an (n, d) array."""
    vals = np.zeros(states.shape[0])
    for w, op in zip(terms.weights, terms.ops):
        y = states @ op.T
        means = np.einsum("nd,nd->n", states.conj(), y)
        vals += w * (np.einsum("nd,nd->n", y.conj(), y).real - np.abs(means) ** 2)
    return 2.0 * vals


def objective_gradient_full(state: Array, terms: QuasivarianceSum) -> Array:
    """Euclidean gradient of the objective, projected on the tangent space at `state`."""
    y = terms.ops @ state                         # O|psi>
    z = terms.ops_dag @ state                     # O^dag|psi>
    means = y @ state.conj()                      # <O>
    oo = np.einsum("mde,me->md", terms.ops_dag, y)   # O^dag O |psi>
    oo_mean = np.einsum("md,md->m", y.conj(), y).real
    g = 2.0 * np.einsum(
        "m,md->d", terms.weights,
        oo - oo_mean[:, None] * state
        - means.conj()[:, None] * (y - means[:, None] * state)
        - means[:, None] * (z - means.conj()[:, None] * state),
    )
    return g - state * np.vdot(state, g)


def gradient_of_objective(state, model: LindbladModel, objective: Objective | str = "rate") -> Array:
    """Tangent-space gradient of the chosen purity-loss objective at a pure state."""
    psi = opsalg.check_pure_state(state)
    return objective_gradient_full(psi, compile_objective(model, objective))


def _fix_phase(x: Array) -> Array:
    i = int(np.argmax(np.abs(x)))
    ph = x[i] / abs(x[i]) if abs(x[i]) > 0 else 1.0
    return x / ph


@dataclass
class DescentResult:
    state: Array
    value: float
    grad_norm: float
    iterations: int
    converged: bool


def projected_descent(terms: QuasivarianceSum, x0: Array, subspace: Array | None = None,
                      grad_tol: float | None = None, max_iters: int | None = None) -> DescentResult:
    """Projected gradient descent with backtracking line search on the unit sphere.

    Descent directions are preconditioned by the diagonal of sum_l w_l O_l^dag
    O_l (which tames the Fock-ladder stiffness of bosonic operators), steps
    are initialized with the Barzilai-Borwein quotient in that metric, and a
    non-monotone Armijo test (reference: worst of the last eight iterates)
    safeguards the line search.
    """
    grad_tol = POLICY.grad_norm_tol if grad_tol is None else grad_tol
    max_iters = POLICY.max_descent_iters if max_iters is None else max_iters
    v = subspace

    def full(x):
        return x if v is None else v @ x

    def value(x):
        return objective_value(full(x), terms)

    def grad(x):
        g = objective_gradient_full(full(x), terms)
        if v is not None:
            g = v.conj().T @ g
        return g - x * np.vdot(x, g)

    oo = np.einsum("m,mde,mef->df", terms.weights, terms.ops_dag, terms.ops)
    if v is not None:
        oo = v.conj().T @ oo @ v
    precond = 1.0 / (1.0 + 2.0 * np.real(np.diag(oo)))

    x = x0 / np.linalg.norm(x0)
    f = value(x)
    hist = [f]
    alpha = 0.5
    x_prev = g_prev = None
    it = 0
    gnorm = float("inf")
    while it < max_iters:
        g = grad(x)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            return DescentResult(_fix_phase(full(x)), f, gnorm, it, True)
        d = precond * g
        d -= x * np.vdot(x, d)
        slope = float(np.real(np.vdot(g, d)))
        if slope <= 1e-18 * gnorm ** 2:   # preconditioner degenerate here, fall back
            d, slope = g, gnorm ** 2
        if x_prev is not None:
            s = x - x_prev
            y = g - g_prev
            sy = float(np.real(np.vdot(s, y)))
            if sy > 1e-30:
                alpha = float(np.real(np.vdot(s, s / precond))) / sy
        alpha = min(max(alpha, 1e-10), 1e8)
        f_ref = max(hist[-8:])
        improved = False
        a = alpha
        for _ in range(60):
            cand = x - a * d
            cand /= np.linalg.norm(cand)
            f_cand = value(cand)
            if f_cand <= f_ref - 1e-4 * a * slope:
                improved = True
                break
            a /= 2
        if not improved:
            break
        x_prev, g_prev = x, g
        x, f = cand, f_cand
        hist.append(f)
        it += 1
    return DescentResult(_fix_phase(full(x)), f, gnorm, it, gnorm <= grad_tol)


@dataclass
class Minimizer:
    state: Array
    value: float
    gcs_infidelity: float | None
    grad_norm: float
    converged: bool


@dataclass
class SieveReport:
    model_id: str
    objective: dict
    minimizers: list[Minimizer]
    global_min_value: float
    n_starts: int
    seed: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "objective": self.objective,
            "global_min_value": self.global_min_value,
            "n_starts": self.n_starts,
            "seed": self.seed,
            "notes": list(self.notes),
            "minimizers": [
                {"value": m.value, "gcs_infidelity": m.gcs_infidelity,
                 "grad_norm": m.grad_norm, "converged": m.converged,
                 "state_re": m.state.real.tolist(), "state_im": m.state.imag.tolist()}
                for m in self.minimizers
            ],
        }


def _cluster_minima(results: list[DescentResult]) -> list[DescentResult]:
    """Keep one representative per cluster of states closer than the distinctness cut."""
    distinct: list[DescentResult] = []
    for res in sorted(results, key=lambda r: r.value):
        for kept in distinct:
            if 1.0 - opsalg.state_fidelity(res.state, kept.state) <= POLICY.distinct_infidelity:
                break
        else:
            distinct.append(res)
    return distinct


def sieve_search(model: LindbladModel, objective: Objective | str = "rate",
                 n_starts: int | None = None, seed: int = 0,
                 manifold: gcs_mod.GcsManifold | None = None,
                 subspace: Array | None = None,
                 start_states: list[Array] | None = None,
                 start_envelope: Array | None = None,
                 model_id: str = "model") -> SieveReport:
    """Multistart minimization of a purity-loss objective over pure states.

    ``subspace`` (isometry columns) restricts the search; operators still act
    on the full space, so truncated bosonic models can be guarded against
    edge artifacts.  ``start_envelope`` weights the random start amplitudes
    (e.g. a decaying Fock envelope keeps bosonic starts at moderate energy,
    away from the poorly conditioned truncation edge).  When a manifold is
    supplied, each distinct minimizer is scored with its manifold infidelity.
    """
    n_starts = POLICY.sieve_starts if n_starts is None else n_starts
    if n_starts < 8:
        raise ValueError("at least 8 starts are required")
    terms = compile_objective(model, objective)
    rng = np.random.default_rng(seed)
    sub_dim = terms.dim if subspace is None else subspace.shape[1]
    if start_envelope is not None and len(start_envelope) != sub_dim:
        raise ValueError("start envelope length must match the search dimension")

    starts: list[Array] = []
    for s in start_states or []:
        s = opsalg.check_pure_state(s)
        starts.append(s if subspace is None else subspace.conj().T @ s)
    while len(starts) < n_starts:
        x0 = opsalg.random_state(sub_dim, rng)
        if start_envelope is not None:
            x0 = x0 * start_envelope
            x0 = x0 / np.linalg.norm(x0)
        starts.append(x0)

    results, notes = [], []
    for i, x0 in enumerate(starts):
        res = projected_descent(terms, x0, subspace=subspace)
        results.append(res)
        if not res.converged:
            notes.append(f"start {i}: stopped at grad_norm {res.grad_norm:.2e} "
                         f"after {res.iterations} iterations")

    distinct = _cluster_minima(results)
    minimizers = []
    for res in distinct:
        inf = gcs_mod.gcs_distance(res.state, manifold).infidelity if manifold is not None else None
        minimizers.append(Minimizer(state=res.state, value=res.value,
                                    gcs_infidelity=inf, grad_norm=res.grad_norm,
                                    converged=res.converged))
    obj = objective if isinstance(objective, Objective) else Objective(kind=objective)
    return SieveReport(model_id=model_id, objective=obj.describe(), minimizers=minimizers,
                       global_min_value=min(r.value for r in results),
                       n_starts=n_starts, seed=seed, notes=notes)


# ---------------------------------------------------------------------------
# time-resolved search (beyond the weak-coupling limit)
# ---------------------------------------------------------------------------

def _harmonic_frequency(model: LindbladModel) -> float:
    """Frequency of a number-diagonal harmonic Hamiltonian; raises otherwise."""
    h = model.hamiltonian
    off = np.linalg.norm(h - np.diag(np.diag(h)))
    diag = np.diag(h).real
    spacing = np.diff(diag)
    if off > 1e-10 * max(np.linalg.norm(h), 1.0) or spacing.size == 0:
        raise ValueError("model Hamiltonian is not harmonic")
    omega = float(spacing.mean())
    if np.max(np.abs(spacing - omega)) > 1e-9 * max(abs(omega), 1.0):
        raise ValueError("model Hamiltonian is not harmonic")
    return omega


def linear_mode_coefficients(op: Array) -> tuple[complex, complex, float]:
    """Fit L = c a + d a^dag + const on the single-mode Fock space; returns (c, d, residual)."""
    dim = op.shape[0]
    a = liealg.destroy(dim - 1)
    basis = [a, opsalg.dag(a), np.eye(dim, dtype=complex)]
    cols = np.column_stack([b.reshape(-1) for b in basis])
    coef, *_ = np.linalg.lstsq(cols, op.reshape(-1), rcond=None)
    res = float(np.linalg.norm(cols @ coef - op.reshape(-1)) / max(np.linalg.norm(op), 1e-30))
    return complex(coef[0]), complex(coef[1]), res


def extract_squeezing(state: Array, a_op: Array) -> dict:
    """Squeezing parameters from centered second moments of a Gaussian-like state.

    tanh r = (<n> - |<a>|^2) / |<a^2> - <a>^2|, phase = arg(-(<a^2> - <a>^2)).
    """
    mu = opsalg.expect(a_op, state)
    n_c = opsalg.expect(opsalg.dag(a_op) @ a_op, state).real - abs(mu) ** 2
    a2_c = opsalg.expect(a_op @ a_op, state) - mu ** 2
    tanh_r = float(n_c / abs(a2_c)) if abs(a2_c) > 1e-14 else 0.0
    return {"tanh_r": tanh_r, "phase": float(np.angle(-a2_c)) if abs(a2_c) > 1e-14 else 0.0,
            "displacement": mu}


def time_resolved_sieve(model: LindbladModel, t_grid, n_starts: int | None = None,
                        seed: int = 0, subspace: Array | None = None,
                        manifold: gcs_mod.GcsManifold | None = None,
                        start_envelope: Array | None = None) -> list[SieveReport]:
    """Minimize the instantaneous first-order loss 2 sum_l (Delta L_l(t))^2 at each grid time.

    Requires a harmonic (number-diagonal, equally spaced) Hamiltonian.  Jump
    operators that are balanced linear combinations |c| = |d| of a and a^dag
    admit no normalizable minimizer and are rejected.
    """
    _harmonic_frequency(model)
    for ell in model.lindblads:
        c, d, res = linear_mode_coefficients(ell)
        if res < 1e-8 and abs(abs(c) - abs(d)) <= 1e-10 * max(abs(c) + abs(d), 1e-30):
            raise ValueError("|c| = |d|: the loss has no normalizable minimizer")
    reports = []
    for i, t in enumerate(np.asarray(t_grid, dtype=float)):
        frozen = LindbladModel(dim=model.dim, hamiltonian=model.hamiltonian,
                               lindblads=tuple(heisenberg_lindblads(model, t)),
                               labels=model.labels, wcl=None)
        rep = sieve_search(frozen, "rate", n_starts=n_starts, seed=seed + i,
                           manifold=manifold, subspace=subspace,
                           start_envelope=start_envelope, model_id=f"t={t:.6g}")
        rep.objective = {"kind": "instantaneous", "t": float(t)}
        reports.append(rep)
    return reports
