"""Markovian evolution engine: dissipator, superoperator propagation, purity loss.

Rates are absorbed into the jump operators at model-compile time
(L <- sqrt(rate) L), so the dissipator is the rate-free sum
``sum_l (L rho L^dag - {L^dag L, rho}/2)``.  Propagation uses the dense
superoperator exponential with row-major vectorization, which is exact at
desk scale and avoids ODE error management.  Density matrices are
re-hermitized after each propagation step to strip 1e-15-scale asymmetry.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import liealg, opsalg
from .liealg import WclCertificate
from .opsalg import Array, check_operator, dag
from .policy import POLICY


@dataclass(frozen=True, eq=False)
class LindbladModel:
    dim: int
    hamiltonian: Array
    lindblads: tuple[Array, ...]
    labels: tuple[str, ...] = ()
    wcl: WclCertificate | None = None


@dataclass(frozen=True, eq=False)
class PurityTrace:
    times: Array
    purity: Array          # Tr rho(t)^2 from exact propagation
    rate_formula: Array    # 2 sum_l (Delta L_l(t))^2 on the initial pure state


def make_model(hamiltonian, lindblads, rates=None, labels=(), check_wcl: bool = True) -> LindbladModel:
    """Compile a model; optional per-operator rates are absorbed as sqrt(rate) L.

    Zero-rate operators are dropped.  A weak-coupling certificate is attached
    when every remaining operator satisfies the eigenoperator condition.
    """
    ops = [check_operator(op) for op in lindblads]
    dim = ops[0].shape[0] if ops else np.asarray(hamiltonian).shape[0]
    h = (np.zeros((dim, dim), dtype=complex) if hamiltonian is None
         else check_operator(hamiltonian, hermitian=True))
    if rates is not None:
        if len(rates) != len(ops):
            raise ValueError("rates and operators differ in length")
        if any(r < 0 for r in rates):
            raise ValueError("rates must be nonnegative")
        kept = [(np.sqrt(r) * op, i) for i, (op, r) in enumerate(zip(ops, rates)) if r > 0]
        ops = [op for op, _ in kept]
        if labels:
            labels = tuple(labels[i] for _, i in kept)
    for op in ops:
        if np.linalg.norm(op) == 0.0:
            raise ValueError("zero Lindblad operator")
        if op.shape[0] != dim:
            raise ValueError("operator dimensions disagree")
    wcl = None
    if check_wcl and ops and np.linalg.norm(h) > 0:
        cert = liealg.wcl_check(h, ops)
        if cert.passed:
            wcl = cert
    return LindbladModel(dim=dim, hamiltonian=h, lindblads=tuple(ops),
                         labels=tuple(labels), wcl=wcl)


def dissipator(model: LindbladModel, rho) -> Array:
    """sum_l (L rho L^dag - {L^dag L, rho}/2); traceless and hermiticity-preserving."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (model.dim, model.dim):
        raise ValueError("density matrix dimension does not match the model")
    out = np.zeros_like(r)
    for ell in model.lindblads:
        ld = dag(ell)
        ldl = ld @ ell
        out += ell @ r @ ld - 0.5 * (ldl @ r + r @ ldl)
    return out


def liouvillian(model: LindbladModel) -> Array:
    """Dense superoperator matrix acting on row-major vectorized density matrices."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = model.hamiltonian
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for ell in model.lindblads:
        ldl = dag(ell) @ ell
        sup += np.kron(ell, ell.conj())
        sup -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def is_unital(model: LindbladModel, atol: float = 1e-10) -> bool:
    acc = np.zeros((model.dim, model.dim), dtype=complex)
    scale = 1.0
    for ell in model.lindblads:
        acc += opsalg.comm(ell, dag(ell))
        scale = max(scale, np.linalg.norm(ell) ** 2)
    return bool(np.linalg.norm(acc) <= atol * scale)


def evolve(model: LindbladModel, rho0, times) -> list[Array]:
    """Propagate rho0 through exp(t L) at the requested ascending times."""
    ts = np.asarray(times, dtype=float).reshape(-1)
    if ts.size == 0:
        return []
    if np.any(ts < 0):
        raise ValueError("negative time")
    if np.any(np.diff(ts) < 0):
        raise ValueError("times must be ascending")
    if model.dim > POLICY.max_evolve_dim:
        raise ValueError(f"dimension {model.dim} exceeds the desk-scale propagation cap")
    rho = opsalg.check_density_matrix(rho0)
    sup = liouvillian(model)
    vec = rho.reshape(-1)
    out, t_now = [], 0.0
    propagators: dict[float, Array] = {}
    for t in ts:
        dt = t - t_now
        if dt > 0:
            key = round(float(dt), 15)
            if key not in propagators:
                propagators[key] = scipy.linalg.expm(dt * sup)
            vec = propagators[key] @ vec
            t_now = t
        r = vec.reshape(model.dim, model.dim)
        r = (r + r.conj().T) / 2
        vec = r.reshape(-1)
        out.append(opsalg.check_density_matrix(r))
    return out


def purity(rho) -> float:
    r = np.asarray(rho)
    return float(np.trace(r @ r).real)


def purity_rate(state, model: LindbladModel) -> float:
    """Instantaneous purity-loss rate of a pure state: 2 sum_l (Delta L_l)^2."""
    psi = opsalg.check_pure_state(state)
    return 2.0 * sum(opsalg.quasivariance(ell, psi) for ell in model.lindblads)


def average_purity_loss(state, model: LindbladModel, tau: float, n_steps: int = 8) -> float:
    """[Pi(tau) - Pi(0)] / tau from exact propagation (the time integral telescopes)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    psi = opsalg.check_pure_state(state)
    rho0 = opsalg.projector(psi)
    grid = np.linspace(0.0, tau, max(int(n_steps), 1) + 1)
    rho_tau = evolve(model, rho0, grid)[-1]
    return (purity(rho0) - purity(rho_tau)) / tau


def heisenberg_lindblads(model: LindbladModel, t: float) -> list[Array]:
    """First-order Heisenberg jump operators e^{itH} L e^{-itH}."""
    w, v = np.linalg.eigh(model.hamiltonian)
    phase = np.exp(1j * w * t)
    u = v @ np.diag(phase) @ v.conj().T
    return [u @ ell @ u.conj().T for ell in model.lindblads]


def purity_trace(model: LindbladModel, state, times) -> PurityTrace:
    """Exact purity along a trajectory plus the first-order rate formula."""
    psi = opsalg.check_pure_state(state)
    ts = np.asarray(times, dtype=float).reshape(-1)
    rhos = evolve(model, opsalg.projector(psi), ts)
    pur = np.array([purity(r) for r in rhos])
    rates = np.array([
        2.0 * sum(opsalg.quasivariance(op, psi) for op in heisenberg_lindblads(model, t))
        for t in ts
    ])
    return PurityTrace(times=ts, purity=pur, rate_formula=rates)


def steady_state(model: LindbladModel) -> Array:
    """Eigenvector of the generator with eigenvalue closest to zero, as a density matrix."""
    sup = liouvillian(model)
    w, v = np.linalg.eig(sup)
    idx = int(np.argmin(np.abs(w)))
    r = v[:, idx].reshape(model.dim, model.dim)
    r = (r + r.conj().T) / 2
    r /= np.trace(r).real
    return opsalg.check_density_matrix(r)


# ---------------------------------------------------------------------------
# model configs
# ---------------------------------------------------------------------------

_PAULI = {
    "sx": np.array([[0, 1], [1, 0]], dtype=complex),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sz": np.array([[1, 0], [0, -1]], dtype=complex),
    "sp": np.array([[0, 1], [0, 0]], dtype=complex),   # |e><g|, basis (|e>, |g>)
    "sm": np.array([[0, 0], [1, 0]], dtype=complex),
}


def operator_vocabulary(cfg: dict) -> dict[str, Array]:
    """Named operators available to config expressions, per model kind."""
    kind = cfg.get("kind")
    if kind == "two_level":
        vocab = dict(_PAULI)
        vocab["I"] = np.eye(2, dtype=complex)
        return vocab
    if kind == "spin":
        rep = liealg.spin_rep(cfg["J"])
    elif kind == "collective":
        rep = liealg.collective_spin_rep(cfg["N"])
    elif kind == "boson":
        cutoff, modes = cfg["cutoff"], cfg.get("modes", 1)
        a_local = liealg.destroy(cutoff)
        vocab = {"I": np.eye((cutoff + 1) ** modes, dtype=complex)}
        for i in range(modes):
            a = opsalg.embed_single_mode(a_local, i, modes, cutoff + 1)
            tag = str(i + 1) if modes > 1 else ""
            vocab[f"a{tag}"] = a
            vocab[f"ad{tag}"] = dag(a)
            vocab[f"n{tag}"] = dag(a) @ a
            vocab[f"a2{tag}"] = a @ a
            vocab[f"ad2{tag}"] = dag(a) @ dag(a)
        return vocab
    elif kind == "squeeze":
        rep = liealg.squeeze_rep(cfg["cutoff"])
        vocab = {lbl: op for lbl, op in zip(rep.basis_labels, rep.basis)}
        return {"I": vocab["1"], "a": vocab["a"], "ad": vocab["a^dag"],
                "a2": vocab["a^2"], "ad2": vocab["a^dag2"],
                "n": vocab["n+1/2"] - vocab["1"] / 2}
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    vocab = {lbl.replace("+", "p").replace("-", "m"): op
             for lbl, op in zip(rep.basis_labels, rep.basis)}
    vocab.update({"Jx": rep.hermitian_basis[0], "Jy": rep.hermitian_basis[1],
                  "Jz": rep.hermitian_basis[2], "I": np.eye(rep.dim, dtype=complex)})
    return vocab


def parse_operator(expr: str, vocab: dict[str, Array]) -> Array:
    """Evaluate a restricted operator expression: names, complex scalars, + - and scalar *."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Name):
            if node.id not in vocab:
                raise ValueError(f"unknown operator name {node.id!r}")
            return vocab[node.id]
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return complex(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Mult):
                if isinstance(left, np.ndarray) and isinstance(right, np.ndarray):
                    raise ValueError("operator products are not allowed; use named quadratics")
                return left * right
            if isinstance(left, np.ndarray) != isinstance(right, np.ndarray):
                raise ValueError("cannot add a scalar to an operator")
            return left + right if isinstance(node.op, ast.Add) else left - right
        raise ValueError(f"unsupported syntax in operator expression: {ast.dump(node)}")

    out = ev(ast.parse(expr, mode="eval"))
    if not isinstance(out, np.ndarray):
        raise ValueError("expression did not produce an operator")
    return out


def model_from_config(cfg: dict) -> LindbladModel:
    """Compile a model file {kind, ..., hamiltonian, lindblads: [{op, rate}]}."""
    vocab = operator_vocabulary(cfg)
    h_expr = cfg.get("hamiltonian")
    h = parse_operator(h_expr, vocab) if h_expr else None
    specs = cfg.get("lindblads", [])
    if not isinstance(specs, list):
        raise ValueError("lindblads must be a list of {op, rate} records")
    ops = [parse_operator(s["op"], vocab) for s in specs]
    rates = [float(s.get("rate", 1.0)) for s in specs]
    labels = tuple(s["op"] for s in specs)
    return make_model(h, ops, rates=rates, labels=labels)
