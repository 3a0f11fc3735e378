"""Concrete representations of the dynamical Lie algebras used by the toolkit.

Shipped families: spin-J irreps of su(2), truncated single/multi-mode
oscillator algebras, the single-mode squeezing algebra (linear plus quadratic
operators), and collective-spin representations on N qubits.  Also provides
the weak-coupling-limit eigenoperator check for Lindblad operators.

Truncated bosonic operators violate the canonical commutation relation at the
edge of the Fock space, so all bosonic algebra statements are guarded: they
are asserted on the subspace that excludes the top two levels of each mode.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import opsalg
from .opsalg import Array, check_operator, comm, dag, kron_all
from .policy import POLICY


@dataclass(frozen=True, eq=False)
class LieRepresentation:
    """A named operator basis with structure metadata.

    ``basis`` is the complex algebra basis (e.g. J+, J-, Jz), while
    ``hermitian_basis`` spans the same real algebra with hermitian elements;
    the scalar uncertainty functional sums variances over the latter.
    ``gram`` holds the trace-form inner products tr(Xj Xk)/dim.
    ``raising_ops`` annihilate the reference (highest-weight) vector.
    """

    name: str
    dim: int
    basis: tuple[Array, ...]
    basis_labels: tuple[str, ...]
    hermitian_basis: tuple[Array, ...]
    hermitian_labels: tuple[str, ...]
    raising_ops: tuple[Array, ...]
    highest_weight_vector: Array
    gram: Array
    casimir: Array
    cutoff: int | None = None
    modes: int = 1
    guard_isometry: Array | None = None   # columns span the truncation-safe subspace

    @property
    def is_bosonic(self) -> bool:
        return self.cutoff is not None


@dataclass(frozen=True)
class WclCertificate:
    """Per-operator eigenoperator fit [H, L] = lambda L with residuals."""

    lambdas: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return all(r <= POLICY.wcl_residual_atol for r in self.residuals)


def _finalize(name, basis, basis_labels, herm, herm_labels, raising, hw,
              cutoff=None, modes=1, guard=None) -> LieRepresentation:
    dim = herm[0].shape[0]
    herm = tuple(check_operator(x, hermitian=True) for x in herm)
    hw = opsalg.check_pure_state(hw)
    for r in raising:
        if np.linalg.norm(r @ hw) > 1e-10:
            raise ValueError("reference vector is not annihilated by the raising operators")
    gram = np.array([[np.trace(a @ b).real / dim for b in herm] for a in herm])
    casimir = sum(x @ x for x in herm)
    return LieRepresentation(
        name=name, dim=dim, basis=tuple(basis), basis_labels=tuple(basis_labels),
        hermitian_basis=herm, hermitian_labels=tuple(herm_labels),
        raising_ops=tuple(raising), highest_weight_vector=hw,
        gram=gram, casimir=casimir, cutoff=cutoff, modes=modes, guard_isometry=guard,
    )


# ---------------------------------------------------------------------------
# spin algebras
# ---------------------------------------------------------------------------

def spin_rep(j: float) -> LieRepresentation:
    """Spin-J irrep of su(2) in the Dicke basis |J,J>, |J,J-1>, ..., |J,-J>."""
    two_j = round(2 * j)
    if abs(2 * j - two_j) > 1e-12 or two_j < 1:
        raise ValueError(f"J must be a positive half-integer, got {j}")
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((dim, dim), dtype=complex)
    # J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
    for k in range(1, dim):
        mm = m[k]
        jp[k - 1, k] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    hw = np.zeros(dim, dtype=complex)
    hw[0] = 1.0
    return _finalize(
        f"su2-spin{j:g}", [jp, jm, jz], ["J+", "J-", "Jz"],
        [jx, jy, jz], ["Jx", "Jy", "Jz"], [jp], hw,
    )


def collective_spin_rep(n: int) -> LieRepresentation:
    """Collective su(2) action J_a = sum_i sigma_a^(i)/2 on (C^2)^(x N)."""
    if not (1 <= n <= 8):
        raise ValueError(f"N must lie in 1..8, got {n}")
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    dim = 2 ** n
    jx = np.zeros((dim, dim), dtype=complex)
    jy = np.zeros_like(jx)
    jz = np.zeros_like(jx)
    for i in range(n):
        jx += opsalg.embed_single_mode(sx / 2, i, n, 2)
        jy += opsalg.embed_single_mode(sy / 2, i, n, 2)
        jz += opsalg.embed_single_mode(sz / 2, i, n, 2)
    jp = jx + 1j * jy
    jm = jx - 1j * jy
    hw = np.zeros(dim, dtype=complex)
    hw[0] = 1.0  # |up>^(x N)
    return _finalize(
        f"su2-collective-{n}", [jp, jm, jz], ["J+", "J-", "Jz"],
        [jx, jy, jz], ["Jx", "Jy", "Jz"], [jp], hw,
    )


# ---------------------------------------------------------------------------
# bosonic algebras (truncated Fock spaces)
# ---------------------------------------------------------------------------

def destroy(cutoff: int) -> Array:
    """Single-mode annihilation operator on Fock levels 0..cutoff."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)).astype(complex), k=1)


def _mode_guard_isometry(cutoff: int, modes: int) -> Array:
    keep = cutoff + 1 - POLICY.boson_guard_levels
    local = np.eye(cutoff + 1, dtype=complex)[:, :keep]
    return kron_all([local] * modes)


def boson_rep(cutoff: int, modes: int = 1) -> LieRepresentation:
    """Oscillator algebra {1, a_i, a_i^dag} on a truncated Fock space."""
    if cutoff < 4:
        raise ValueError(f"cutoff must be at least 4, got {cutoff}")
    if modes < 1:
        raise ValueError("modes must be positive")
    a_local = destroy(cutoff)
    dim = (cutoff + 1) ** modes
    eye = np.eye(dim, dtype=complex)
    basis, labels, herm, herm_labels, raising = [eye], ["1"], [], [], []
    for i in range(modes):
        a = opsalg.embed_single_mode(a_local, i, modes, cutoff + 1)
        tag = str(i + 1) if modes > 1 else ""
        basis += [a, dag(a)]
        labels += [f"a{tag}", f"a{tag}^dag"]
        herm += [(a + dag(a)) / np.sqrt(2), (a - dag(a)) / (1j * np.sqrt(2))]
        herm_labels += [f"x{tag}", f"p{tag}"]
        raising.append(a)
    hw = np.zeros(dim, dtype=complex)
    hw[0] = 1.0
    name = "h3-boson" if modes == 1 else f"h3-boson-{modes}mode"
    return _finalize(name, basis, labels, herm, herm_labels, raising, hw,
                     cutoff=cutoff, modes=modes,
                     guard=_mode_guard_isometry(cutoff, modes))


def squeeze_rep(cutoff: int) -> LieRepresentation:
    """Linear plus quadratic bosonic operators {1, a, a^dag, a^2, a^dag2, n+1/2}."""
    if cutoff < 6:
        raise ValueError(f"cutoff must be at least 6, got {cutoff}")
    a = destroy(cutoff)
    ad = dag(a)
    dim = cutoff + 1
    eye = np.eye(dim, dtype=complex)
    num = ad @ a + eye / 2
    basis = [eye, a, ad, a @ a, ad @ ad, num]
    labels = ["1", "a", "a^dag", "a^2", "a^dag2", "n+1/2"]
    herm = [
        (a + ad) / np.sqrt(2), (a - ad) / (1j * np.sqrt(2)),
        (a @ a + ad @ ad) / 2, (a @ a - ad @ ad) / 2j, num,
    ]
    herm_labels = ["x", "p", "(a^2+a^dag2)/2", "(a^2-a^dag2)/2i", "n+1/2"]
    hw = np.zeros(dim, dtype=complex)
    hw[0] = 1.0
    return _finalize("h6-squeeze", basis, labels, herm, herm_labels, [a], hw,
                     cutoff=cutoff, modes=1, guard=_mode_guard_isometry(cutoff, 1))


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------

def closure_residual(rep: LieRepresentation) -> float:
    """Worst-case residual of [b_i, b_j] after least-squares projection onto the basis.

    For bosonic representations the residual is evaluated on the guarded
    subspace only, since truncation breaks the commutation relations at the
    top of the Fock ladder.
    """
    guard = rep.guard_isometry
    def restrict(m):
        return m if guard is None else guard.conj().T @ m @ guard

    cols = np.column_stack([restrict(b).reshape(-1) for b in rep.basis])
    worst = 0.0
    for i, bi in enumerate(rep.basis):
        for bj in rep.basis[i + 1:]:
            c = restrict(comm(bi, bj)).reshape(-1)
            coef, *_ = np.linalg.lstsq(cols, c, rcond=None)
            res = np.linalg.norm(cols @ coef - c)
            scale = max(np.linalg.norm(c), 1.0)
            worst = max(worst, res / scale)
    return worst


def wcl_check(hamiltonian, lindblads) -> WclCertificate:
    """Fit the eigenoperator condition [H, L] = lambda L for each Lindblad operator.

    lambda is the least-squares value tr(L^dag [H, L]) / tr(L^dag L); the
    residual is ||[H, L] - lambda L|| / ||L||.  Both are invariant under
    rescaling L by a nonzero complex constant.
    """
    h = check_operator(hamiltonian, hermitian=True)
    lambdas, residuals = [], []
    for ell in lindblads:
        op = check_operator(ell)
        nrm2 = np.trace(dag(op) @ op).real
        if nrm2 <= 0.0 or np.linalg.norm(op) == 0.0:
            raise ValueError("zero Lindblad operator")
        c = comm(h, op)
        lam = np.trace(dag(op) @ c) / nrm2
        residuals.append(float(np.linalg.norm(c - lam * op) / np.linalg.norm(op)))
        lambdas.append(float(lam.real))
    return WclCertificate(tuple(lambdas), tuple(residuals))


def orthonormalize_basis(rep: LieRepresentation) -> LieRepresentation:
    """Rescale the hermitian basis so the trace-form Gram matrix is a multiple of I.

    The overall scale is chosen to preserve the geometric mean of the current
    Gram diagonal, which leaves the shipped spin bases (bare J_a operators)
    untouched; the scalar uncertainty of a spin rep therefore stays the plain
    sum of J_a variances.
    """
    g = rep.gram
    n = g.shape[0]
    diag = np.diag(g)
    if diag.min() <= 0:
        raise ValueError("degenerate Gram matrix")
    off = np.linalg.norm(g - np.diag(diag))
    if off <= POLICY.gram_diag_rtol * diag.max() and np.ptp(diag) <= POLICY.gram_diag_rtol * diag.max():
        return rep
    w, v = np.linalg.eigh(g)
    if w.min() <= 1e-12 * w.max():
        raise ValueError("degenerate Gram matrix")
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    target = float(np.exp(np.mean(np.log(diag))))
    coeff = np.sqrt(target) * inv_sqrt
    new_herm = tuple(
        sum(coeff[i, k] * rep.hermitian_basis[k] for k in range(n)) for i in range(n)
    )
    new_gram = np.array([[np.trace(a @ b).real / rep.dim for b in new_herm] for a in new_herm])
    casimir = sum(x @ x for x in new_herm)
    return replace(rep, hermitian_basis=new_herm, gram=new_gram, casimir=casimir)


def is_orthonormalized(rep: LieRepresentation) -> bool:
    diag = np.diag(rep.gram)
    off = np.linalg.norm(rep.gram - np.diag(diag))
    scale = diag.max()
    return bool(diag.min() > 0 and off <= 1e-8 * scale and np.ptp(diag) <= 1e-8 * scale)


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

def rep_from_config(cfg: dict) -> LieRepresentation:
    """Build a representation from a config record {name, parameters}."""
    name = cfg.get("name")
    params = cfg.get("parameters", {})
    if name == "spin":
        return spin_rep(params["J"])
    if name == "boson":
        return boson_rep(params["cutoff"], params.get("modes", 1))
    if name == "squeeze":
        return squeeze_rep(params["cutoff"])
    if name == "collective":
        return collective_spin_rep(params["N"])
    raise ValueError(f"unknown representation name {name!r}")
