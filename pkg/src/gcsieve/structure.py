"""Reducible-representation analysis: irrep blocks, DFS extraction, NS factors.

Decomposition is restricted to collective su(2) representations (tensor
products of qubits), which covers every reducible model the toolkit ships.
Blocks are located as simultaneous eigenspaces of the quadratic Casimir and
Jz; multiplicity bases come from the highest-weight level of each Casimir
eigenspace and are lowered with J- to fill the irrep copies, giving
isometries under which the collective generators act as I_n (x) j_a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import liealg, lindblad, opsalg, sieve
from .liealg import LieRepresentation
from .lindblad import LindbladModel
from .opsalg import Array
from .policy import POLICY


@dataclass(frozen=True, eq=False)
class Block:
    j: float
    irrep_dim: int
    multiplicity: int
    isometry: Array   # dim x (multiplicity * irrep_dim), ordered |k> (x) |j, j-m_idx>


@dataclass(frozen=True, eq=False)
class IrrepDecomposition:
    rep: LieRepresentation
    blocks: tuple[Block, ...]

    def block(self, j: float) -> Block:
        for b in self.blocks:
            if abs(b.j - j) < 1e-9:
                return b
        raise KeyError(f"no block with j={j}")

    def summary(self) -> list[dict]:
        return [{"j": b.j, "irrep_dim": b.irrep_dim, "multiplicity": b.multiplicity}
                for b in self.blocks]


def _canonical_basis(columns: Array) -> Array:
    """Deterministic orthonormal basis of a subspace given spanning columns.

    Gram-Schmidt over the projections of the coordinate axes (in index order),
    then phase-fix and sort lexicographically by rounded amplitudes so the
    result does not depend on eigensolver degeneracy choices.
    """
    dim, k = columns.shape
    proj = columns @ columns.conj().T
    basis: list[Array] = []
    for i in range(dim):
        v = proj[:, i].copy()
        for b in basis:
            v -= np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            basis.append(v / nrm)
        if len(basis) == k:
            break
    fixed = []
    for v in basis:
        lead = v[np.argmax(np.abs(v))]
        fixed.append(v * (abs(lead) / lead))
    keys = [tuple(np.round(np.concatenate([v.real, v.imag]), 10)) for v in fixed]
    order = sorted(range(len(fixed)), key=lambda i: keys[i])
    return np.column_stack([fixed[i] for i in order])


def decompose(rep: LieRepresentation) -> IrrepDecomposition:
    """Split a collective su(2) representation into irrep blocks with isometries."""
    if not rep.name.startswith("su2"):
        raise ValueError("decomposition is implemented for collective su(2) representations")
    if liealg.closure_residual(rep) > POLICY.closure_atol:
        raise ValueError("provided basis does not close under commutation")
    jp, jm, jz = rep.basis[0], rep.basis[1], rep.basis[2]
    cas_vals, cas_vecs = np.linalg.eigh(rep.casimir)
    blocks = []
    done = np.zeros(rep.dim, dtype=bool)
    for value in sorted(set(np.round(cas_vals, 8)), reverse=True):
        sel = np.abs(cas_vals - value) < 1e-7
        if not np.any(sel) or np.all(done[sel]):
            continue
        done |= sel
        j = 0.5 * (-1.0 + np.sqrt(1.0 + 4.0 * max(value, 0.0)))
        j = round(2 * j) / 2.0
        space = cas_vecs[:, sel]
        # highest-weight level: Jz = j within the Casimir eigenspace
        jz_block = space.conj().T @ jz @ space
        w, v = np.linalg.eigh(jz_block)
        top = space @ v[:, np.abs(w - j) < 1e-7]
        if top.shape[1] == 0:
            raise ValueError(f"no highest-weight level found for j={j}")
        if np.linalg.norm(jp @ top) > 1e-8 * max(np.linalg.norm(top), 1.0):
            raise ValueError("highest-weight level is not annihilated by J+")
        hw = _canonical_basis(top)
        mult = hw.shape[1]
        irrep_dim = int(round(2 * j + 1))
        cols = []
        for k in range(mult):
            v_m = hw[:, k]
            chain = [v_m]
            for _ in range(irrep_dim - 1):
                v_m = jm @ v_m
                v_m = v_m / np.linalg.norm(v_m)
                chain.append(v_m)
            cols.extend(chain)
        blocks.append(Block(j=j, irrep_dim=irrep_dim, multiplicity=mult,
                            isometry=np.column_stack(cols)))
    blocks.sort(key=lambda b: -b.j)
    total = sum(b.irrep_dim * b.multiplicity for b in blocks)
    if total != rep.dim:
        raise ValueError(f"block dimensions sum to {total}, expected {rep.dim}")
    return IrrepDecomposition(rep=rep, blocks=tuple(blocks))


def dfs_extract(model: LindbladModel) -> Array:
    """Orthonormal basis (columns) of the joint kernel of all jump operators.

    An empty basis is a valid outcome.  Every returned vector is checked to be
    a fixed point of the dissipator.
    """
    basis = opsalg.common_kernel(list(model.lindblads))
    for v in basis.T:
        d = lindblad.dissipator(model, opsalg.projector(v))
        if np.linalg.norm(d) > 1e-10:
            raise AssertionError("kernel vector is not dissipator-dark")
    return basis


def ns_identify(decomposition: IrrepDecomposition, j: float) -> dict:
    """Noiseless-subsystem data of a block: multiplicity factor and noisy factor.

    Verifies that the collective generators act as identity (x) irrep
    generators on the block and that the commutant of the represented algebra,
    restricted to the block, has dimension multiplicity^2.
    """
    block = decomposition.block(j)
    if block.multiplicity <= 1:
        raise ValueError(f"block j={j} has multiplicity 1: no genuine noiseless subsystem")
    v = block.isometry
    rep = decomposition.rep
    n, d = block.multiplicity, block.irrep_dim
    small = liealg.spin_rep(j) if j > 0 else None
    for idx, g in enumerate(rep.hermitian_basis):
        g_block = v.conj().T @ g @ v
        g_irrep = small.hermitian_basis[idx] if small else np.zeros((1, 1), dtype=complex)
        expected = np.kron(np.eye(n, dtype=complex), g_irrep)
        if np.linalg.norm(g_block - expected) > 1e-8 * max(1.0, np.linalg.norm(g_block)):
            raise AssertionError("block action is not identity (x) irrep generators")
    # commutant of {I (x) g_a} on the block: null space of X -> ([X, G_1], ..., [X, G_k])
    gens = []
    for g in rep.hermitian_basis:
        g_block = v.conj().T @ g @ v
        if np.linalg.norm(g_block) <= 1e-10 * max(np.linalg.norm(g), 1.0):
            g_block = np.zeros_like(g_block)   # trivial action, keep the map exactly zero
        gens.append(g_block)
    bd = n * d
    rows = []
    eye = np.eye(bd, dtype=complex)
    for g in gens:
        # row-major vec: [X, G] = 0 becomes (I (x) G^T - G (x) I) vec X = 0
        rows.append(np.kron(eye, g.T) - np.kron(g, eye))
    stacked = np.vstack(rows)
    s = np.linalg.svd(stacked, compute_uv=False)
    commutant_dim = int(np.sum(s <= 1e-8 * max(s[0], 1e-300))) if s.size else bd * bd
    if s.size and s[0] == 0.0:
        commutant_dim = bd * bd
    return {"j": j, "ns_dim": n, "noisy_dim": d, "isometry": v,
            "commutant_dim": commutant_dim}


def min_uncertainty_over_subspace(rep: LieRepresentation, subspace: Array,
                                  n_starts: int = 16, seed: int = 11) -> float:
    """Multistart minimum of the invariant uncertainty restricted to a subspace.

    Runs the sieve machinery on the unit-rate model whose jump operators are
    the hermitian basis; the purity-loss objective is then exactly twice the
    invariant uncertainty.
    """
    model = LindbladModel(dim=rep.dim, hamiltonian=np.zeros((rep.dim, rep.dim), dtype=complex),
                          lindblads=tuple(rep.hermitian_basis))
    report = sieve.sieve_search(model, "rate", n_starts=max(n_starts, 8), seed=seed,
                                subspace=subspace, model_id="uncertainty-min")
    return report.global_min_value / 2.0


def verify_dfs(model: LindbladModel, rep: LieRepresentation,
               n_random: int = 20, seed: int = 5) -> dict:
    """Check that the DFS is a zero-uncertainty, zero-loss pointer subspace.

    (i) invariant uncertainty vanishes on the DFS (basis vectors and random
    combinations); (ii) the minimum over the orthogonal complement stays at or
    above the smallest nonzero block bound; (iii) the purity-loss rate
    vanishes on the DFS.
    """
    from . import uncertainty as unc

    basis = dfs_extract(model)
    rng = np.random.default_rng(seed)
    dfs_states = list(basis.T)
    for _ in range(n_random):
        if basis.shape[1] == 0:
            break
        c = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
        dfs_states.append(basis @ (c / np.linalg.norm(c)))
    max_unc = max((abs(unc.invariant_uncertainty(s, rep)) for s in dfs_states), default=0.0)
    max_rate = max((abs(lindblad.purity_rate(s, model)) for s in dfs_states), default=0.0)

    complement_min = None
    block_bound = None
    if basis.shape[1]:
        comp = opsalg.orthonormal_complement(basis)
        complement_min = min_uncertainty_over_subspace(rep, comp, seed=seed)
        dec = decompose(rep)
        nonzero = [b.j for b in dec.blocks if b.j > 0]
        block_bound = min(nonzero) if nonzero else None
    return {
        "dfs_dim": int(basis.shape[1]),
        "max_dfs_uncertainty": float(max_unc),
        "max_dfs_purity_rate": float(max_rate),
        "complement_min_uncertainty": complement_min,
        "smallest_nonzero_block_bound": block_bound,
        "dfs_basis": basis,
    }
