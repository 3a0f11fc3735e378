"""Dense complex operator algebra: the numerical substrate for all other modules.

Operators, pure states and density matrices are plain ``numpy`` arrays; the
``check_*`` validators enforce the structural invariants (squareness,
hermiticity, normalization, positivity) at the tolerances of the shared
numeric policy.  All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .policy import POLICY

Array = np.ndarray


def _as_complex(a) -> Array:
    m = np.asarray(a, dtype=complex)
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("non-finite entries")
    return m


def check_operator(a, *, hermitian: bool = False, unitary: bool = False) -> Array:
    """Validate a dense square operator; optional hermitian/unitary flags are verified."""
    m = _as_complex(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"operator must be square, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if hermitian and np.linalg.norm(m - m.conj().T) > POLICY.hermitian_rtol * max(scale, 1.0):
        raise ValueError("operator is not hermitian at policy tolerance")
    if unitary:
        eye = np.eye(m.shape[0])
        if np.linalg.norm(m.conj().T @ m - eye) > POLICY.unitary_atol:
            raise ValueError("operator is not unitary at policy tolerance")
    return m


def check_pure_state(psi) -> Array:
    v = _as_complex(psi).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > POLICY.state_norm_atol:
        raise ValueError("pure state is not normalized at policy tolerance")
    return v


def check_density_matrix(rho) -> Array:
    m = _as_complex(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    if np.linalg.norm(m - m.conj().T) > POLICY.hermitian_rtol * max(np.linalg.norm(m), 1.0):
        raise ValueError("density matrix is not hermitian at policy tolerance")
    if abs(np.trace(m).real - 1.0) > 100 * POLICY.trace_atol or abs(np.trace(m).imag) > POLICY.trace_atol:
        raise ValueError("density matrix trace differs from one")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w.min() < -POLICY.psd_atol:
        raise ValueError(f"density matrix has negative eigenvalue {w.min():.3e}")
    return m


def dag(a: Array) -> Array:
    return a.conj().T


def comm(a: Array, b: Array) -> Array:
    return a @ b - b @ a


def expect(op: Array, psi: Array) -> complex:
    """<psi|op|psi> for a pure state."""
    return complex(np.vdot(psi, op @ psi))


def quasivariance(op: Array, psi: Array) -> float:
    """||(O - <O>)|psi>||^2; reduces to the variance for hermitian O."""
    mean = np.vdot(psi, op @ psi)
    shifted = op @ psi - mean * psi
    return float(np.real(np.vdot(shifted, shifted)))


def projector(psi: Array) -> Array:
    return np.outer(psi, psi.conj())


def state_fidelity(psi: Array, phi: Array) -> float:
    return float(abs(np.vdot(psi, phi)) ** 2)


def states_equal(psi: Array, phi: Array, atol: float | None = None) -> bool:
    """Equality of pure states up to global phase."""
    tol = POLICY.state_match_atol if atol is None else atol
    return abs(abs(np.vdot(psi, phi)) - 1.0) <= tol


def mat_exp(a) -> Array:
    """Matrix exponential of a dense complex square matrix (Pade scaling-and-squaring)."""
    m = check_operator(a)
    return scipy.linalg.expm(m)


def kron(a, b) -> Array:
    """Kronecker product A (x) B."""
    return np.kron(_as_complex(a), _as_complex(b))


def kron_all(mats) -> Array:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, _as_complex(m))
    return out


def embed_single_mode(op, site: int, n_sites: int, local_dim: int) -> Array:
    """Lift a single-site operator to site `site` of an n-fold tensor product."""
    ops = [np.eye(local_dim, dtype=complex)] * n_sites
    ops[site] = _as_complex(op)
    return kron_all(ops)


def hermitian_eigen(a) -> tuple[Array, Array]:
    """Ascending eigenvalues and unitary eigenvector matrix of a hermitian operator."""
    m = check_operator(a, hermitian=True)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w, v


def common_kernel(ops) -> Array:
    """Orthonormal basis (columns) of the joint kernel of a list of operators.

    The kernel is computed from the SVD of the vertically stacked operators;
    singular values below ``POLICY.kernel_rel_cut`` times the largest count as
    zero, which makes the returned dimension maximal for all test models
    (their spectral gaps are far above the cut).
    """
    ops = [check_operator(o) for o in ops]
    if not ops:
        raise ValueError("empty operator list")
    dim = ops[0].shape[0]
    if any(o.shape[0] != dim for o in ops):
        raise ValueError("operators must share one dimension")
    stacked = np.vstack(ops)
    _, s, vh = np.linalg.svd(stacked)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(dim, dtype=complex)
    rank = int(np.sum(s > POLICY.kernel_rel_cut * smax))
    return vh[rank:].conj().T.copy()


def orthonormal_complement(basis: Array) -> Array:
    """Orthonormal basis (columns) of the orthogonal complement of span(columns)."""
    dim, k = basis.shape
    if k == 0:
        return np.eye(dim, dtype=complex)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, k:].copy()


def random_state(dim: int, rng: np.random.Generator) -> Array:
    """Haar-random pure state."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_states(dim: int, count: int, rng: np.random.Generator) -> Array:
    """Haar-random pure states as rows of a (count, dim) array."""
    v = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
