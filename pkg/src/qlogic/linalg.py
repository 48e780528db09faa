"""Dense complex linear algebra with a single tolerance policy.

Every operator in qlogic is a square ``complex128`` numpy array. Rank and
equality decisions are centralised here so the lattice, algebra and truth
modules never compare floats against zero themselves.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, NotDensityMatrix, NotHermitian, NotUnitary

__all__ = [
    "TolerancePolicy",
    "get_policy",
    "set_policy",
    "using_policy",
    "as_matrix",
    "max_norm",
    "is_hermitian",
    "hermitian_eig",
    "tensor_product",
    "partial_trace_probe",
    "projector_onto_columnspan",
    "kernel_projector",
    "range_basis",
    "null_basis",
    "check_density",
    "check_unitary",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds used across the package.

    ``eig_cluster`` is a base value; the absolute eigenvalue-merge threshold
    for a matrix ``m`` is ``eig_cluster * (1 + max|m_ij|)``.
    """

    eig_cluster: float = 1e-8
    rank_rel: float = 1e-10
    op_eq: float = 1e-8
    prob_clip: float = 1e-10

    def __post_init__(self):
        for name in ("eig_cluster", "rank_rel", "op_eq", "prob_clip"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")

    def eig_threshold(self, m: np.ndarray) -> float:
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        return self.eig_cluster * (1.0 + scale)

    def rank_cutoff(self, singular_values: np.ndarray) -> float:
        # relative cutoff, floored at op_eq so pure round-off never counts as rank
        top = float(singular_values[0]) if singular_values.size else 0.0
        return max(self.rank_rel * top, self.op_eq)


_POLICY: contextvars.ContextVar[TolerancePolicy] = contextvars.ContextVar(
    "qlogic_policy", default=TolerancePolicy()
)


def get_policy() -> TolerancePolicy:
    return _POLICY.get()


def set_policy(policy: TolerancePolicy) -> None:
    _POLICY.set(policy)


@contextlib.contextmanager
def using_policy(policy: TolerancePolicy | None = None, **overrides) -> Iterator[TolerancePolicy]:
    """Temporarily install a tolerance policy (or override single fields)."""
    base = policy if policy is not None else get_policy()
    new = replace(base, **overrides) if overrides else base
    token = _POLICY.set(new)
    try:
        yield new
    finally:
        _POLICY.reset(token)


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` into a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def max_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m: np.ndarray) -> bool:
    return max_norm(m - m.conj().T) <= get_policy().op_eq


def hermitian_eig(m) -> list[tuple[float, np.ndarray]]:
    """Spectral decomposition with clustered eigenvalues.

    Eigenvalues closer than the policy's cluster threshold are merged (by
    single linkage over the sorted list) and represented by their mean.

    Returns
    -------
    list of (eigenvalue, eigenprojector)
        Eigenvalues strictly increasing; projectors mutually orthogonal and
        summing to the identity.
    """
    a = as_matrix(m)
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within op_eq")
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    thr = get_policy().eig_threshold(a)

    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= thr:
            groups[-1].append(k)
        else:
            groups.append([k])

    out = []
    for g in groups:
        vecs = v[:, g]
        out.append((float(np.mean(w[g])), vecs @ vecs.conj().T))
    return out


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, system factor first (row = i_a * dim(b) + i_b)."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_probe(m, sys_dim: int, probe_dim: int) -> np.ndarray:
    """Trace out the second (probe) tensor factor."""
    a = as_matrix(m)
    if sys_dim < 1 or probe_dim < 1 or a.shape[0] != sys_dim * probe_dim:
        raise DimensionMismatch(
            f"matrix of dimension {a.shape[0]} is not {sys_dim} x {probe_dim}"
        )
    return np.einsum("ikjk->ij", a.reshape(sys_dim, probe_dim, sys_dim, probe_dim))


def null_basis(a: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the null space of ``a`` (rows x n)."""
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > get_policy().rank_cutoff(s)))
    return vh[rank:].conj().T


def _column_basis(a: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return a
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > get_policy().rank_cutoff(s)))
    return u[:, :rank]


def projector_onto_columnspan(vectors: Iterable, dim: int) -> np.ndarray:
    """Orthogonal projector onto the span of ``vectors`` in C^dim."""
    cols = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    for c in cols:
        if c.shape[0] != dim:
            raise DimensionMismatch(f"vector of length {c.shape[0]} in dimension {dim}")
    if not cols:
        return np.zeros((dim, dim), dtype=complex)
    q = _column_basis(np.column_stack(cols))
    return q @ q.conj().T


def range_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the range of a projection."""
    w, v = np.linalg.eigh((p + p.conj().T) / 2)
    return v[:, w > 0.5]


def _reduced_stack(blocks: Iterable[np.ndarray], ncols: int) -> np.ndarray:
    # Fold row blocks into an ncols x ncols triangular factor with the same
    # singular values as the full vertical stack; keeps memory bounded.
    r = np.zeros((0, ncols), dtype=complex)
    pending: list[np.ndarray] = []
    rows = 0
    for b in blocks:
        pending.append(b)
        rows += b.shape[0]
        if rows >= 4 * ncols:
            r = np.linalg.qr(np.vstack([r, *pending]), mode="r")
            pending, rows = [], 0
    if pending:
        r = np.linalg.qr(np.vstack([r, *pending]), mode="r")
    return r


def kernel_projector(ms: Sequence, dim: int | None = None) -> np.ndarray:
    """Projector onto the joint kernel of the matrices ``ms``.

    An empty list gives the identity; pass ``dim`` in that case.
    """
    mats = [np.asarray(m, dtype=complex) for m in ms]
    if not mats:
        if dim is None:
            raise DimensionMismatch("kernel_projector of an empty list needs dim")
        return np.eye(dim, dtype=complex)
    n = mats[0].shape[1]
    if dim is not None and n != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {n}")
    for m in mats:
        if m.ndim != 2 or m.shape[1] != n:
            raise DimensionMismatch("kernel_projector: inconsistent dimensions")
    k = null_basis(_reduced_stack(mats, n))
    return k @ k.conj().T


def check_density(rho, dim: int | None = None) -> np.ndarray:
    """Validate a density matrix (Hermitian, positive, unit trace)."""
    r = as_matrix(rho, dim)
    tol = get_policy().op_eq
    if max_norm(r - r.conj().T) > tol:
        raise NotDensityMatrix("state is not Hermitian")
    r = (r + r.conj().T) / 2
    if abs(np.trace(r) - 1) > tol:
        raise NotDensityMatrix(f"state has trace {np.trace(r).real:.6g}, expected 1")
    if np.linalg.eigvalsh(r)[0] < -tol:
        raise NotDensityMatrix("state is not positive semidefinite")
    return r


def check_unitary(u, dim: int | None = None) -> np.ndarray:
    a = as_matrix(u, dim)
    if max_norm(a.conj().T @ a - np.eye(a.shape[0])) > get_policy().op_eq:
        raise NotUnitary("operator is not unitary within op_eq")
    return a
