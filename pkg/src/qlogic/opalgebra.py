"""Commutants, generated von Neumann algebras and commutators of operator families.

All algebras here are finite dimensional, so the double commutant is found by
two null-space solves over matrix space. The commutator ``com(A)`` of a family
is computed only through its kernel characterisation: the largest subspace on
which every pair of elements of the generated algebra commutes.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    _reduced_stack,
    as_matrix,
    check_density,
    get_policy,
    hermitian_eig,
    is_hermitian,
    kernel_projector,
    null_basis,
    projector_onto_columnspan,
)
from .spectral import Observable

__all__ = [
    "AlgebraBasis",
    "commutant",
    "generated_algebra",
    "set_commutator",
    "cyclic_subspace",
]


@dataclass(frozen=True)
class AlgebraBasis:
    """Hilbert-Schmidt orthonormal basis of a unital *-subalgebra of M_dim."""

    dim: int
    basis: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.basis)

    def contains(self, m) -> bool:
        """Whether ``m`` lies in the span of the basis (within op_eq)."""
        a = np.asarray(m, dtype=complex)
        coeffs = [np.vdot(b, a) for b in self.basis]
        resid = a - sum((c * b for c, b in zip(coeffs, self.basis)), np.zeros_like(a))
        return float(np.max(np.abs(resid))) <= get_policy().op_eq * max(1.0, np.abs(a).max())

    def is_closed(self) -> bool:
        """Identity, adjoint- and product-closure, checked element-wise."""
        if not self.contains(np.eye(self.dim)):
            return False
        for b in self.basis:
            if not self.contains(b.conj().T):
                return False
        return all(self.contains(a @ b) for a in self.basis for b in self.basis)


def _dimension(generators: Sequence, dim: int | None) -> int:
    if generators:
        g = generators[0]
        n = g.dim if isinstance(g, Observable) else np.shape(g)[0]
        if dim is not None and dim != n:
            raise DimensionMismatch(f"generators have dimension {n}, expected {dim}")
        return n
    if dim is None:
        raise DimensionMismatch("dimension required for an empty generator list")
    return dim


def _expand(generators: Sequence, dim: int) -> list[np.ndarray]:
    # Hermitian generators are replaced by their eigenprojectors: same
    # commutant, but with eigenvalue clustering applied consistently.
    out: list[np.ndarray] = []
    for g in generators:
        if isinstance(g, Observable):
            if g.dim != dim:
                raise DimensionMismatch("generator dimensions differ")
            out.extend(g.projectors)
            continue
        a = as_matrix(g, dim)
        if is_hermitian(a):
            out.extend(p for _, p in hermitian_eig(a))
        else:
            out.append(a)
            out.append(a.conj().T)
    return out


def _commutant_basis(gens: list[np.ndarray], dim: int) -> tuple[np.ndarray, ...]:
    # vec is column-stacking: vec(GX - XG) = (I (x) G - G^T (x) I) vec(X)
    eye = np.eye(dim)
    blocks = (np.kron(eye, g) - np.kron(g.T, eye) for g in gens)
    null = null_basis(_reduced_stack(blocks, dim * dim))
    return tuple(null[:, k].reshape(dim, dim, order="F") for k in range(null.shape[1]))


def commutant(generators: Sequence, dim: int | None = None) -> AlgebraBasis:
    """Basis of ``{X : XG = GX for every generator G}``."""
    n = _dimension(generators, dim)
    return AlgebraBasis(n, _commutant_basis(_expand(generators, n), n))


def generated_algebra(generators: Sequence, dim: int | None = None) -> AlgebraBasis:
    """The von Neumann algebra generated by ``generators`` (their double commutant)."""
    n = _dimension(generators, dim)
    first = _commutant_basis(_expand(generators, n), n)
    return AlgebraBasis(n, _commutant_basis(list(first), n))


def _pairwise_commutators(algebra: AlgebraBasis) -> Iterator[np.ndarray]:
    for a, b in combinations(algebra.basis, 2):
        yield a @ b - b @ a


def set_commutator(generators: Sequence, dim: int | None = None) -> np.ndarray:
    """com(A): projector onto the common kernel of all [A, B], A, B in A''."""
    n = _dimension(generators, dim)
    algebra = generated_algebra(generators, n)
    return kernel_projector(list(_pairwise_commutators(algebra)), n)


def cyclic_subspace(observables: Sequence, rho) -> np.ndarray:
    """Projector onto the closed span of ``{A'' rho H}``."""
    r = check_density(rho)
    n = r.shape[0]
    algebra = generated_algebra(list(observables), n)
    w, v = np.linalg.eigh(r)
    support = v[:, w > get_policy().op_eq]
    vectors = [b @ support[:, k] for b in algebra.basis for k in range(support.shape[1])]
    return projector_onto_columnspan(vectors, n)
