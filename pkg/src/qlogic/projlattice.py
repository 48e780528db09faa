"""The orthomodular lattice of projections on a finite-dimensional Hilbert space.

Projections are plain complex numpy arrays. Meets are computed through
orthocomplements and column spans so that every rank decision goes through
:mod:`qlogic.linalg`.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotProjection
from .linalg import as_matrix, get_policy, max_norm, projector_onto_columnspan, range_basis

__all__ = [
    "identity",
    "zero",
    "is_projection",
    "as_projection",
    "rank",
    "ortho",
    "meet",
    "join",
    "meet_all",
    "join_all",
    "leq",
    "proj_equal",
    "sasaki_implies",
    "logical_equiv",
    "commutes",
    "marsden_com",
]


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def zero(dim: int) -> np.ndarray:
    return np.zeros((dim, dim), dtype=complex)


def is_projection(p) -> bool:
    a = np.asarray(p, dtype=complex)
    tol = get_policy().op_eq
    return max_norm(a @ a - a) <= tol and max_norm(a - a.conj().T) <= tol


def as_projection(p) -> np.ndarray:
    a = as_matrix(p)
    if not is_projection(a):
        raise NotProjection("matrix is not an orthogonal projection within op_eq")
    return a


def rank(p) -> int:
    return int(round(np.trace(np.asarray(p)).real))


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"projections of shapes {a.shape} and {b.shape}")
    return a, b


def ortho(p) -> np.ndarray:
    a = np.asarray(p, dtype=complex)
    return np.eye(a.shape[0]) - a


def join(p, q) -> np.ndarray:
    """Projector onto the closed span of both ranges."""
    a, b = _pair(p, q)
    vecs = np.hstack([range_basis(a), range_basis(b)])
    return projector_onto_columnspan(vecs.T, a.shape[0])


def meet(p, q) -> np.ndarray:
    """Projector onto the intersection of both ranges."""
    a, b = _pair(p, q)
    return ortho(join(ortho(a), ortho(b)))


def join_all(ps, dim: int) -> np.ndarray:
    ps = list(ps)
    for p in ps:
        if np.shape(p) != (dim, dim):
            raise DimensionMismatch(f"projection of shape {np.shape(p)} in dimension {dim}")
    if not ps:
        return zero(dim)
    vecs = np.hstack([range_basis(np.asarray(p, dtype=complex)) for p in ps])
    return projector_onto_columnspan(vecs.T, dim)


def meet_all(ps, dim: int) -> np.ndarray:
    return ortho(join_all([ortho(p) for p in ps], dim))


def leq(p, q) -> bool:
    """Range inclusion, tested as ``p q p == p``."""
    a, b = _pair(p, q)
    return max_norm(a @ b @ a - a) <= get_policy().op_eq


def proj_equal(p, q) -> bool:
    a, b = _pair(p, q)
    return max_norm(a - b) <= get_policy().op_eq


def sasaki_implies(p, q) -> np.ndarray:
    a, b = _pair(p, q)
    return join(ortho(a), meet(a, b))


def logical_equiv(p, q) -> np.ndarray:
    a, b = _pair(p, q)
    return meet(sasaki_implies(a, b), sasaki_implies(b, a))


def commutes(p, q) -> bool:
    a, b = _pair(p, q)
    return max_norm(a @ b - b @ a) <= get_policy().op_eq


def marsden_com(p, q) -> np.ndarray:
    """(P^Q) v (P^Q') v (P'^Q) v (P'^Q')."""
    a, b = _pair(p, q)
    na, nb = ortho(a), ortho(b)
    return join_all([meet(a, b), meet(a, nb), meet(na, b), meet(na, nb)], a.shape[0])
