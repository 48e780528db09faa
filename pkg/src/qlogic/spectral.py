"""Observables, their spectral families, and the correspondence with quantum reals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInterval, NotDedekindCut, UndefinedAtSpectrum
from .linalg import as_matrix, get_policy, hermitian_eig, max_norm
from .projlattice import is_projection, leq, proj_equal

__all__ = [
    "Observable",
    "as_observable",
    "QuantumReal",
    "spectral_family",
    "interval_projection",
    "delta",
    "eigen_atom",
    "apply_function",
    "to_quantum_real",
    "from_quantum_real",
]


class Observable:
    """A Hermitian operator together with its clustered spectral decomposition.

    Parameters
    ----------
    matrix : array_like
        Hermitian matrix. The eigendecomposition is computed once here.

    Attributes
    ----------
    spectrum : tuple of float
        Distinct eigenvalues, strictly increasing.
    projectors : tuple of ndarray
        Eigenprojectors parallel to ``spectrum``.
    atol : float
        Absolute tolerance for "equal to a spectral value".
    """

    __slots__ = ("matrix", "spectrum", "projectors", "atol")

    def __init__(self, matrix):
        m = as_matrix(matrix)
        pairs = hermitian_eig(m)
        self._set(
            (m + m.conj().T) / 2,
            tuple(v for v, _ in pairs),
            tuple(p for _, p in pairs),
            get_policy().eig_threshold(m),
        )

    def _set(self, matrix, spectrum, projectors, atol):
        for p in projectors:
            p.setflags(write=False)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "atol", atol)

    def __setattr__(self, name, value):
        raise AttributeError("Observable is immutable")

    @classmethod
    def from_spectral(cls, values: Sequence[float], projectors: Sequence) -> "Observable":
        """Build ``sum_i values[i] * projectors[i]``, merging equal values.

        The projectors must be mutually orthogonal and sum to the identity.
        """
        if len(values) != len(projectors) or not values:
            raise ValueError("need one projector per value")
        projs = [np.asarray(p, dtype=complex) for p in projectors]
        dim = projs[0].shape[0]
        order = sorted(range(len(values)), key=lambda k: values[k])
        scale = max(abs(v) for v in values)
        thr = get_policy().eig_cluster * (1.0 + scale)
        merged_vals: list[list[float]] = []
        merged_projs: list[np.ndarray] = []
        for k in order:
            if merged_vals and values[k] - merged_vals[-1][-1] <= thr:
                merged_vals[-1].append(values[k])
                merged_projs[-1] = merged_projs[-1] + projs[k]
            else:
                merged_vals.append([values[k]])
                merged_projs.append(projs[k].copy())
        spectrum = tuple(float(np.mean(g)) for g in merged_vals)
        keep = [i for i, p in enumerate(merged_projs) if np.trace(p).real > 0.5]
        spectrum = tuple(spectrum[i] for i in keep)
        merged_projs = [merged_projs[i] for i in keep]
        if max_norm(sum(merged_projs) - np.eye(dim)) > get_policy().op_eq:
            raise ValueError("projectors do not resolve the identity")
        matrix = sum(v * p for v, p in zip(spectrum, merged_projs))
        obj = cls.__new__(cls)
        obj._set(np.asarray(matrix, dtype=complex), spectrum, tuple(merged_projs), thr)
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def projector_for(self, value: float) -> np.ndarray | None:
        """Eigenprojector of the spectral point within ``atol`` of ``value``."""
        for v, p in zip(self.spectrum, self.projectors):
            if abs(v - value) <= self.atol:
                return p
        return None

    def __repr__(self):
        spec = ", ".join(f"{v:.6g}" for v in self.spectrum)
        return f"Observable(dim={self.dim}, spectrum=[{spec}])"


def as_observable(x) -> Observable:
    return x if isinstance(x, Observable) else Observable(x)


def spectral_family(x, lam: float) -> np.ndarray:
    """E^X(lam): sum of eigenprojectors with eigenvalue <= lam."""
    x = as_observable(x)
    out = np.zeros((x.dim, x.dim), dtype=complex)
    for v, p in zip(x.spectrum, x.projectors):
        if v <= lam + x.atol:
            out = out + p
    return out


def interval_projection(x, a: float, b: float) -> np.ndarray:
    """E^X((a, b]) = E^X(b) - E^X(a)."""
    if not a < b:
        raise EmptyInterval(f"interval ({a}, {b}] is empty")
    return spectral_family(x, b) - spectral_family(x, a)


def delta(x) -> float:
    """Half the smallest spectral gap, capped at 1 (1 for a single eigenvalue)."""
    spec = as_observable(x).spectrum
    gaps = [(b - a) / 2 for a, b in zip(spec, spec[1:])]
    return min(gaps + [1.0])


def eigen_atom(x, v: float) -> np.ndarray:
    """Truth value of ``X = v``.

    The window ``(v - delta, v + delta]`` isolates one eigenvalue when ``v``
    is a spectral point. Off the spectrum the result is 0 even if the window
    happens to catch a neighbouring eigenvalue.
    """
    x = as_observable(x)
    if x.projector_for(v) is None:
        return np.zeros((x.dim, x.dim), dtype=complex)
    d = delta(x)
    return interval_projection(x, v - d, v + d)


def apply_function(x, f: Callable[[float], float]) -> Observable:
    """f(X) = sum_i f(lambda_i) P_i."""
    x = as_observable(x)
    values = []
    for lam in x.spectrum:
        try:
            fv = float(f(lam))
        except (ValueError, TypeError, ZeroDivisionError, KeyError, ArithmeticError) as exc:
            raise UndefinedAtSpectrum(f"function undefined at spectral point {lam!r}") from exc
        if not math.isfinite(fv):
            raise UndefinedAtSpectrum(f"function not finite at spectral point {lam!r}")
        values.append(fv)
    return Observable.from_spectral(values, x.projectors)


@dataclass(frozen=True)
class QuantumReal:
    """A finite Dedekind-cut real: a monotone step function of projections.

    ``u(r)`` is ``cut_projections[i]`` for the largest cut point ``<= r``,
    and 0 below the least cut point.
    """

    cut_points: tuple[float, ...]
    cut_projections: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.cut_points) != len(self.cut_projections) or not self.cut_points:
            raise NotDedekindCut("need one projection per cut point")
        dims = {np.shape(p) for p in self.cut_projections}
        if len(dims) != 1:
            raise DimensionMismatch("cut projections differ in dimension")
        if any(b <= a for a, b in zip(self.cut_points, self.cut_points[1:])):
            raise NotDedekindCut("cut points must be strictly increasing")
        for p in self.cut_projections:
            if not is_projection(p):
                raise NotDedekindCut("cut value is not a projection")
        for p, q in zip(self.cut_projections, self.cut_projections[1:]):
            if not leq(p, q):
                raise NotDedekindCut("cut projections are not monotone")
        last = self.cut_projections[-1]
        if not proj_equal(last, np.eye(last.shape[0])):
            raise NotDedekindCut("greatest cut projection must be the identity")

    @property
    def dim(self) -> int:
        return self.cut_projections[0].shape[0]

    def at(self, r: float) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c, p in zip(self.cut_points, self.cut_projections):
            if c <= r:
                out = p
        return out


def to_quantum_real(x) -> QuantumReal:
    x = as_observable(x)
    return QuantumReal(
        tuple(x.spectrum), tuple(spectral_family(x, v) for v in x.spectrum)
    )


def from_quantum_real(u: QuantumReal) -> Observable:
    """Recover the observable whose spectral family is the step function of ``u``."""
    values, projs = [], []
    prev = np.zeros((u.dim, u.dim), dtype=complex)
    for c, p in zip(u.cut_points, u.cut_projections):
        step = p - prev
        if np.trace(step).real > 0.5:
            values.append(c)
            projs.append(step)
        prev = p
    return Observable.from_spectral(values, projs)
