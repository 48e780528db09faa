"""Measuring processes (K, sigma, U, M), their POVMs, and measurement predicates.

A process couples the system (first tensor factor) to a probe (second
factor) prepared in ``sigma``, evolves by ``U`` and reads the meter ``M`` on
the probe. Distribution functions are step functions, so every check below
runs over a finite grid of spectral and cut points plus one point below all
of them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, MalformedPovm
from .linalg import (
    as_matrix,
    check_density,
    check_unitary,
    get_policy,
    max_norm,
    partial_trace_probe,
    range_basis,
    tensor_product,
)
from .opalgebra import cyclic_subspace
from .spectral import Observable, apply_function, as_observable, spectral_family
from .truth import equality_projection, trace_probability

__all__ = [
    "MeasuringProcess",
    "Povm",
    "Povm2",
    "SuiteReport",
    "meter_heisenberg",
    "output_distribution",
    "povm",
    "measures_in",
    "weakly_measures",
    "bsf_holds",
    "equivalence_suite",
    "measures_everywhere_iff",
    "simultaneous_check",
    "theorem_main_verify",
]

# absolute tolerance for distribution identities (weak measurement, BSF, POVM equality)
DIST_TOL = 1e-8


@dataclass(frozen=True)
class MeasuringProcess:
    """A measuring process for a ``sys_dim``-dimensional system."""

    sys_dim: int
    probe_dim: int
    sigma: np.ndarray
    U: np.ndarray
    M: Observable

    def __post_init__(self):
        object.__setattr__(self, "sigma", check_density(self.sigma, self.probe_dim))
        object.__setattr__(self, "U", check_unitary(self.U, self.sys_dim * self.probe_dim))
        m = as_observable(self.M)
        if m.dim != self.probe_dim:
            raise DimensionMismatch(f"meter has dimension {m.dim}, probe {self.probe_dim}")
        object.__setattr__(self, "M", m)

    def with_meter(self, f: Callable[[float], float]) -> "MeasuringProcess":
        """The process M(f(x)) = (K, sigma, U, f(M))."""
        return replace(self, M=apply_function(self.M, f))


@dataclass(frozen=True)
class Povm:
    """Operator-valued distribution function, piecewise constant between cuts.

    ``cumulative[i]`` is Pi(x) for ``cut_points[i] <= x < cut_points[i+1]``;
    below the first cut Pi is 0.
    """

    cut_points: tuple[float, ...]
    cumulative: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.cumulative[0].shape[0]

    def at(self, x: float) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c, op in zip(self.cut_points, self.cumulative):
            if c <= x + _cut_slack(c):
                out = op
        return out

    def validate(self) -> None:
        """Positivity, monotonicity (P2) and the limits of (P1)."""
        tol = get_policy().op_eq
        prev = np.zeros((self.dim, self.dim), dtype=complex)
        for c, op in zip(self.cut_points, self.cumulative):
            if max_norm(op - op.conj().T) > tol:
                raise MalformedPovm(f"Pi({c}) is not Hermitian")
            if np.linalg.eigvalsh(op - prev)[0] < -tol:
                raise MalformedPovm(f"Pi is not monotone at {c}")
            prev = op
        if max_norm(prev - np.eye(self.dim)) > tol:
            raise MalformedPovm("Pi does not reach the identity")

    def to_json(self) -> dict:
        return {
            "cuts": list(self.cut_points),
            "operators": [matrix_to_json(op) for op in self.cumulative],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Povm":
        return cls(
            tuple(float(c) for c in data["cuts"]),
            tuple(matrix_from_json(op) for op in data["operators"]),
        )


@dataclass(frozen=True)
class Povm2:
    """Two-axis POVM distribution function Pi(x, y) on a grid of cuts."""

    x_cuts: tuple[float, ...]
    y_cuts: tuple[float, ...]
    operators: tuple[tuple[np.ndarray, ...], ...]  # operators[i][j] = Pi(x_i, y_j)

    @classmethod
    def from_function(cls, x_cuts, y_cuts, fn: Callable[[float, float], np.ndarray]) -> "Povm2":
        xs, ys = tuple(sorted(x_cuts)), tuple(sorted(y_cuts))
        ops = tuple(tuple(np.asarray(fn(x, y), dtype=complex) for y in ys) for x in xs)
        return cls(xs, ys, ops)

    @property
    def dim(self) -> int:
        return self.operators[0][0].shape[0]

    def validate(self) -> None:
        tol = get_policy().op_eq
        nx, ny = len(self.x_cuts), len(self.y_cuts)
        if nx == 0 or ny == 0 or len(self.operators) != nx or any(len(r) != ny for r in self.operators):
            raise MalformedPovm("operator grid does not match the cut points")
        zero = np.zeros((self.dim, self.dim), dtype=complex)

        def op(i, j):
            return zero if i < 0 or j < 0 else self.operators[i][j]

        for i in range(nx):
            for j in range(ny):
                a = op(i, j)
                if max_norm(a - a.conj().T) > tol:
                    raise MalformedPovm(f"Pi at grid cell ({i}, {j}) is not Hermitian")
                # rectangle increments must be positive: monotone in each axis
                inc = a - op(i - 1, j) - op(i, j - 1) + op(i - 1, j - 1)
                if np.linalg.eigvalsh(inc)[0] < -tol:
                    raise MalformedPovm(f"Pi is not monotone at grid cell ({i}, {j})")
        if max_norm(self.operators[-1][-1] - np.eye(self.dim)) > tol:
            raise MalformedPovm("Pi does not reach the identity")

    def _index(self, cuts, v) -> int:
        idx = -1
        for k, c in enumerate(cuts):
            if c <= v + _cut_slack(c):
                idx = k
        return idx

    def marginal_x(self, x: float) -> np.ndarray:
        """lim_{y -> +inf} Pi(x, y)."""
        i = self._index(self.x_cuts, x)
        return np.zeros((self.dim, self.dim), dtype=complex) if i < 0 else self.operators[i][-1]

    def marginal_y(self, y: float) -> np.ndarray:
        """lim_{x -> +inf} Pi(x, y)."""
        j = self._index(self.y_cuts, y)
        return np.zeros((self.dim, self.dim), dtype=complex) if j < 0 else self.operators[-1][j]


@dataclass(frozen=True)
class SuiteReport:
    measures: bool
    weak: bool
    bsf: bool

    @property
    def consistent(self) -> bool:
        return self.measures == self.weak == self.bsf

    def to_json(self) -> dict:
        return {"measures": self.measures, "weak": self.weak, "bsf": self.bsf}


def _cut_slack(c: float) -> float:
    return get_policy().eig_cluster * (1.0 + abs(c))


def matrix_to_json(m: np.ndarray) -> dict:
    a = np.asarray(m, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(data: Mapping) -> np.ndarray:
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data["im"], dtype=float) if "im" in data else np.zeros_like(re)
    if re.shape != im.shape:
        raise DimensionMismatch("re and im parts differ in shape")
    return re + 1j * im


def _grid(*value_lists: Sequence[float]) -> list[float]:
    pts = sorted({float(v) for vs in value_lists for v in vs})
    return [pts[0] - 1.0] + pts


def _system_observable(mp: MeasuringProcess, a) -> Observable:
    a = as_observable(a)
    if a.dim != mp.sys_dim:
        raise DimensionMismatch(f"observable has dimension {a.dim}, system {mp.sys_dim}")
    return a


def meter_heisenberg(mp: MeasuringProcess) -> Observable:
    """M(dt) = U^dagger (1 (x) M) U, built from the meter's spectral projections."""
    u = mp.U
    eye = np.eye(mp.sys_dim)
    projs = [u.conj().T @ np.kron(eye, p) @ u for p in mp.M.projectors]
    return Observable.from_spectral(list(mp.M.spectrum), projs)


def output_distribution(mp: MeasuringProcess, rho, x: float) -> float:
    """Pr{x <= x || rho} = Tr[E^{M(dt)}(x) (rho (x) sigma)]."""
    r = check_density(rho, mp.sys_dim)
    meter = meter_heisenberg(mp)
    return trace_probability(spectral_family(meter, x), tensor_product(r, mp.sigma))


def povm(mp: MeasuringProcess) -> Povm:
    """Pi(x) = Tr_K[E^{M(dt)}(x) (1 (x) sigma)] at each meter value."""
    meter = meter_heisenberg(mp)
    i_sigma = np.kron(np.eye(mp.sys_dim), mp.sigma)
    ops = []
    for lam in meter.spectrum:
        op = partial_trace_probe(spectral_family(meter, lam) @ i_sigma, mp.sys_dim, mp.probe_dim)
        ops.append((op + op.conj().T) / 2)
    result = Povm(tuple(meter.spectrum), tuple(ops))
    result.validate()
    return result


def measures_in(mp: MeasuringProcess, a, rho) -> bool:
    """A(0) equals M(dt) in the state rho (x) sigma."""
    a = _system_observable(mp, a)
    r = check_density(rho, mp.sys_dim)
    a0 = Observable.from_spectral(list(a.spectrum), [np.kron(p, np.eye(mp.probe_dim)) for p in a.projectors])
    eq = equality_projection(a0, meter_heisenberg(mp))
    return trace_probability(eq, tensor_product(r, mp.sigma)) >= 1 - get_policy().prob_clip


def weakly_measures(mp: MeasuringProcess, a, rho) -> bool:
    """Tr[Pi(x) E^A(y) rho] == Tr[E^A(min(x, y)) rho] for all x, y."""
    a = _system_observable(mp, a)
    r = check_density(rho, mp.sys_dim)
    pi = povm(mp)
    grid = _grid(a.spectrum, pi.cut_points)
    for x in grid:
        pix = pi.at(x)
        for y in grid:
            lhs = np.trace(pix @ spectral_family(a, y) @ r)
            rhs = np.trace(spectral_family(a, min(x, y)) @ r)
            if abs(lhs - rhs) > DIST_TOL:
                return False
    return True


def _bsf_for(pi: Povm, a: Observable, r: np.ndarray) -> bool:
    for x in _grid(a.spectrum, pi.cut_points):
        if abs(np.trace((pi.at(x) - spectral_family(a, x)) @ r)) > DIST_TOL:
            return False
    return True


def bsf_holds(mp: MeasuringProcess, a, rho) -> bool:
    """Output distribution equals Tr[E^A(x) rho] at every x."""
    a = _system_observable(mp, a)
    r = check_density(rho, mp.sys_dim)
    return _bsf_for(povm(mp), a, r)


def _probe_vectors(basis: np.ndarray, n_random: int = 3, seed: int = 0) -> list[np.ndarray]:
    # basis vectors, the pairwise superpositions (e_i +- e_j)/sqrt2 and
    # (e_i +- i e_j)/sqrt2, and a few seeded random unit vectors
    k = basis.shape[1]
    cols = [basis[:, i] for i in range(k)]
    vecs = list(cols)
    for i in range(k):
        for j in range(i + 1, k):
            for phase in (1, -1, 1j, -1j):
                vecs.append((cols[i] + phase * cols[j]) / np.sqrt(2))
    rng = np.random.default_rng(seed)
    for _ in range(n_random if k else 0):
        c = rng.normal(size=k) + 1j * rng.normal(size=k)
        v = basis @ c
        vecs.append(v / np.linalg.norm(v))
    return vecs


def equivalence_suite(mp: MeasuringProcess, a, rho) -> SuiteReport:
    """Evaluate (i) measures, (ii) weakly measures, (iii) BSF in vector states of C(A, rho)."""
    a = _system_observable(mp, a)
    r = check_density(rho, mp.sys_dim)
    pi = povm(mp)
    c = cyclic_subspace([a], r)
    bsf = all(_bsf_for(pi, a, np.outer(v, v.conj())) for v in _probe_vectors(range_basis(c)))
    return SuiteReport(measures_in(mp, a, r), weakly_measures(mp, a, r), bsf)


def measures_everywhere_iff(mp: MeasuringProcess, a) -> bool:
    """Whether Pi(x) = E^A(x) for every x (measures A in every state)."""
    a = _system_observable(mp, a)
    pi = povm(mp)
    return all(
        max_norm(pi.at(x) - spectral_family(a, x)) <= DIST_TOL
        for x in _grid(a.spectrum, pi.cut_points)
    )


def simultaneous_check(mp: MeasuringProcess, f, g, a, b, rho) -> bool:
    """M(f(x)) measures A and M(g(x)) measures B in rho."""
    return measures_in(mp.with_meter(f), a, rho) and measures_in(mp.with_meter(g), b, rho)


def _agrees_on(c: np.ndarray, lhs: np.ndarray, rhs: np.ndarray) -> bool:
    return max_norm(c @ (lhs - rhs) @ c) <= DIST_TOL


def theorem_main_verify(pi2: Povm2, a, b, rho, mode: str = "determinate") -> bool:
    """Check that the marginals of a two-axis POVM reproduce E^A and E^B on the cyclic subspaces.

    ``mode="determinate"`` uses C(A, B, rho) for both marginals;
    ``mode="simultaneous"`` uses C(A, rho) and C(B, rho) respectively.
    """
    if mode not in ("determinate", "simultaneous"):
        raise ValueError(f"unknown mode {mode!r}")
    pi2.validate()
    a, b = as_observable(a), as_observable(b)
    r = check_density(rho, pi2.dim)
    if a.dim != pi2.dim or b.dim != pi2.dim:
        raise DimensionMismatch("observables and POVM differ in dimension")
    if mode == "determinate":
        ca = cb = cyclic_subspace([a, b], r)
    else:
        ca, cb = cyclic_subspace([a], r), cyclic_subspace([b], r)
    ok_a = all(
        _agrees_on(ca, pi2.marginal_x(x), spectral_family(a, x))
        for x in _grid(a.spectrum, pi2.x_cuts)
    )
    ok_b = all(
        _agrees_on(cb, pi2.marginal_y(y), spectral_family(b, y))
        for y in _grid(b.spectrum, pi2.y_cuts)
    )
    return ok_a and ok_b
