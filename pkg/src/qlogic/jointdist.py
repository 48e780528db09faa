"""Joint probability distributions of jointly determinate observables."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import projlattice as pl
from .errors import NotJointlyDeterminate
from .linalg import check_density, get_policy
from .spectral import Observable, apply_function, as_observable, eigen_atom
from .truth import joint_projection, trace_probability

__all__ = [
    "JointDistribution",
    "com_probability",
    "jpd_exists",
    "jpd",
    "Polynomial",
    "moment_check",
    "diagonal_mass",
]

# Noncommutative polynomial: terms (coefficient, word). A word is a tuple of
# variable indices multiplied in the written order; () is the constant term.
Polynomial = Sequence[tuple[complex, tuple[int, ...]]]

_NEG_MASS_CLAMP = 1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Point masses on tuples of spectral values.

    Attributes
    ----------
    axes : tuple of (name, values)
        One axis per observable, values sorted increasingly.
    masses : dict
        Spectral-value tuple -> probability; absent tuples carry no mass.
    """

    axes: tuple[tuple[str, tuple[float, ...]], ...]
    masses: Mapping[tuple[float, ...], float]

    def cdf(self, point: Sequence[float]) -> float:
        return float(sum(
            p for t, p in self.masses.items()
            if all(ti <= xi for ti, xi in zip(t, point))
        ))

    def marginal(self, axis: int) -> dict[float, float]:
        out = {v: 0.0 for v in self.axes[axis][1]}
        for t, p in self.masses.items():
            out[t[axis]] += p
        return out

    def total(self) -> float:
        return float(sum(self.masses.values()))

    def to_json(self) -> dict:
        return {
            "axes": [{"name": name, "values": list(values)} for name, values in self.axes],
            "masses": [
                {"point": list(t), "p": p} for t, p in sorted(self.masses.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "JointDistribution":
        axes = tuple((a["name"], tuple(float(v) for v in a["values"])) for a in data["axes"])
        masses = {tuple(float(v) for v in m["point"]): float(m["p"]) for m in data["masses"]}
        return cls(axes, masses)


def com_probability(xs: Sequence, rho) -> float:
    """Probability that ``xs`` are jointly determinate in ``rho``."""
    r = check_density(rho)
    return trace_probability(joint_projection(list(xs)), r)


def jpd_exists(xs: Sequence, rho) -> bool:
    return com_probability(xs, rho) >= 1 - get_policy().prob_clip


def jpd(xs: Sequence, rho, names: Sequence[str] | None = None) -> JointDistribution:
    """Joint distribution of jointly determinate observables in ``rho``.

    The mass of a spectral tuple is Tr[(X_1 = x_1 ^ ... ^ X_n = x_n) rho].

    Raises
    ------
    NotJointlyDeterminate
        If no joint distribution exists, or round-off drove a mass below
        -1e-12.
    """
    xs = [as_observable(x) for x in xs]
    r = check_density(rho)
    if not jpd_exists(xs, r):
        raise NotJointlyDeterminate("observables are not jointly determinate in this state")
    names = list(names) if names is not None else [f"X{i + 1}" for i in range(len(xs))]
    n = xs[0].dim
    masses = {}
    for values in itertools.product(*(x.spectrum for x in xs)):
        atom = pl.meet_all([eigen_atom(x, v) for x, v in zip(xs, values)], n)
        m = float(np.real(np.trace(atom @ r)))
        if m < -_NEG_MASS_CLAMP:
            raise NotJointlyDeterminate(f"negative mass {m!r} at {values}")
        masses[tuple(values)] = max(m, 0.0)
    total = sum(masses.values())
    masses = {t: m / total for t, m in masses.items() if m > 0.0}
    axes = tuple((name, tuple(x.spectrum)) for name, x in zip(names, xs))
    return JointDistribution(axes, masses)


def _identity(t: float) -> float:
    return t


def moment_check(
    xs: Sequence,
    rho,
    fs: Sequence[Callable[[float], float] | None],
    p: Polynomial,
) -> tuple[float, float]:
    """Compare Tr[p(f_1(X_1), ..., f_n(X_n)) rho] with the JPD integral of p.

    Returns ``(lhs, rhs)``; they agree to ~1e-8 whenever the JPD exists.
    """
    xs = [as_observable(x) for x in xs]
    r = check_density(rho)
    dist = jpd(xs, r)
    fs = [f if f is not None else _identity for f in fs]
    ops = [apply_function(x, f).matrix for x, f in zip(xs, fs)]
    n = r.shape[0]

    lhs_op = np.zeros((n, n), dtype=complex)
    for coef, word in p:
        term = np.eye(n, dtype=complex)
        for k in word:
            term = term @ ops[k]
        lhs_op += coef * term
    lhs = complex(np.trace(lhs_op @ r))

    rhs = 0j
    for t, mass in dist.masses.items():
        fvals = [f(v) for f, v in zip(fs, t)]
        rhs += mass * sum(coef * np.prod([fvals[k] for k in word]) for coef, word in p)
    return float(lhs.real), float(np.real(rhs))


def diagonal_mass(x, y, rho) -> float:
    """JPD mass of (X, Y) on the diagonal {x == y}."""
    x, y = as_observable(x), as_observable(y)
    dist = jpd([x, y], rho)
    tol = max(x.atol, y.atol)
    return float(sum(m for (a, b), m in dist.masses.items() if abs(a - b) <= tol))
