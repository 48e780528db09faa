"""Projection-valued truth values and probabilities of observational propositions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import projlattice as pl
from .errors import (
    DimensionMismatch,
    NotATautology,
    ProbabilityOutOfRange,
    UnknownObservable,
    UnknownState,
)
from .linalg import check_density, get_policy, kernel_projector
from .opalgebra import set_commutator
from .proplang import (
    And,
    EqConst,
    EqObs,
    InInterval,
    Joint,
    Leq,
    Not,
    Or,
    Proposition,
    atoms_in,
    ordered_names,
    parse,
)
from .spectral import Observable, as_observable, eigen_atom, interval_projection, spectral_family

__all__ = [
    "Model",
    "truth_value",
    "equality_projection",
    "joint_projection",
    "finite_joint_sup",
    "finite_equality_sup",
    "trace_probability",
    "probability",
    "holds",
    "well_formed",
    "is_tautology",
    "transfer_check",
]


@dataclass
class Model:
    """Named observables and density operators on one Hilbert space."""

    dim: int
    observables: dict[str, Observable] = field(default_factory=dict)
    states: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.observables = {k: as_observable(v) for k, v in self.observables.items()}
        for name, x in self.observables.items():
            if x.dim != self.dim:
                raise DimensionMismatch(f"observable {name!r} has dimension {x.dim}, model {self.dim}")
        self.states = {k: check_density(v, self.dim) for k, v in self.states.items()}

    def observable(self, name: str) -> Observable:
        try:
            return self.observables[name]
        except KeyError:
            raise UnknownObservable(name) from None

    def state(self, name: str) -> np.ndarray:
        try:
            return self.states[name]
        except KeyError:
            raise UnknownState(name) from None


def _same_dim(xs: Sequence[Observable]) -> int:
    dims = {x.dim for x in xs}
    if len(dims) != 1:
        raise DimensionMismatch(f"observables of differing dimensions {sorted(dims)}")
    return dims.pop()


def _order_key(x: Observable) -> tuple:
    return (x.spectrum, x.matrix.tobytes())


def equality_projection(x, y) -> np.ndarray:
    """Projector onto {psi : E^X(l) psi = E^Y(l) psi for every real l}.

    Both spectral families are step functions, so agreement at the union of
    the two spectra is agreement everywhere.
    """
    x, y = as_observable(x), as_observable(y)
    n = _same_dim([x, y])
    # fixed argument order makes the result bitwise symmetric
    if _order_key(y) < _order_key(x):
        x, y = y, x
    grid = sorted(set(x.spectrum) | set(y.spectrum))
    return kernel_projector([spectral_family(x, lam) - spectral_family(y, lam) for lam in grid], n)


def joint_projection(xs: Sequence) -> np.ndarray:
    """com(X_1, ..., X_n), the joint-determinateness projection."""
    xs = [as_observable(x) for x in xs]
    if not xs:
        raise ValueError("joint_projection needs at least one observable")
    n = _same_dim(xs)
    return set_commutator(xs, n)


def finite_joint_sup(xs: Sequence) -> np.ndarray:
    """Join over all spectral tuples of X_1 = x_1 ^ ... ^ X_n = x_n."""
    xs = [as_observable(x) for x in xs]
    n = _same_dim(xs)
    terms = []
    for values in itertools.product(*(x.spectrum for x in xs)):
        terms.append(pl.meet_all([eigen_atom(x, v) for x, v in zip(xs, values)], n))
    return pl.join_all(terms, n)


def finite_equality_sup(x, y) -> np.ndarray:
    """Join over v in Sp(X) of (X = v) ^ (Y = v)."""
    x, y = as_observable(x), as_observable(y)
    n = _same_dim([x, y])
    return pl.join_all([pl.meet(eigen_atom(x, v), eigen_atom(y, v)) for v in x.spectrum], n)


def truth_value(ast: Proposition | str, model: Model) -> np.ndarray:
    """Projection-valued truth value of a proposition in ``model``."""
    if isinstance(ast, str):
        ast = parse(ast)
    if isinstance(ast, Leq):
        return spectral_family(model.observable(ast.name), ast.value)
    if isinstance(ast, EqConst):
        return eigen_atom(model.observable(ast.name), ast.value)
    if isinstance(ast, InInterval):
        return interval_projection(model.observable(ast.name), ast.lower, ast.upper)
    if isinstance(ast, EqObs):
        return equality_projection(model.observable(ast.left), model.observable(ast.right))
    if isinstance(ast, Joint):
        return joint_projection([model.observable(n) for n in ast.names])
    if isinstance(ast, Not):
        return pl.ortho(truth_value(ast.child, model))
    if isinstance(ast, And):
        return pl.meet(truth_value(ast.left, model), truth_value(ast.right, model))
    if isinstance(ast, Or):
        return pl.join(truth_value(ast.left, model), truth_value(ast.right, model))
    raise TypeError(f"not a proposition node: {ast!r}")


def trace_probability(p: np.ndarray, rho: np.ndarray) -> float:
    """Tr[p rho], clamped into [0, 1] when the excess is within prob_clip."""
    value = float(np.real(np.trace(p @ rho)))
    clip = get_policy().prob_clip
    if value < -clip or value > 1 + clip:
        raise ProbabilityOutOfRange(f"trace probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def probability(ast: Proposition | str, model: Model, state_name: str) -> float:
    rho = model.state(state_name)
    return trace_probability(truth_value(ast, model), rho)


def holds(ast: Proposition | str, model: Model, state_name: str) -> bool:
    return probability(ast, model, state_name) >= 1 - get_policy().prob_clip


def well_formed(ast: Proposition | str, model: Model, state_name: str) -> bool:
    """Whether the observables named in ``ast`` are jointly determinate in the state."""
    if isinstance(ast, str):
        ast = parse(ast)
    rho = model.state(state_name)
    names = ordered_names(ast)
    if len(names) < 2:
        for name in names:
            model.observable(name)
        return True
    com = joint_projection([model.observable(n) for n in names])
    return trace_probability(com, rho) >= 1 - get_policy().prob_clip


def _eval_bool(node: Proposition, assignment: Mapping) -> bool:
    if isinstance(node, Not):
        return not _eval_bool(node.child, assignment)
    if isinstance(node, And):
        return _eval_bool(node.left, assignment) and _eval_bool(node.right, assignment)
    if isinstance(node, Or):
        return _eval_bool(node.left, assignment) or _eval_bool(node.right, assignment)
    return assignment[node]


def is_tautology(ast: Proposition) -> bool:
    """Classical tautology check with every distinct atom an independent variable."""
    atoms = atoms_in(ast)
    if len(atoms) > 20:
        raise ValueError("too many atoms for a truth-table check")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not _eval_bool(ast, dict(zip(atoms, bits))):
            return False
    return True


def transfer_check(ast: Proposition | str, model: Model) -> bool:
    """For a classical tautology, verify joint(X_1..X_n) <= truth value.

    Raises
    ------
    NotATautology
        If the propositional skeleton is not a tautology; the check would be
        vacuous.
    """
    if isinstance(ast, str):
        ast = parse(ast)
    if not is_tautology(ast):
        raise NotATautology("propositional skeleton is not a classical tautology")
    xs = [model.observable(n) for n in ordered_names(ast)]
    com = joint_projection(xs) if len(xs) > 1 else pl.identity(model.dim)
    return pl.leq(com, truth_value(ast, model))
