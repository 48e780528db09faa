"""JSON model files: named operators, states and measuring processes.

Layout::

    {
      "dimension": 2,
      "operators": {"Z": {"re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]}},
      "states": {"ground": {"vector": {"re": [1, 0], "im": [0, 0]}},
                 "mixed": {"re": [[0.5, 0], [0, 0.5]]}},
      "processes": {"cnot": {"probe_dim": 2, "sigma": {...}, "U": {...}, "M": {...}}}
    }

``im`` parts are optional. State vectors must have unit norm within 1e-6 and
are renormalised on load.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ModelFileError, QLogicError
from .measurement import MeasuringProcess, matrix_from_json, matrix_to_json
from .spectral import Observable
from .truth import Model

__all__ = ["ModelFile", "load_model", "parse_model", "dump_model"]

VECTOR_NORM_TOL = 1e-6


@dataclass
class ModelFile:
    model: Model
    processes: dict[str, MeasuringProcess] = field(default_factory=dict)


def _matrix(data, what: str, dim: int) -> np.ndarray:
    if not isinstance(data, Mapping) or "re" not in data:
        raise ModelFileError(f"{what}: expected an object with 're' (and optional 'im')")
    try:
        m = matrix_from_json(data)
    except (ValueError, TypeError) as exc:
        raise ModelFileError(f"{what}: {exc}") from exc
    if m.shape != (dim, dim):
        raise ModelFileError(f"{what}: expected a {dim}x{dim} matrix, got shape {m.shape}")
    return m


def _state(data, name: str, dim: int) -> np.ndarray:
    if isinstance(data, Mapping) and "vector" in data:
        vec = data["vector"]
        try:
            re = np.asarray(vec["re"], dtype=float)
            im = np.asarray(vec.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            raise ModelFileError(f"state {name!r}: malformed vector") from exc
        v = re + 1j * im
        if v.shape != (dim,):
            raise ModelFileError(f"state {name!r}: vector must have length {dim}")
        norm = np.linalg.norm(v)
        if abs(norm - 1) > VECTOR_NORM_TOL:
            raise ModelFileError(f"state {name!r}: vector norm {norm:.9g} is not 1")
        v = v / norm
        return np.outer(v, v.conj())
    return _matrix(data, f"state {name!r}", dim)


def parse_model(data: Mapping) -> ModelFile:
    try:
        dim = int(data["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError("model needs an integer 'dimension'") from exc
    if dim < 1:
        raise ModelFileError("dimension must be positive")
    try:
        observables = {
            name: Observable(_matrix(m, f"operator {name!r}", dim))
            for name, m in data.get("operators", {}).items()
        }
        states = {name: _state(s, name, dim) for name, s in data.get("states", {}).items()}
        model = Model(dim, observables, states)
        processes = {}
        for name, p in data.get("processes", {}).items():
            try:
                k = int(p["probe_dim"])
                processes[name] = MeasuringProcess(
                    dim,
                    k,
                    _matrix(p["sigma"], f"process {name!r} sigma", k),
                    _matrix(p["U"], f"process {name!r} U", dim * k),
                    Observable(_matrix(p["M"], f"process {name!r} M", k)),
                )
            except (KeyError, TypeError) as exc:
                raise ModelFileError(f"process {name!r}: missing or malformed field {exc}") from exc
    except ModelFileError:
        raise
    except QLogicError as exc:
        raise ModelFileError(str(exc)) from exc
    return ModelFile(model, processes)


def load_model(path) -> ModelFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read model file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"model file is not valid JSON: {exc}") from exc
    return parse_model(data)


def dump_model(mf: ModelFile) -> dict:
    """Inverse of :func:`parse_model` (states are written as matrices)."""
    return {
        "dimension": mf.model.dim,
        "operators": {n: matrix_to_json(x.matrix) for n, x in mf.model.observables.items()},
        "states": {n: matrix_to_json(r) for n, r in mf.model.states.items()},
        "processes": {
            n: {
                "probe_dim": p.probe_dim,
                "sigma": matrix_to_json(p.sigma),
                "U": matrix_to_json(p.U),
                "M": matrix_to_json(p.M.matrix),
            }
            for n, p in mf.processes.items()
        },
    }
