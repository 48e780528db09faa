"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion
is printed in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import itertools
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from helpers import (
    B3,
    BELL,
    CNOT,
    D3,
    IZ,
    ZI,
    X,
    Z,
    basis_state,
    density_on,
    partially_commuting_family,
    random_density,
    random_hermitian,
    random_projection,
    random_spectrum_obs,
    random_unitary,
    readout_process,
)
from qlogic.jointdist import diagonal_mass, jpd, jpd_exists, moment_check
from qlogic.linalg import kernel_projector
from qlogic.measurement import MeasuringProcess, equivalence_suite, measures_everywhere_iff, povm
from qlogic.opalgebra import generated_algebra
from qlogic.projlattice import join, leq, marsden_com, meet, ortho
from qlogic.spectral import spectral_family
from qlogic.truth import (
    Model,
    equality_projection,
    finite_equality_sup,
    finite_joint_sup,
    joint_projection,
    probability,
    trace_probability,
    transfer_check,
)

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).resolve().parent / "golden" / "cli_examples.json"


def maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# -- 1 -----------------------------------------------------------------------


def test_criterion_01_orthomodular_law():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    for _ in range(500):
        n = int(rng.integers(2, 7))
        u = random_unitary(n, rng)
        k = int(rng.integers(0, n + 1))
        j = int(rng.integers(0, k + 1))
        q = u[:, :k] @ u[:, :k].conj().T
        # P spans a random j-dimensional subspace of range(Q)
        mix = random_unitary(k, rng)[:, :j] if k else np.zeros((0, 0))
        basis = u[:, :k] @ mix
        p = basis @ basis.conj().T
        assert leq(p, q)
        assert maxdiff(join(p, meet(ortho(p), q)), q) <= 1e-8
    assert time.perf_counter() - start < 10


# -- 2 -----------------------------------------------------------------------


def _projection_pair(n, rng, kind):
    if kind == 0:
        return random_projection(n, rng), random_projection(n, rng)
    u = random_unitary(n, rng)
    if kind == 1:
        # commuting: diagonal in a shared basis
        a = np.diag(rng.integers(0, 2, size=n)).astype(complex)
        b = np.diag(rng.integers(0, 2, size=n)).astype(complex)
        return u @ a @ u.conj().T, u @ b @ u.conj().T
    # commuting on a shared block, generic on the rest
    c = int(rng.integers(1, n))
    blocks = []
    for _ in range(2):
        m = np.zeros((n, n), dtype=complex)
        m[:c, :c] = np.diag(rng.integers(0, 2, size=c))
        m[c:, c:] = random_projection(n - c, rng)
        blocks.append(u @ m @ u.conj().T)
    return blocks[0], blocks[1]


def test_criterion_02_two_projection_commutator():
    rng = np.random.default_rng(102)
    start = time.perf_counter()
    for k in range(500):
        n = int(rng.integers(2, 7))
        p, q = _projection_pair(n, rng, k % 3)
        assert maxdiff(marsden_com(p, q), kernel_projector([p @ q - q @ p])) <= 1e-8
    assert time.perf_counter() - start < 10


# -- 3 -----------------------------------------------------------------------


def test_criterion_03_born_formula():
    rng = np.random.default_rng(103)
    values = (-1.0, 0.0, 1.0, 2.0)
    for _ in range(100):
        dim = int(rng.integers(1, 7))
        count = int(rng.integers(1, 4))
        u = random_unitary(dim, rng)
        diags = [rng.choice(values, size=dim) for _ in range(count)]
        obs = {f"X{i}": u @ np.diag(d) @ u.conj().T for i, d in enumerate(diags)}
        rho = random_density(dim, rng)
        model = Model(dim, obs, {"rho": rho})
        xs = [float(rng.choice(values)) + float(rng.choice([0.0, 0.5])) for _ in range(count)]
        text = " & ".join(f"X{i} <= {x}" for i, x in enumerate(xs))
        # classical joint CDF of the diagonal model in the shared eigenbasis
        weights = np.real(np.diag(u.conj().T @ rho @ u))
        mask = np.all([d <= x for d, x in zip(diags, xs)], axis=0)
        assert abs(probability(text, model, "rho") - weights[mask].sum()) <= 1e-10


# -- 4 -----------------------------------------------------------------------


def test_criterion_04_finite_sup_identities():
    rng = np.random.default_rng(104)
    assert maxdiff(finite_joint_sup([D3, B3]), np.diag([0, 0, 1])) <= 1e-8
    assert maxdiff(joint_projection([D3, B3]), np.diag([0, 0, 1])) <= 1e-8
    for k in range(200):
        n = int(rng.integers(2, 6))
        obs, _ = partially_commuting_family(n, rng, count=int(rng.integers(2, 4)))
        assert maxdiff(finite_joint_sup(obs), joint_projection(obs)) <= 1e-8
        if k % 2:
            x, y = partially_commuting_family(n, rng, count=2, values=(0.0, 1.0, 2.0))[0]
        else:
            x, y = random_spectrum_obs(n, rng, (0.0, 1.0)), random_spectrum_obs(n, rng, (0.0, 1.0))
        assert maxdiff(finite_equality_sup(x, y), equality_projection(x, y)) <= 1e-8


# -- 5 -----------------------------------------------------------------------


def _triple(n, rng):
    basis = random_unitary(n, rng) if rng.random() < 0.7 else None
    return [random_spectrum_obs(n, rng, (0.0, 1.0, 2.0), basis=basis if i < 2 or rng.random() < 0.5 else None)
            for i in range(3)]


def test_criterion_05_equality_relation():
    rng = np.random.default_rng(105)
    nontrivial = 0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        x, y, z = _triple(n, rng)
        exy = equality_projection(x, y)
        assert maxdiff(equality_projection(x, x), np.eye(n)) <= 1e-8
        assert np.array_equal(exy, equality_projection(y, x))
        assert leq(meet(exy, equality_projection(y, z)), equality_projection(x, z))
        assert leq(exy, joint_projection([x, y]))
        nontrivial += 0.5 < np.trace(exy).real < n - 0.5
    assert nontrivial > 20


# -- 6 -----------------------------------------------------------------------

FUNCTIONS = (None, lambda t: t * t, lambda t: 2 * t - 1, np.tanh)


def _random_polynomial(rng, nvars):
    terms = []
    for _ in range(int(rng.integers(1, 5))):
        word = tuple(int(v) for v in rng.integers(0, nvars, size=int(rng.integers(0, 4))))
        terms.append((float(rng.normal()), word))
    return terms


def test_criterion_06_joint_distribution_theorem():
    rng = np.random.default_rng(106)
    seen = set()
    for k in range(100):
        n = int(rng.integers(2, 6))
        obs, p = partially_commuting_family(n, rng, count=int(rng.integers(2, 4)))
        rho = density_on(p, rng) if k % 2 and np.trace(p).real > 0.5 else random_density(n, rng)
        alg = list(generated_algebra(obs))
        brute = max(np.max(np.abs((a @ b - b @ a) @ rho)) for a in alg for b in alg) <= 1e-8
        exists = jpd_exists(obs, rho)
        assert exists == brute
        seen.add(exists)
        if not exists:
            continue
        dist = jpd(obs, rho)
        for axis, x in enumerate(obs):
            marginal = dist.marginal(axis)
            born = {v: trace_probability(spectral_family(x, v), rho) for v in dist.axes[axis][1]}
            cumulative = 0.0
            for v in dist.axes[axis][1]:
                cumulative += marginal[v]
                assert abs(cumulative - born[v]) <= 1e-10
        for _ in range(5):
            fs = [FUNCTIONS[int(i)] for i in rng.integers(0, len(FUNCTIONS), size=len(obs))]
            lhs, rhs = moment_check(obs, rho, fs, _random_polynomial(rng, len(obs)))
            assert abs(lhs - rhs) <= 1e-8
    assert seen == {True, False}


# -- 7 -----------------------------------------------------------------------


def test_criterion_07_equality_and_diagonal_mass():
    eq = equality_projection(ZI, IZ)
    assert abs(trace_probability(eq, BELL) - 1) <= 1e-8
    assert abs(diagonal_mass(ZI, IZ, BELL) - 1) <= 1e-8
    s01 = basis_state(4, 1)
    assert abs(trace_probability(eq, s01)) <= 1e-8
    assert abs(diagonal_mass(ZI, IZ, s01)) <= 1e-8
    rng = np.random.default_rng(107)
    for _ in range(50):
        rho = random_density(4, rng)
        if jpd_exists([ZI, IZ], rho):
            assert abs(trace_probability(eq, rho) - diagonal_mass(ZI, IZ, rho)) <= 1e-8


# -- 8 -----------------------------------------------------------------------


def test_criterion_08_measurement_equivalence():
    rng = np.random.default_rng(108)
    seen = set()
    for k in range(50):
        ds, dp = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        mp, a, good = readout_process(rng, ds, dp)
        if k % 3 == 0 and np.trace(good).real > 0.5:
            rho = density_on(good, rng)
        else:
            rho = random_density(ds, rng)
        report = equivalence_suite(mp, a, rho)
        assert report.consistent
        seen.add(report.measures)
    assert seen == {True, False}

    cnot = MeasuringProcess(2, 2, basis_state(2, 0), CNOT, Z)
    pi = povm(cnot)
    assert maxdiff(pi.at(0), spectral_family(Z, 0)) <= 1e-10
    assert maxdiff(pi.at(0), np.diag([0, 1])) <= 1e-10
    assert measures_everywhere_iff(cnot, Z)
    assert not measures_everywhere_iff(cnot, X)


# -- 9 -----------------------------------------------------------------------

SKELETONS = (
    "{p} | !{p}",
    "!({p} & !{p})",
    "!{p} | {p} | {q}",
    "!({p} & {q}) | {p}",
    "!{p} | ({p} | {q})",
    "!({p} & (!{p} | {q})) | {q}",
    "!({p} & {q}) | {q} & {p}",
    "!({p} | {q}) | ({q} | {p})",
    "!({p} & ({q} | {r})) | ({p} & {q} | {p} & {r})",
    "!({p} & {q} | {p} & {r}) | {p} & ({q} | {r})",
    "!({p} | {q} & {r}) | ({p} | {q}) & ({p} | {r})",
    "!(!({p} & {q}) & !(!{p} | !{q}))",
    "!(!({p} | {q}) & !(!{p} & !{q}))",
    "!(!{p} | {q}) | !(!{q} | {r}) | (!{p} | {r})",
    "!(!{p} | {q}) | (!!{q} | !{p})",
    "{p} | !{p} & {q} | !{q}",
    "!({p} & ({q} & {r})) | {p} & {q} & {r}",
    "(!{p} | {q}) | (!{q} | {p})",
    "!({p} & !{p}) & ({q} | !{q})",
    "!((!{p} | {q}) & (!{p} | !{q})) | !{p}",
)


def _observable_sets(rng):
    n = int(rng.integers(2, 5))
    u = random_unitary(n, rng)
    commuting = {name: random_spectrum_obs(n, rng, (-1.0, 0.0, 1.0), basis=u) for name in "ABC"}
    generic = {name: random_hermitian(n, rng) for name in "ABC"}
    partial = dict(zip("ABC", partially_commuting_family(n, rng, count=3, values=(-1.0, 0.0, 1.0))[0]))
    return n, (commuting, generic, partial)


def test_criterion_09_transfer_principle():
    rng = np.random.default_rng(109)
    atoms = ("(A <= 0)", "(B in (-0.5, 1])", "(C <= 0.5)", "(A = 1)", "(B <= -0.25)")
    assert len(SKELETONS) == 20
    for skeleton in SKELETONS:
        n, sets = _observable_sets(rng)
        for obs in sets:
            model = Model(n, obs, {})
            for p, q, r in itertools.islice(itertools.permutations(atoms, 3), 0, 60, 20):
                assert transfer_check(skeleton.format(p=p, q=q, r=r), model)


# -- 10 ----------------------------------------------------------------------


def _normalize(value):
    if isinstance(value, float):
        return round(value, 10) + 0.0
    if isinstance(value, list):
        return [_normalize(v) for v in value]
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in value.items()}
    return value


def test_criterion_10_cli_end_to_end():
    cases = json.loads(GOLDEN.read_text())
    start = time.perf_counter()
    for case in cases:
        argv = [str(ROOT / "models" / a) if a.endswith(".json") else a for a in case["argv"]]
        proc = subprocess.run([sys.executable, "-m", "qlogic", *argv], capture_output=True, text=True)
        assert proc.returncode == case["exit"], (case["argv"], proc.stderr)
        if case["stdout"] is None:
            assert proc.stdout == ""
            assert case["stderr_contains"] in proc.stderr
            continue
        got = json.dumps(_normalize(json.loads(proc.stdout)))
        assert got == json.dumps(_normalize(case["stdout"])), case["argv"]
    assert time.perf_counter() - start < 5


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
                status = "PASS"
            except AssertionError:
                status = "FAIL"
                failed += 1
            print(f"criterion {int(name.split('_')[2])}: {status} ({name})")
    sys.exit(1 if failed else 0)
