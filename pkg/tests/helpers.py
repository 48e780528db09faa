"""Random instances and small fixed matrices shared by the test modules."""
import numpy as np

from qlogic.measurement import MeasuringProcess

Z = np.diag([1.0, -1.0]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
ZI = np.kron(Z, I2)
IZ = np.kron(I2, Z)
D3 = np.diag([1.0, 2.0, 3.0]).astype(complex)
B3 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 5]], dtype=complex)
CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
E1 = np.diag([1.0, 0.0]).astype(complex)
MIXED2 = I2 / 2
BELL_VEC = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL = np.outer(BELL_VEC, BELL_VEC.conj())


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def dm(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def basis_state(n, k):
    v = np.zeros(n, dtype=complex)
    v[k] = 1
    return dm(v)


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_vector(n, rng):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_projection(n, rng, k=None):
    if k is None:
        k = int(rng.integers(0, n + 1))
    u = random_unitary(n, rng)[:, :k]
    return u @ u.conj().T


def random_hermitian(n, rng, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_density(n, rng, rank=None):
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    r = g @ g.conj().T
    return r / np.trace(r).real


def density_on(p, rng):
    """Random density matrix supported inside the range of projection ``p``."""
    w, v = np.linalg.eigh(p)
    basis = v[:, w > 0.5]
    k = basis.shape[1]
    g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    r = basis @ (g @ g.conj().T) @ basis.conj().T
    return r / np.trace(r).real


def random_spectrum_obs(n, rng, values=(-1.0, 0.0, 1.0, 2.0), basis=None):
    """Observable with eigenvalues drawn from a small set, in a random (or given) basis."""
    u = random_unitary(n, rng) if basis is None else basis
    d = rng.choice(values, size=n)
    return u @ np.diag(d) @ u.conj().T


def partially_commuting_family(n, rng, count=2, common=None, values=(-1.0, 0.0, 1.0, 2.0)):
    """Observables that share an eigenbasis on a ``common``-dimensional subspace.

    Returns ``(observables, projector onto the common subspace)``. On the
    complement each observable gets an independent random Hermitian block
    with eigenvalues disjoint from ``values``, so generically nothing there
    commutes and the joint-determinateness projection is exactly the
    common subspace (or a superset, if the random blocks happen to share
    structure; the tests never rely on equality).
    """
    if common is None:
        common = int(rng.integers(0, n + 1))
    u = random_unitary(n, rng)
    rest = n - common
    obs = []
    for _ in range(count):
        top = np.diag(rng.choice(values, size=common)).astype(complex)
        block = np.zeros((n, n), dtype=complex)
        block[:common, :common] = top
        if rest:
            block[common:, common:] = random_hermitian(rest, rng) + 10.0 * np.eye(rest)
        obs.append(u @ block @ u.conj().T)
    p = u[:, :common] @ u[:, :common].conj().T
    return obs, p


def readout_process(rng, ds, dp):
    """Controlled readout in a random eigenbasis of a random A.

    Each eigenvector of A steers the probe from |0> into the meter eigenvector
    of its eigenvalue (correct), a different one (wrong), or a superposition.
    Returns ``(process, A, projector onto the correctly read columns)``.
    """
    meter_vals = np.sort(rng.choice(np.arange(-3.0, 4.0), size=dp, replace=False))
    w = random_unitary(ds, rng)
    idx = rng.integers(0, dp, size=ds)
    a = w @ np.diag(meter_vals[idx]) @ w.conj().T
    u = np.zeros((ds * dp, ds * dp), dtype=complex)
    good = np.zeros((ds, ds), dtype=complex)
    for i in range(ds):
        kind = rng.choice(["correct", "correct", "wrong", "mixed"])
        if kind == "correct" or dp == 1:
            target = idx[i]
        elif kind == "wrong":
            target = (idx[i] + 1 + rng.integers(0, dp - 1)) % dp
        else:
            target = None
        if target is None:
            v = random_unitary(dp, rng)
        else:
            perm = np.eye(dp)[:, [target] + [k for k in range(dp) if k != target]]
            v = perm @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=dp)))
        if target == idx[i]:
            good += np.outer(w[:, i], w[:, i].conj())
        col = np.outer(w[:, i], w[:, i].conj())
        u += np.kron(col, v)
    mp = MeasuringProcess(ds, dp, basis_state(dp, 0), u, np.diag(meter_vals))
    return mp, a, good
