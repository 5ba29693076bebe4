import numpy as np
import pytest

from qrao.simulator import DensityMatrix, StateVector

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(op, q, n):
    """Single-qubit ``op`` on qubit ``q`` (qubit 0 leftmost in the Kronecker product)."""
    return kron_all([op if k == q else I2 for k in range(n)])


def cnot_dense(c, t, n):
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return kron_all([p0 if k == c else I2 for k in range(n)]) + kron_all(
        [p1 if k == c else (X if k == t else I2) for k in range(n)]
    )


def random_pure(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v), n)


def random_density(n, rng, rank=None):
    d = 1 << n
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
