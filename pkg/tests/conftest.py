"""Dense statevector oracle shared by the tests.

Qubit 0 is the leftmost tensor factor. Paulis are ``i^phase X^x Z^z``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])


def kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def dense_pauli(p) -> np.ndarray:
    mats = []
    for a, b in zip(p.x, p.z):
        mats.append((X if a else I2) @ (Z if b else I2))
    return (1j) ** p.phase * kron_all(mats)


def single_gate(mat, q, k):
    return kron_all([mat if j == q else I2 for j in range(k)])


def cx_gate(c, t, k):
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    a = kron_all([p0 if j == c else I2 for j in range(k)])
    b = kron_all([p1 if j == c else (X if j == t else I2) for j in range(k)])
    return a + b


def dense_unitary(seq, k) -> np.ndarray:
    u = np.eye(2**k, dtype=complex)
    for gate, *qs in seq:
        if gate == "H":
            g = single_gate(H, qs[0], k)
        elif gate == "S":
            g = single_gate(S, qs[0], k)
        else:
            g = cx_gate(qs[0], qs[1], k)
        u = g @ u
    return u


def random_circuit(k, depth, rng):
    seq = []
    for _ in range(depth):
        choice = rng.integers(3 if k > 1 else 2)
        if choice == 0:
            seq.append(("H", int(rng.integers(k))))
        elif choice == 1:
            seq.append(("S", int(rng.integers(k))))
        else:
            c, t = rng.choice(k, size=2, replace=False)
            seq.append(("CX", int(c), int(t)))
    return seq


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
