"""Small dense linear algebra over GF(2).

Matrices are ``numpy`` arrays of 0/1 values (any integer dtype). All functions
return fresh ``uint8`` arrays and never modify their inputs.
"""

from __future__ import annotations

import numpy as np


def as_bits(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def row_reduce(mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = as_bits(mat).copy()
    if m.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat) -> int:
    m = as_bits(mat)
    if m.size == 0:
        return 0
    return len(row_reduce(m)[1])


def nullspace(mat) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0}."""
    m = as_bits(mat)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.uint8)
    red, pivots = row_reduce(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = red[r, f]
    return basis


def inverse(mat) -> np.ndarray:
    m = as_bits(mat)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix must be square")
    red, pivots = row_reduce(np.hstack([m, np.eye(n, dtype=np.uint8)]))
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular over GF(2)")
    return red[:, n:].copy()


def solve(mat, rhs) -> np.ndarray | None:
    """One solution x of mat @ x = rhs, or None if inconsistent."""
    m = as_bits(mat)
    b = as_bits(rhs).reshape(-1, 1)
    red, pivots = row_reduce(np.hstack([m, b]))
    cols = m.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        x[p] = red[r, cols]
    return x


def in_rowspace(mat, v) -> bool:
    m = as_bits(mat)
    if m.shape[0] == 0:
        return not as_bits(v).any()
    return rank(np.vstack([m, as_bits(v)])) == rank(m)


def complement_basis(space, sub) -> np.ndarray:
    """Rows of ``space`` extending a basis of ``sub`` to a basis of span(space).

    Assumes span(sub) is contained in span(space).
    """
    chosen = as_bits(sub).reshape(-1, as_bits(space).shape[1])
    current = rank(chosen)
    picked = []
    for row in as_bits(space):
        trial = np.vstack([chosen, row])
        r = rank(trial)
        if r > current:
            chosen, current = trial, r
            picked.append(row)
    if not picked:
        return np.zeros((0, as_bits(space).shape[1]), dtype=np.uint8)
    return np.array(picked, dtype=np.uint8)
