"""Pauli operators, Clifford tableaux and stabilizer states.

Conventions
-----------
A k-qubit Pauli is stored as bit vectors ``x`` and ``z`` plus an integer
``phase`` so that the operator is ``i**phase * X^x Z^z`` where
``X^x Z^z = (X_1^x_1 ... X_k^x_k)(Z_1^z_1 ... Z_k^z_k)``. Hermitian Paulis
carry ``phase = x.z + 2s`` with sign bit ``s``, so ``Y`` is ``x=z=1, phase=1``.

A Clifford tableau stores the images ``G X_j G^-1`` (rows ``0..k-1``) and
``G Z_j G^-1`` (rows ``k..2k-1``) in the same representation. A stabilizer
state is the tableau of the Clifford that prepares it from ``|0...0>``: the
Z-rows are its stabilizer generators and the X-rows its destabilizers.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import gf2

_LETTERS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


class PauliOperator:
    """k-qubit Pauli ``i**phase X^x Z^z``."""

    __slots__ = ("x", "z", "phase")

    def __init__(self, x, z, phase: int = 0):
        self.x = np.asarray(x, dtype=np.uint8) & 1
        self.z = np.asarray(z, dtype=np.uint8) & 1
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise ValueError("x and z must be 1-d bit vectors of equal length")
        self.phase = int(phase) % 4

    @property
    def k(self) -> int:
        return self.x.shape[0]

    @classmethod
    def identity(cls, k: int) -> "PauliOperator":
        return cls(np.zeros(k, np.uint8), np.zeros(k, np.uint8))

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Hermitian Pauli from a string such as ``"-XIZ"`` or ``"Y"``."""
        sign = 0
        if label[:1] in "+-":
            sign = 2 if label[0] == "-" else 0
            label = label[1:]
        x = np.array([_LETTERS[c][0] for c in label], dtype=np.uint8)
        z = np.array([_LETTERS[c][1] for c in label], dtype=np.uint8)
        return cls(x, z, int(x @ z) + sign)

    @classmethod
    def single(cls, k: int, qubit: int, letter: str) -> "PauliOperator":
        label = ["I"] * k
        label[qubit] = letter
        return cls.from_label("".join(label))

    def label(self) -> str:
        letters = "".join("IZXY"[2 * int(a) + int(b)] for a, b in zip(self.x, self.z))
        rel = (self.phase - int(self.x @ self.z)) % 4
        return ("+", "+i", "-", "-i")[rel] + letters

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_multiply(self, other)

    def equal_mod_phase(self, other: "PauliOperator") -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def hermitian(self) -> "PauliOperator":
        """Same Pauli with the ``+`` Hermitian phase ``i^(x.z)``."""
        return PauliOperator(self.x, self.z, int(self.x @ self.z))

    def tensor(self, other: "PauliOperator") -> "PauliOperator":
        return PauliOperator(
            np.concatenate([self.x, other.x]),
            np.concatenate([self.z, other.z]),
            self.phase + other.phase,
        )

    def copy(self) -> "PauliOperator":
        return PauliOperator(self.x.copy(), self.z.copy(), self.phase)


def pauli_encode(p: PauliOperator) -> np.ndarray:
    """Interleaved bit string ``(x_1, z_1, ..., x_k, z_k)``; the phase is dropped."""
    out = np.empty(2 * p.k, dtype=np.uint8)
    out[0::2] = p.x
    out[1::2] = p.z
    return out


def pauli_decode(bits) -> PauliOperator:
    """Inverse of :func:`pauli_encode`, returning the Hermitian ``+`` Pauli."""
    b = np.asarray(bits, dtype=np.uint8) & 1
    if b.ndim != 1 or b.shape[0] % 2:
        raise ValueError(f"encoding must have even length, got {b.shape}")
    x, z = b[0::2].copy(), b[1::2].copy()
    return PauliOperator(x, z, int(x @ z))


def symplectic_product(p: PauliOperator, r: PauliOperator) -> int:
    return int((p.x @ r.z + p.z @ r.x) & 1)


def pauli_commutes(p: PauliOperator, r: PauliOperator) -> bool:
    if p.k != r.k:
        raise ValueError("Paulis act on different numbers of qubits")
    return symplectic_product(p, r) == 0


def pauli_multiply(p: PauliOperator, r: PauliOperator) -> PauliOperator:
    """Operator product ``p @ r`` with the phase tracked mod 4."""
    if p.k != r.k:
        raise ValueError("Paulis act on different numbers of qubits")
    # Z^a X^b = (-1)^(a.b) X^b Z^a
    phase = p.phase + r.phase + 2 * int(p.z @ r.x)
    return PauliOperator(p.x ^ r.x, p.z ^ r.z, phase)


def _product_phase(x: np.ndarray, z: np.ndarray, phases: np.ndarray) -> int:
    """Phase of the ordered product of the given rows (row 0 leftmost)."""
    if x.shape[0] == 0:
        return 0
    before = (np.cumsum(z, axis=0, dtype=np.int64) - z) & 1
    cross = int(np.sum(before * x)) & 1
    return (int(np.sum(phases, dtype=np.int64)) + 2 * cross) & 3


class CliffordTableau:
    """Conjugation action of a k-qubit Clifford, modulo global phase."""

    __slots__ = ("x", "z", "phase")

    def __init__(self, x, z, phase):
        self.x = np.asarray(x, dtype=np.uint8) & 1
        self.z = np.asarray(z, dtype=np.uint8) & 1
        self.phase = np.asarray(phase, dtype=np.uint8) & 3
        k = self.x.shape[1]
        if self.x.shape != (2 * k, k) or self.z.shape != (2 * k, k):
            raise ValueError("tableau blocks must have shape (2k, k)")

    @property
    def k(self) -> int:
        return self.x.shape[1]

    @classmethod
    def identity(cls, k: int) -> "CliffordTableau":
        eye = np.eye(k, dtype=np.uint8)
        zero = np.zeros((k, k), dtype=np.uint8)
        return cls(np.vstack([eye, zero]), np.vstack([zero, eye]), np.zeros(2 * k, np.uint8))

    @classmethod
    def from_symplectic(cls, sym, signs=None) -> "CliffordTableau":
        """Build from a 2k x 2k matrix with rows ``[x | z]`` and optional sign bits."""
        s = np.asarray(sym, dtype=np.uint8) & 1
        k = s.shape[0] // 2
        x, z = s[:, :k], s[:, k:]
        phase = np.sum(x & z, axis=1)
        if signs is not None:
            phase = phase + 2 * (np.asarray(signs, dtype=np.uint8) & 1)
        return cls(x, z, phase)

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.x.copy(), self.z.copy(), self.phase.copy())

    @property
    def symplectic(self) -> np.ndarray:
        return np.hstack([self.x, self.z])

    @property
    def signs(self) -> np.ndarray:
        """Sign bit of every image relative to its Hermitian ``+`` form."""
        return ((self.phase - np.sum(self.x & self.z, axis=1)) & 3) >> 1

    def row(self, i: int) -> PauliOperator:
        return PauliOperator(self.x[i], self.z[i], int(self.phase[i]))

    def key(self) -> bytes:
        return self.x.tobytes() + self.z.tobytes() + self.phase.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        rows = ", ".join(self.row(i).label() for i in range(2 * self.k))
        return f"CliffordTableau([{rows}])"

    def is_symplectic(self) -> bool:
        s = self.symplectic.astype(np.int64)
        k = self.k
        lam = np.block([[np.zeros((k, k), int), np.eye(k, dtype=int)],
                        [np.eye(k, dtype=int), np.zeros((k, k), int)]])
        return np.array_equal((s @ lam @ s.T) & 1, lam)

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """``G p G^-1`` including the phase."""
        if p.k != self.k:
            raise ValueError("Pauli and Clifford act on different numbers of qubits")
        sel = np.concatenate([p.x, p.z]).astype(bool)
        xs, zs, ps = self.x[sel], self.z[sel], self.phase[sel]
        phase = p.phase + _product_phase(xs, zs, ps)
        return PauliOperator(
            np.bitwise_xor.reduce(xs, axis=0) if xs.shape[0] else np.zeros(self.k, np.uint8),
            np.bitwise_xor.reduce(zs, axis=0) if zs.shape[0] else np.zeros(self.k, np.uint8),
            phase,
        )

    def conjugate_bits(self, x, z) -> tuple[np.ndarray, np.ndarray]:
        """Phase-free image of the Pauli with bit vectors ``x``, ``z``."""
        v = np.concatenate([x, z]).astype(np.uint8)
        return (v @ self.x) & 1, (v @ self.z) & 1

    # In-place generator actions; each maps every stored image P to g P g^-1.

    def _h(self, q: int) -> None:
        xq, zq = self.x[:, q].copy(), self.z[:, q].copy()
        self.phase = (self.phase + 2 * (xq & zq)) & 3
        self.x[:, q], self.z[:, q] = zq, xq

    def _s(self, q: int) -> None:
        xq = self.x[:, q]
        self.phase = (self.phase + xq) & 3
        self.z[:, q] ^= xq

    def _cx(self, c: int, t: int) -> None:
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def apply_gate(self, gate: str, *qubits: int) -> "CliffordTableau":
        """Return ``g ∘ self`` for a generator ``g`` in {H, S, CX}."""
        out = self.copy()
        out._apply(gate, qubits)
        return out

    def _apply(self, gate: str, qubits: Sequence[int]) -> None:
        for q in qubits:
            if not 0 <= q < self.k:
                raise IndexError(f"qubit {q} out of range for k={self.k}")
        g = gate.upper()
        if g == "H" and len(qubits) == 1:
            self._h(qubits[0])
        elif g == "S" and len(qubits) == 1:
            self._s(qubits[0])
        elif g in ("CX", "CNOT") and len(qubits) == 2 and qubits[0] != qubits[1]:
            self._cx(qubits[0], qubits[1])
        else:
            raise ValueError(f"unsupported gate {gate}{tuple(qubits)}")


def compose(outer: CliffordTableau, inner: CliffordTableau) -> CliffordTableau:
    """Tableau of ``outer ∘ inner`` (``inner`` acts first)."""
    if outer.k != inner.k:
        raise ValueError("tableaux act on different numbers of qubits")
    v = np.hstack([inner.x, inner.z])
    x = (v @ outer.x) & 1
    z = (v @ outer.z) & 1
    # phase of each product of outer rows selected by v, in row order
    cross = np.triu((outer.z @ outer.x.T) & 1, 1).astype(np.uint8)
    quad = np.sum((v @ cross) * v, axis=1, dtype=np.int64) & 1
    phase = inner.phase.astype(np.int64) + v.astype(np.int64) @ outer.phase + 2 * quad
    return CliffordTableau(x, z, phase & 3)


def inverse(g: CliffordTableau) -> CliffordTableau:
    k = g.k
    s = g.symplectic
    # S^-1 = L S^T L for the symplectic form L
    sinv = np.block([[s[k:, k:].T, s[:k, k:].T], [s[k:, :k].T, s[:k, :k].T]])
    cand = CliffordTableau.from_symplectic(sinv)
    check = compose(g, cand)
    flip = check.signs
    return CliffordTableau(cand.x, cand.z, cand.phase + 2 * flip)


def clifford_from_generators(seq: Iterable[Sequence], k: int) -> CliffordTableau:
    """Tableau of the circuit ``seq`` (first entry applied first).

    Each entry is ``(gate, q)`` or ``("CX", control, target)``.
    """
    t = CliffordTableau.identity(k)
    for entry in seq:
        gate, *qubits = entry
        t._apply(gate, qubits)
    return t


def clifford_conjugate(g: CliffordTableau, p: PauliOperator) -> PauliOperator:
    return g.conjugate(p)


@lru_cache(maxsize=None)
def _tril(k: int) -> tuple[np.ndarray, np.ndarray]:
    return np.tril_indices(k, -1)


@lru_cache(maxsize=None)
def _eye(k: int) -> np.ndarray:
    out = np.eye(k, dtype=np.int64)
    out.flags.writeable = False
    return out


def _unit_lower_inverse(low: np.ndarray) -> np.ndarray:
    # (I + N)^-1 = (I + N)(I + N^2)(I + N^4)... over GF(2), N nilpotent
    eye = _eye(low.shape[0])
    nil = low.astype(np.int64) ^ eye
    inv = eye.copy()
    while nil.any():
        inv = (inv @ (eye + nil)) & 1
        nil = (nil @ nil) & 1
    return inv


def _sample_mallows(k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    u = rng.random(k)
    m = k - np.arange(k)
    idx = -np.ceil(np.log2(u + (1 - u) * 4.0 ** (-m))).astype(np.int64)
    had = idx < m
    picks = np.where(had, idx, 2 * m - idx - 1).tolist()
    remaining = list(range(k))
    perm = np.array([remaining.pop(j) for j in picks], dtype=np.int64)
    return had, perm


def sample_hadamard_free(k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic part and sign bits of a uniformly random k-qubit Clifford.

    Samples the Hadamard-free decomposition ``F1 · H · P · F2`` with a
    quantum-Mallows distributed ``(H, P)`` layer. Rows of the returned matrix
    are the ``[x | z]`` images of ``X_1..X_k, Z_1..Z_k``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    had, perm = _sample_mallows(k, rng)
    rows, cols = _tril(k)
    t = rows.size
    bits = rng.integers(2, size=2 * k + 4 * t + 2 * k, dtype=np.int64)
    diag = np.arange(k)
    mats = []
    for which in range(2):
        gamma = np.zeros((k, k), dtype=np.int64)
        gamma[diag, diag] = bits[which * k:(which + 1) * k]
        off = bits[2 * k + 2 * which * t:2 * k + (2 * which + 1) * t]
        gamma[rows, cols] = off
        gamma[cols, rows] = off
        delta = np.eye(k, dtype=np.int64)
        delta[rows, cols] = bits[2 * k + (2 * which + 1) * t:2 * k + (2 * which + 2) * t]
        table = np.zeros((2 * k, 2 * k), dtype=np.int64)
        table[:k, :k] = delta
        table[k:, :k] = (gamma @ delta) & 1
        table[k:, k:] = _unit_lower_inverse(delta).T
        mats.append(table)
    table1, table2 = mats
    table = table2[np.concatenate([perm, k + perm])]
    hq = np.nonzero(had)[0]
    table[np.concatenate([hq, hq + k])] = table[np.concatenate([hq + k, hq])]
    return (table1 @ table) & 1, bits[2 * k + 4 * t:]


@lru_cache(maxsize=None)
def _single_qubit_table() -> tuple[np.ndarray, np.ndarray]:
    group = enumerate_cliffords(1)
    syms = np.array([g.symplectic for g in group], dtype=np.int64)
    signs = np.array([g.signs for g in group], dtype=np.int64)
    syms.flags.writeable = signs.flags.writeable = False
    return syms, signs


def random_symplectic(k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform Clifford as ``(symplectic matrix, sign bits)``.

    Single-qubit gates are drawn from the 24-element table; larger registers
    use :func:`sample_hadamard_free`.
    """
    if k == 1:
        syms, signs = _single_qubit_table()
        i = int(rng.integers(24))
        return syms[i], signs[i]
    return sample_hadamard_free(k, rng)


def random_clifford(k: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random k-qubit Clifford (modulo global phase)."""
    sym, signs = random_symplectic(k, rng)
    return CliffordTableau.from_symplectic(sym, signs)


def enumerate_cliffords(k: int) -> list[CliffordTableau]:
    """Every k-qubit Clifford tableau (with signs) for k in {1, 2}."""
    if k not in (1, 2):
        raise ValueError("enumeration is only supported for k in {1, 2}")
    gens = [("H", q) for q in range(k)] + [("S", q) for q in range(k)]
    gens += [("CX", a, b) for a in range(k) for b in range(k) if a != b]
    start = CliffordTableau.identity(k)
    seen = {start.key(): start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for gate, *qs in gens:
            nxt = t.copy()
            nxt._apply(gate, qs)
            key = nxt.key()
            if key not in seen:
                seen[key] = nxt
                queue.append(nxt)
    return sorted(seen.values(), key=CliffordTableau.key)


class StabilizerState:
    """Pure stabilizer state stored as its preparation tableau."""

    __slots__ = ("tableau",)

    def __init__(self, tableau: CliffordTableau):
        self.tableau = tableau

    @classmethod
    def zero(cls, k: int) -> "StabilizerState":
        return cls(CliffordTableau.identity(k))

    @property
    def k(self) -> int:
        return self.tableau.k

    def stabilizers(self) -> list[PauliOperator]:
        return [self.tableau.row(self.k + i) for i in range(self.k)]

    def destabilizers(self) -> list[PauliOperator]:
        return [self.tableau.row(i) for i in range(self.k)]

    def copy(self) -> "StabilizerState":
        return StabilizerState(self.tableau.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerState):
            return NotImplemented
        return self.tableau == other.tableau

    def check_invariants(self) -> None:
        """Raise ``AssertionError`` if the generator structure is broken."""
        if not self.tableau.is_symplectic():
            raise AssertionError("stabilizer/destabilizer rows violate commutation structure")
        for s in self.stabilizers():
            if s.phase not in (int(s.x @ s.z) % 4, (int(s.x @ s.z) + 2) % 4):
                raise AssertionError("non-Hermitian stabilizer generator")


def state_apply_clifford(s: StabilizerState, g: CliffordTableau) -> StabilizerState:
    return StabilizerState(compose(g, s.tableau))


def state_apply_pauli(s: StabilizerState, p: PauliOperator) -> StabilizerState:
    """Conjugate the state by ``p``: anticommuting generators change sign."""
    t = s.tableau
    anti = ((t.x @ p.z + t.z @ p.x) & 1).astype(np.uint8)
    return StabilizerState(CliffordTableau(t.x, t.z, t.phase + 2 * anti))


def pauli_expectation(s: StabilizerState, p: PauliOperator) -> int:
    """``<psi|p|psi>`` for a Hermitian Pauli ``p``; one of -1, 0, +1."""
    t, k = s.tableau, s.k
    sx, sz = t.x[k:], t.z[k:]
    if ((sx @ p.z + sz @ p.x) & 1).any():
        return 0
    # p = ± prod of stabilizers g_i whose destabilizer anticommutes with p
    sel = ((t.x[:k] @ p.z + t.z[:k] @ p.x) & 1).astype(bool)
    prod = _product_phase(sx[sel], sz[sel], t.phase[k:][sel])
    rel = (p.phase - prod) & 3
    if rel == 0:
        return 1
    if rel == 2:
        return -1
    raise ValueError("expectation requested for a non-Hermitian Pauli")


def state_survival(s: StabilizerState, q: StabilizerState | None = None) -> float:
    """``|<q|s>|^2`` for stabilizer states; ``q`` defaults to ``|0...0>``."""
    if q is None:
        q = StabilizerState.zero(s.k)
    if q.k != s.k:
        raise ValueError("states act on different numbers of qubits")
    k = s.k
    qt, st = q.tableau, s.tableau
    qx, qz, qp = qt.x[k:], qt.z[k:], qt.phase[k:]
    # anticommutation of each q-stabilizer with each s-stabilizer
    anti = ((qx @ st.z[k:].T + qz @ st.x[k:].T) & 1).astype(np.uint8)
    kernel = gf2.nullspace(anti.T)
    for combo in kernel.astype(bool):
        elem = PauliOperator(
            np.bitwise_xor.reduce(qx[combo], axis=0),
            np.bitwise_xor.reduce(qz[combo], axis=0),
            _product_phase(qx[combo], qz[combo], qp[combo]),
        )
        if pauli_expectation(s, elem) != 1:
            return 0.0
    return float(2.0 ** (kernel.shape[0] - k))


def projector_probability(s: StabilizerState, observables: Sequence[PauliOperator]) -> float:
    """Probability that commuting Hermitian ``observables`` all read +1."""
    obs = list(observables)
    if not obs:
        return 1.0
    k = s.k
    st = s.tableau
    ox = np.array([o.x for o in obs], dtype=np.uint8)
    oz = np.array([o.z for o in obs], dtype=np.uint8)
    op = np.array([o.phase for o in obs], dtype=np.uint8)
    anti = ((ox @ st.z[k:].T + oz @ st.x[k:].T) & 1).astype(np.uint8)
    kernel = gf2.nullspace(anti.T)
    for combo in kernel.astype(bool):
        if not combo.any():
            continue
        elem = PauliOperator(
            np.bitwise_xor.reduce(ox[combo], axis=0),
            np.bitwise_xor.reduce(oz[combo], axis=0),
            _product_phase(ox[combo], oz[combo], op[combo]),
        )
        if pauli_expectation(s, elem) != 1:
            return 0.0
    return float(2.0 ** (kernel.shape[0] - len(obs)))


def default_destabilizer(s: StabilizerState) -> PauliOperator:
    """The destabilizer paired with the first stabilizer generator."""
    return s.tableau.row(0)
