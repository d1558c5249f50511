"""Stabilizer/CSS codes, syndrome lookup decoders and the syndrome relabeling map.

Binary vectors over ``n`` qubits use the ``[x | z]`` layout (length ``2n``).
Syndromes are bit vectors over the stabilizer generators in code order; a
syndrome is read as a big-endian integer, so integer order is lexicographic
order of the bit tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gf2
from .pauli_clifford import CliffordTableau, PauliOperator, StabilizerState, pauli_expectation


class CodeError(ValueError):
    """Invalid code definition or decoder configuration."""


def _sym(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Symplectic products between rows of ``a`` and rows of ``b``."""
    n = a.shape[-1] // 2
    a = np.atleast_2d(a).astype(np.int64)
    b = np.atleast_2d(b).astype(np.int64)
    return ((a[:, :n] @ b[:, n:].T + a[:, n:] @ b[:, :n].T) & 1).astype(np.uint8)


def _to_pauli(v: np.ndarray) -> PauliOperator:
    n = v.shape[0] // 2
    x, z = v[:n], v[n:]
    return PauliOperator(x, z, int(x @ z))


def _to_vec(p: PauliOperator) -> np.ndarray:
    return np.concatenate([p.x, p.z]).astype(np.uint8)


def _bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


class StabilizerCode:
    """An [[n, k]] stabilizer code with chosen logical operators.

    ``stabilizers`` has one generator per row, ``logical_x``/``logical_z``
    one logical operator per row, all in ``[x | z]`` layout.
    """

    blocks: tuple = ()

    def __init__(self, n, k, stabilizers, logical_x, logical_z, distance=None, name="", notes=()):
        self.n, self.k = int(n), int(k)
        self.stabilizers = gf2.as_bits(stabilizers)
        self.logical_x = gf2.as_bits(logical_x)
        self.logical_z = gf2.as_bits(logical_z)
        self.distance = distance
        self.name = name
        self.notes = tuple(notes)
        for arr in (self.stabilizers, self.logical_x, self.logical_z):
            if arr.ndim != 2 or (arr.shape[0] and arr.shape[1] != 2 * self.n):
                raise CodeError("operators must be rows of length 2n")
        if self.stabilizers.shape[0] != self.n - self.k:
            raise CodeError(f"expected {self.n - self.k} generators, got {self.stabilizers.shape[0]}")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, k={self.k}, name={self.name!r})"

    @property
    def n_syndrome(self) -> int:
        return self.n - self.k

    def generators(self) -> list[PauliOperator]:
        return [_to_pauli(v) for v in self.stabilizers]

    def logical(self, kind: str, i: int) -> PauliOperator:
        rows = self.logical_x if kind.upper() == "X" else self.logical_z
        return _to_pauli(rows[i])

    def syndrome(self, error: PauliOperator) -> np.ndarray:
        """Syndrome bits of a physical Pauli error."""
        return _sym(self.stabilizers, _to_vec(error)[None, :])[:, 0]

    def validate(self) -> None:
        if _sym(self.stabilizers, self.stabilizers).any():
            raise CodeError("stabilizer generators do not commute")
        logic = np.vstack([self.logical_x, self.logical_z])
        if _sym(logic, self.stabilizers).any():
            raise CodeError("logical operators do not commute with the stabilizers")
        lam = np.block([[np.zeros((self.k, self.k), np.uint8), np.eye(self.k, dtype=np.uint8)],
                        [np.eye(self.k, dtype=np.uint8), np.zeros((self.k, self.k), np.uint8)]])
        if not np.array_equal(_sym(logic, logic), lam):
            raise CodeError("logical operators are not canonically paired")

    @cached_property
    def encoder(self) -> CliffordTableau:
        """Clifford ``E`` mapping unencoded qubit ``i < k`` to logical ``i`` and
        ``Z`` on syndrome slot ``j`` to stabilizer generator ``j``."""
        if self.blocks:
            return _product_encoder(self)
        return _build_encoder(self.stabilizers, self.logical_x, self.logical_z)

    def is_transversal(self) -> bool:
        """Whether ``X^n`` and ``Z^n`` act as the logical X and Z (k = 1 only)."""
        if self.k != 1:
            return False
        ones = np.ones(self.n, np.uint8)
        zeros = np.zeros(self.n, np.uint8)
        xall, zall = np.concatenate([ones, zeros]), np.concatenate([zeros, ones])
        span = self.stabilizers
        return (
            gf2.in_rowspace(np.vstack([span, self.logical_x]), xall)
            and not gf2.in_rowspace(span, xall)
            and gf2.in_rowspace(np.vstack([span, self.logical_z]), zall)
            and not gf2.in_rowspace(span, zall)
            and not _sym(xall[None], self.logical_x).any()
            and not _sym(zall[None], self.logical_z).any()
        )


def _build_encoder(stabs: np.ndarray, lx: np.ndarray, lz: np.ndarray) -> CliffordTableau:
    r, two_n = stabs.shape
    n = two_n // 2
    k = lx.shape[0]
    constraints = np.vstack([stabs, lx, lz])
    # rows of ``swapped`` dotted with v give symplectic products with v
    swapped = np.hstack([constraints[:, n:], constraints[:, :n]])
    destab = np.zeros((r, two_n), dtype=np.uint8)
    for j in range(r):
        rhs = np.zeros(r + 2 * k, dtype=np.uint8)
        rhs[j] = 1
        sol = gf2.solve(swapped, rhs)
        if sol is None:
            raise CodeError("stabilizers and logicals are not independent")
        destab[j] = sol
    for j in range(r):
        for i in range(j):
            if _sym(destab[j][None], destab[i][None])[0, 0]:
                destab[j] ^= stabs[i]
    images = np.vstack([lx, destab, lz, stabs])
    return CliffordTableau.from_symplectic(images)


def _embed(rows: np.ndarray, n_block: int, offset: int, n: int) -> np.ndarray:
    out = np.zeros((rows.shape[0], 2 * n), dtype=np.uint8)
    out[:, offset:offset + n_block] = rows[:, :n_block]
    out[:, n + offset:n + offset + n_block] = rows[:, n_block:]
    return out


def _product_encoder(code: StabilizerCode) -> CliffordTableau:
    n, k = code.n, code.k
    images = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    q_off = s_off = l_off = 0
    for block in code.blocks:
        enc = block.encoder.symplectic
        nb, kb = block.n, block.k
        emb = _embed(enc, nb, q_off, n)
        for i in range(kb):
            images[l_off + i] = emb[i]
            images[n + l_off + i] = emb[nb + i]
        for j in range(nb - kb):
            images[k + s_off + j] = emb[kb + j]
            images[n + k + s_off + j] = emb[nb + kb + j]
        q_off += nb
        s_off += nb - kb
        l_off += kb
    return CliffordTableau.from_symplectic(images)


def css_from_parity_checks(hx, hz, name: str = "") -> StabilizerCode:
    """CSS code with X-type checks ``hx`` and Z-type checks ``hz``."""
    hx, hz = gf2.as_bits(hx), gf2.as_bits(hz)
    if hx.shape[1] != hz.shape[1]:
        raise CodeError("Hx and Hz must have the same number of columns")
    n = hx.shape[1]
    if ((hx.astype(np.int64) @ hz.T.astype(np.int64)) & 1).any():
        raise CodeError("Hx Hz^T != 0 over GF(2); checks do not commute")
    notes = []
    rx, rz = gf2.rank(hx), gf2.rank(hz)
    if rx < hx.shape[0] or rz < hz.shape[0]:
        notes.append(f"rank deficiency: dropped {hx.shape[0] - rx} X and {hz.shape[0] - rz} Z checks")
        hx = gf2.complement_basis(hx, np.zeros((0, n)))
        hz = gf2.complement_basis(hz, np.zeros((0, n)))
    k = n - rx - rz
    if k < 1:
        raise CodeError("code encodes no logical qubits")
    xl = gf2.complement_basis(gf2.nullspace(hz), hx)
    zl = gf2.complement_basis(gf2.nullspace(hx), hz)
    pairing = (xl.astype(np.int64) @ zl.T.astype(np.int64)) & 1
    zl = (gf2.inverse(pairing).T.astype(np.int64) @ zl) & 1
    zero_x = np.zeros_like(hx)
    zero_z = np.zeros_like(hz)
    stabs = np.vstack([np.hstack([hx, zero_x]), np.hstack([zero_z, hz])]).astype(np.uint8)
    lx = np.hstack([xl, np.zeros_like(xl)]).astype(np.uint8)
    lz = np.hstack([np.zeros_like(zl), zl]).astype(np.uint8)
    code = StabilizerCode(n, k, stabs, lx, lz, name=name, notes=tuple(notes))
    code.validate()
    return code


HAMMING_7_4 = np.array(
    [[0, 0, 0, 1, 1, 1, 1],
     [0, 1, 1, 0, 0, 1, 1],
     [1, 0, 1, 0, 1, 0, 1]],
    dtype=np.uint8,
)


def steane_code() -> StabilizerCode:
    """The [[7,1,3]] Steane code with transversal logical X^7 and Z^7."""
    base = css_from_parity_checks(HAMMING_7_4, HAMMING_7_4, name="steane")
    ones, zeros = np.ones(7, np.uint8), np.zeros(7, np.uint8)
    code = StabilizerCode(
        7, 1, base.stabilizers,
        np.concatenate([ones, zeros])[None, :],
        np.concatenate([zeros, ones])[None, :],
        distance=3, name="steane",
    )
    code.validate()
    return code


def trivial_code() -> StabilizerCode:
    """A single ancilla qubit stabilized by Z; used to pad syndrome space."""
    return StabilizerCode(
        1, 0, np.array([[0, 1]], np.uint8), np.zeros((0, 2), np.uint8),
        np.zeros((0, 2), np.uint8), distance=None, name="ancilla",
    )


class ProductCode(StabilizerCode):
    """Direct product of codes; generators and logicals ordered block by block.

    Dense operator matrices are only formed on demand, so products with
    thousands of ancilla blocks stay cheap.
    """

    def __init__(self, blocks):
        self.blocks = tuple(blocks)
        self.n = sum(b.n for b in self.blocks)
        self.k = sum(b.k for b in self.blocks)
        dists = [b.distance for b in self.blocks if b.k > 0]
        self.distance = min(dists) if dists and None not in dists else None
        names = [b.name for b in self.blocks]
        self.name = "product(" + "x".join(sorted(set(names), key=names.index)) + ")"
        self.notes = ()

    def _stack(self, attr: str) -> np.ndarray:
        rows, off = [], 0
        for b in self.blocks:
            rows.append(_embed(getattr(b, attr), b.n, off, self.n))
            off += b.n
        return np.vstack(rows)

    @cached_property
    def stabilizers(self) -> np.ndarray:
        return self._stack("stabilizers")

    @cached_property
    def logical_x(self) -> np.ndarray:
        return self._stack("logical_x")

    @cached_property
    def logical_z(self) -> np.ndarray:
        return self._stack("logical_z")

    def syndrome(self, error: PauliOperator) -> np.ndarray:
        out, off = [], 0
        for b in self.blocks:
            sl = slice(off, off + b.n)
            out.append(b.syndrome(PauliOperator(error.x[sl], error.z[sl])))
            off += b.n
        return np.concatenate(out)


def product_code(*blocks: StabilizerCode) -> ProductCode:
    flat = []
    for b in blocks:
        flat.extend(b.blocks or (b,))
    return ProductCode(flat)


def product_steane(k: int, padding: int = 0) -> StabilizerCode:
    """``k`` Steane blocks followed by ``padding`` ancilla qubits."""
    if k < 1:
        raise CodeError("need at least one logical qubit")
    s = steane_code()
    return product_code(*([s] * k + [trivial_code()] * padding))


def load_parity_check_file(path) -> StabilizerCode:
    """Read ``n k`` then Hx rows, a blank line, then Hz rows (0/1 strings)."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise CodeError(f"{path}: empty parity-check file")
    try:
        n, k = (int(v) for v in text[0].split())
    except ValueError as exc:
        raise CodeError(f"{path}: header must be 'n k'") from exc
    body = text[1:]
    try:
        gap = next(i for i, line in enumerate(body) if not line.strip())
    except StopIteration:
        raise CodeError(f"{path}: missing blank line between Hx and Hz") from None

    def parse(lines):
        rows = [line.strip() for line in lines if line.strip()]
        if any(len(r) != n or set(r) - {"0", "1"} for r in rows):
            raise CodeError(f"{path}: rows must be {n} characters of 0/1")
        return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(-1, n)

    code = css_from_parity_checks(parse(body[:gap]), parse(body[gap + 1:]), name=Path(path).stem)
    if code.k != k:
        raise CodeError(f"{path}: header says k={k} but checks give k={code.k}")
    return code


def code_distance(code: StabilizerCode, max_weight: int | None = None) -> int | None:
    """Smallest weight of a logical operator, by brute force."""
    limit = code.n if max_weight is None else max_weight
    for w in range(1, limit + 1):
        for p in _paulis_of_weight(code.n, w):
            v = _to_vec(p)
            if _sym(code.stabilizers, v[None]).any():
                continue
            if not gf2.in_rowspace(code.stabilizers, v):
                return w
    return None


def _paulis_of_weight(n: int, w: int):
    """Weight-``w`` Paulis in increasing lexicographic order of ``[x | z]``."""
    items = []
    for support in itertools.combinations(range(n), w):
        for letters in itertools.product(((1, 0), (0, 1), (1, 1)), repeat=w):
            x = np.zeros(n, np.uint8)
            z = np.zeros(n, np.uint8)
            for q, (a, b) in zip(support, letters):
                x[q], z[q] = a, b
            items.append((tuple(np.concatenate([x, z])), x, z))
    items.sort(key=lambda t: t[0])
    for _, x, z in items:
        yield PauliOperator(x, z, int(x @ z))


def logical_component(p: PauliOperator, code: StabilizerCode) -> PauliOperator:
    """Logical Pauli with the same commutation pattern with the logical operators."""
    v = _to_vec(p)[None, :]
    x = _sym(v, code.logical_z)[0] if code.k else np.zeros(0, np.uint8)
    z = _sym(v, code.logical_x)[0] if code.k else np.zeros(0, np.uint8)
    return PauliOperator(x, z, int(x @ z))


def physical_syndrome(state: StabilizerState, code: StabilizerCode) -> np.ndarray:
    """Syndrome of an encoded physical state whose generators are all determined."""
    out = np.zeros(code.n_syndrome, np.uint8)
    for j, g in enumerate(code.generators()):
        e = pauli_expectation(state, g)
        if e == 0:
            raise CodeError("syndrome bit is not deterministic for this state")
        out[j] = e < 0
    return out


def measure_syndrome(state) -> np.ndarray:
    """Syndrome register of an unencoded-frame state (a copy of its bits)."""
    return np.array(state.syndrome_bits, dtype=np.uint8, copy=True)


# ---------------------------------------------------------------------------
# Decoders


@dataclass
class DecoderBlock:
    """Lookup table from every syndrome of one code block to a logical Pauli."""

    n_syndrome: int
    k: int
    table_x: np.ndarray = field(repr=False)
    table_z: np.ndarray = field(repr=False)
    report: dict = field(default_factory=dict)

    def lookup(self, s: int) -> PauliOperator:
        x, z = self.table_x[s], self.table_z[s]
        return PauliOperator(x, z, int(x @ z))


@dataclass
class Decoder:
    """Product of lookup blocks, each repeated ``count`` times in a row."""

    groups: list

    @property
    def n_syndrome(self) -> int:
        return sum(b.n_syndrome * c for b, c in self.groups)

    @property
    def k(self) -> int:
        return sum(b.k * c for b, c in self.groups)

    @property
    def table(self) -> dict:
        """``{syndrome tuple: logical Pauli}`` for a single-block decoder."""
        if len(self.groups) != 1 or self.groups[0][1] != 1:
            raise CodeError("explicit tables are only formed for single-block decoders")
        block = self.groups[0][0]
        return {
            tuple(_int_to_bits(s, block.n_syndrome)): block.lookup(s)
            for s in range(2**block.n_syndrome)
        }

    def decode_bits(self, syndrome) -> tuple[np.ndarray, np.ndarray]:
        s = np.asarray(syndrome, dtype=np.int64)
        xs, zs = [], []
        off = 0
        for block, count in self.groups:
            width = block.n_syndrome * count
            if block.k:
                seg = s[off:off + width].reshape(count, block.n_syndrome)
                idx = seg @ (1 << np.arange(block.n_syndrome - 1, -1, -1))
                xs.append(block.table_x[idx].reshape(-1))
                zs.append(block.table_z[idx].reshape(-1))
            off += width
        if off != s.shape[0]:
            raise CodeError(f"syndrome has {s.shape[0]} bits, decoder expects {off}")
        x = np.concatenate(xs) if xs else np.zeros(0, np.uint8)
        z = np.concatenate(zs) if zs else np.zeros(0, np.uint8)
        return x, z

    def decode(self, syndrome) -> PauliOperator:
        x, z = self.decode_bits(syndrome)
        return PauliOperator(x, z, int(x @ z))


def _min_weight_block(code: StabilizerCode, cutoff: int | None, extend: bool) -> DecoderBlock:
    r = code.n_syndrome
    if r > 24:
        raise CodeError(f"syndrome space of 2^{r} is too large for a lookup table")
    size = 2**r
    tx = np.zeros((size, code.k), np.uint8)
    tz = np.zeros((size, code.k), np.uint8)
    filled = np.zeros(size, bool)
    filled[0] = True
    if code.k == 0:
        return DecoderBlock(r, 0, tx, tz, {"cutoff": 0, "unfilled": []})
    d = code.distance or code_distance(code)
    limit = cutoff if cutoff is not None else math.ceil(((d or 3) - 1) / 2) + 1
    weight = 0
    while True:
        weight += 1
        if weight > code.n or (weight > limit and not extend) or filled.all():
            break
        for p in _paulis_of_weight(code.n, weight):
            s = _bits_to_int(code.syndrome(p))
            if filled[s]:
                continue
            lp = logical_component(p, code)
            tx[s], tz[s], filled[s] = lp.x, lp.z, True
    report = {"cutoff": limit if not extend else weight, "unfilled": [int(i) for i in np.nonzero(~filled)[0]]}
    return DecoderBlock(r, code.k, tx, tz, report)


def min_weight_decoder(code: StabilizerCode, cutoff: int | None = None, extend: bool = False) -> Decoder:
    """Minimum-weight lookup decoder; product codes are decoded block by block.

    Errors are enumerated by weight and then lexicographically on ``[x | z]``;
    the first error reaching a syndrome fixes its correction. Syndromes not
    reached within the weight cutoff decode to the identity and are listed in
    the block report.
    """
    blocks = code.blocks or (code,)
    cache: dict[int, DecoderBlock] = {}
    groups: list = []
    for b in blocks:
        block = cache.get(id(b))
        if block is None:
            block = cache[id(b)] = _min_weight_block(b, cutoff, extend)
        if groups and groups[-1][0] is block:
            groups[-1][1] += 1
        else:
            groups.append([block, 1])
    return Decoder([tuple(g) for g in groups])


def trivial_decoder(n_syndrome: int, k: int) -> Decoder:
    """Decoder that never corrects anything (not surjective for k >= 1)."""
    size = 2**n_syndrome
    z = np.zeros((size, k), np.uint8)
    return Decoder([(DecoderBlock(n_syndrome, k, z, z.copy()), 1)])


@dataclass
class SyndromePreimages:
    """Chosen syndrome ``S(P)`` for every logical Pauli ``P`` (modulo phase)."""

    decoder: Decoder
    tables: list  # per group: array of syndrome ints indexed by logical encoding, -1 if none

    def syndrome(self, p: PauliOperator) -> np.ndarray:
        bits = []
        q = 0
        for (block, count), pre in zip(self.decoder.groups, self.tables):
            for _ in range(count):
                if block.k:
                    idx = _bits_to_int(_interleave(p.x[q:q + block.k], p.z[q:q + block.k]))
                    s = int(pre[idx])
                    if s < 0:
                        raise CodeError("logical Pauli has no syndrome preimage")
                    q += block.k
                else:
                    s = 0
                bits.append(_int_to_bits(s, block.n_syndrome))
        return np.concatenate(bits)


def _interleave(x, z) -> np.ndarray:
    out = np.empty(2 * len(x), np.uint8)
    out[0::2], out[1::2] = x, z
    return out


def check_surjective(decoder: Decoder, k: int | None = None) -> tuple[bool, SyndromePreimages]:
    """Whether every logical Pauli mod phase is some decoder output.

    The returned preimages use the lexicographically smallest syndrome.
    """
    if k is not None and k != decoder.k:
        raise CodeError(f"decoder has k={decoder.k}, expected {k}")
    ok = True
    tables = []
    for block, _ in decoder.groups:
        pre = np.full(4**block.k, -1, dtype=np.int64)
        for s in range(2**block.n_syndrome):
            idx = _bits_to_int(_interleave(block.table_x[s], block.table_z[s]))
            if pre[idx] < 0:
                pre[idx] = s
        ok &= bool((pre >= 0).all())
        tables.append(pre)
    return ok, SyndromePreimages(decoder, tables)


@dataclass
class PiMap:
    """Relabeling of destabilizer encodings onto decoder preimage syndromes.

    ``forward`` takes the 2k-bit encoding ``B(P)`` to the syndrome
    ``S(P)``. ``inverse`` maps any syndrome back to an encoding; off the image
    of ``forward`` it returns the encoding of the decoder's own correction.
    """

    decoder: Decoder
    forward_tables: list
    n_syndrome: int
    k: int

    def forward(self, bits) -> np.ndarray:
        b = np.asarray(bits, dtype=np.int64)
        out = []
        q = 0
        for (block, count), fwd in zip(self.decoder.groups, self.forward_tables):
            if block.k:
                seg = b[2 * q:2 * (q + count * block.k)].reshape(count, 2 * block.k)
                idx = seg @ (1 << np.arange(2 * block.k - 1, -1, -1))
                out.append(fwd[idx].reshape(-1))
                q += count * block.k
            else:
                out.append(np.zeros(count * block.n_syndrome, np.uint8))
        return np.concatenate(out)

    def inverse(self, syndrome) -> np.ndarray:
        x, z = self.decoder.decode_bits(syndrome)
        return _interleave(x, z)

    @cached_property
    def window(self) -> np.ndarray:
        """Syndrome positions that any forward image can set."""
        cols = []
        off = 0
        for (block, count), fwd in zip(self.decoder.groups, self.forward_tables):
            support = np.nonzero(fwd.any(axis=0))[0] if block.k else np.zeros(0, int)
            for c in range(count):
                cols.append(off + c * block.n_syndrome + support)
            off += count * block.n_syndrome
        return np.concatenate(cols).astype(np.int64)


def build_pi(
    decoder: Decoder, preimages: SyndromePreimages, k: int | None = None, strict: bool = True
) -> PiMap:
    """Forward tables from the chosen preimages.

    With ``strict=False`` a non-surjective decoder is accepted and Paulis
    without a preimage map to the zero syndrome; this exists only to study
    what breaks when surjectivity fails.
    """
    k = decoder.k if k is None else k
    if k != decoder.k:
        raise CodeError(f"decoder has k={decoder.k}, expected {k}")
    surjective, _ = check_surjective(decoder)
    if not surjective and strict:
        raise CodeError("decoder is not surjective; no relabeling map exists")
    if decoder.n_syndrome < 2 * k:
        raise CodeError("syndrome register is smaller than the 2k-bit encoding")
    tables = []
    for (block, _), pre in zip(decoder.groups, preimages.tables):
        fwd = np.zeros((4**block.k, block.n_syndrome), np.uint8)
        for idx in range(4**block.k):
            fwd[idx] = _int_to_bits(max(int(pre[idx]), 0), block.n_syndrome)
        tables.append(fwd)
    pi = PiMap(decoder, tables, decoder.n_syndrome, k)
    if strict and len(pi.window) < 2 * k:
        raise CodeError("preimage syndromes do not span a 2k-bit window")
    return pi


def reset_syndrome(bits, r: float, rng: np.random.Generator) -> np.ndarray:
    """Independently zero each bit with probability ``r``."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("reset probability must lie in [0, 1]")
    b = np.asarray(bits, dtype=np.uint8)
    if r == 0.0:
        return b.copy()
    if r == 1.0:
        return np.zeros_like(b)
    keep = rng.random(b.shape) >= r
    return b & keep.astype(np.uint8)
