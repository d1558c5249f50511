"""Logical randomized benchmarking where the decoder itself injects the noise.

The simulation lives in the unencoded frame: the k logical qubits are a
stabilizer state and the n-k syndrome qubits are classical bits. A window of
the syndrome register stores the relabeled encoding of the current
destabilizer, so each error-correction round applies that destabilizer to
the logical state. With ``copies > 1`` the encoding is repeated in padding
syndrome bits, which keeps it alive under probabilistic syndrome reset.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import gf2
from .pauli_clifford import (
    CliffordTableau,
    PauliOperator,
    StabilizerState,
    compose,
    default_destabilizer,
    inverse,
    pauli_encode,
    projector_probability,
    random_clifford,
    random_symplectic,
    state_apply_clifford,
    state_apply_pauli,
)
from .qec_codes import (
    CodeError,
    Decoder,
    PiMap,
    StabilizerCode,
    build_pi,
    check_surjective,
    min_weight_decoder,
    physical_syndrome,
    product_steane,
    reset_syndrome,
)
from .sampling import SurvivalCurve, count_outcomes


def max_copies(code: StabilizerCode) -> int:
    """Largest repetition count that fits in the code's syndrome register."""
    return (code.n - code.k) // (2 * code.k)


@dataclass(frozen=True, eq=False)
class LrbConfig:
    code: StabilizerCode
    decoder: Decoder
    pi: PiMap
    reset_prob: float = 0.0
    m_values: tuple[int, ...] = tuple(range(2, 13))
    n_sequences: int = 100
    seed: int = 0
    copies: int = 1
    surjective: bool = True

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        k = self.code.k
        if not 0.0 <= self.reset_prob <= 1.0:
            raise ValueError("reset probability must lie in [0, 1]")
        if not self.m_values or min(self.m_values) < 2:
            raise ValueError("sequence lengths must all be >= 2")
        if self.n_sequences < 1:
            raise ValueError("n_sequences must be positive")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if self.copies == 1 and self.code.n <= 3 * k:
            raise CodeError(f"need n > 3k, got n={self.code.n}, k={k}")
        if self.copies > 1 and self.code.n <= k * (1 + 2 * self.copies):
            raise CodeError(
                f"{self.copies} copies need n > k(1 + 2c) = {k * (1 + 2 * self.copies)}, "
                f"code has n={self.code.n} (at most {max_copies(self.code)} copies fit)"
            )
        if self.decoder.k != k or self.decoder.n_syndrome != self.code.n - k:
            raise CodeError("decoder does not match the code")
        if self.copies > 1 and self.copy_positions.shape[0] != self.copies - 1:
            raise CodeError("not enough syndrome bits outside the decoder window for the copies")

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def window(self) -> np.ndarray:
        return self.pi.window

    @cached_property
    def copy_positions(self) -> np.ndarray:
        """Syndrome positions of copies 1..c-1, one row per copy."""
        k2 = 2 * self.k
        free = np.setdiff1d(np.arange(self.code.n - self.k), self.window)
        need = (self.copies - 1) * k2
        if need > free.size:
            return np.zeros((0, k2), np.int64)
        return free[free.size - need:].reshape(self.copies - 1, k2)

    def summary(self) -> dict:
        return {
            "code": self.code.name,
            "n": self.code.n,
            "k": self.k,
            "reset_prob": self.reset_prob,
            "copies": self.copies,
            "n_sequences": self.n_sequences,
            "seed": self.seed,
            "surjective": self.surjective,
        }


def lrb_config(
    k: int,
    reset_prob: float = 0.0,
    copies: int = 1,
    code: StabilizerCode | None = None,
    decoder: Decoder | None = None,
    strict: bool = True,
    **kwargs,
) -> LrbConfig:
    """Config over ``k`` Steane blocks, padded with ancillas when copies are requested.

    A user-supplied ``code`` is never padded; asking it for more copies than
    fit raises ``CodeError``.
    """
    if code is None:
        code = product_steane(k, padding=2 * k * (copies - 1))
    elif code.k != k:
        raise CodeError(f"code encodes {code.k} logical qubits, expected {k}")
    if decoder is None:
        decoder = min_weight_decoder(code)
    surjective, pre = check_surjective(decoder)
    if not surjective and strict:
        raise CodeError("decoder is not surjective; no relabeling map exists")
    pi = build_pi(decoder, pre, strict=strict)
    return LrbConfig(code, decoder, pi, reset_prob, copies=copies, surjective=surjective, **kwargs)


@dataclass
class UnencodedState:
    logical: StabilizerState
    syndrome_bits: np.ndarray
    applied: list = field(default_factory=list)

    def copy(self) -> "UnencodedState":
        return UnencodedState(self.logical.copy(), self.syndrome_bits.copy(), list(self.applied))


def _write_encoding(bits: np.ndarray, enc: np.ndarray, config: LrbConfig) -> np.ndarray:
    out = np.zeros_like(bits)
    out[config.window] = config.pi.forward(enc)[config.window]
    if config.copies > 1:
        out[config.copy_positions] = enc
    return out


def consensus(state: UnencodedState, config: LrbConfig) -> np.ndarray:
    """Column-OR of every stored copy of the 2k-bit encoding."""
    enc = config.pi.inverse(state.syndrome_bits)
    if config.copies > 1:
        enc = enc | np.bitwise_or.reduce(state.syndrome_bits[config.copy_positions], axis=0)
    return enc


def prepare_faulty_initial(config: LrbConfig) -> UnencodedState:
    logical = StabilizerState.zero(config.k)
    enc = pauli_encode(default_destabilizer(logical))
    bits = np.zeros(config.code.n - config.k, np.uint8)
    return UnencodedState(logical, _write_encoding(bits, enc, config))


def lrb_gate_step(state: UnencodedState, g: CliffordTableau, config: LrbConfig) -> UnencodedState:
    """Apply ``G`` to the logical qubits and the covariant relabeled update to the window."""
    enc = consensus(state, config)
    x, z = g.conjugate_bits(enc[0::2], enc[1::2])
    new = np.empty_like(enc)
    new[0::2], new[1::2] = x, z
    return UnencodedState(
        state_apply_clifford(state.logical, g),
        _write_encoding(state.syndrome_bits, new, config),
        state.applied,
    )


def qec_round(state: UnencodedState, config: LrbConfig, rng: np.random.Generator) -> UnencodedState:
    """Decode and apply the correction, then OR-spread copies and reset bits."""
    correction = config.decoder.decode(state.syndrome_bits)
    logical = state_apply_pauli(state.logical, correction)
    applied = state.applied + [correction]
    bits = state.syndrome_bits
    if config.copies > 1:
        bits = _write_encoding(bits, consensus(state, config), config)
    bits = reset_syndrome(bits, config.reset_prob, rng)
    return UnencodedState(logical, bits, applied)


def run_lrb_trace(m: int, config: LrbConfig, rng: np.random.Generator):
    """Full sequence; returns the final state and the drawn gates."""
    if m < 2:
        raise ValueError("sequence length must be >= 2")
    state = prepare_faulty_initial(config)
    total = CliffordTableau.identity(config.k)
    gates = []
    for _ in range(m - 1):
        g = random_clifford(config.k, rng)
        gates.append(g)
        total = compose(g, total)
        state = qec_round(lrb_gate_step(state, g, config), config, rng)
    g = inverse(total)
    gates.append(g)
    state = qec_round(lrb_gate_step(state, g, config), config, rng)
    return state, gates


def run_lrb_sequence(m: int, config: LrbConfig, rng: np.random.Generator) -> int:
    """Outcome bit of one sequence, simulated with a Pauli frame.

    The logical state is always ``F U |0>`` with ``U`` the product of the gates
    so far and ``F`` a Pauli, so only ``F`` and the symplectic part of ``U``
    are tracked. Random draws match ``run_lrb_trace`` one for one, hence the
    outcome equals the survival of the traced state.
    """
    if m < 2:
        raise ValueError("sequence length must be >= 2")
    k = config.k
    bits = prepare_faulty_initial(config).syndrome_bits
    frame = np.zeros(2 * k, np.int64)
    total = np.eye(2 * k, dtype=np.int64)
    lam = np.roll(np.eye(2 * k, dtype=np.int64), k, axis=1)
    interleave = np.concatenate([np.arange(0, 2 * k, 2), np.arange(1, 2 * k, 2)])
    for step in range(m):
        if step < m - 1:
            sym, _ = random_symplectic(k, rng)
            total = (total @ sym) & 1
        else:
            sym = (lam @ total.T @ lam) & 1
        enc = config.pi.inverse(bits)
        if config.copies > 1:
            enc = enc | np.bitwise_or.reduce(bits[config.copy_positions], axis=0)
        v = (enc[interleave] @ sym) & 1
        new = np.empty(2 * k, np.uint8)
        new[0::2], new[1::2] = v[:k], v[k:]
        bits = _write_encoding(bits, new, config)
        frame = (frame @ sym) & 1
        cx, cz = config.decoder.decode_bits(bits)
        frame[:k] ^= cx
        frame[k:] ^= cz
        bits = reset_syndrome(bits, config.reset_prob, rng)
    return int(not frame[:k].any())


def estimate_lrb_survival(config: LrbConfig, workers: int = 1) -> SurvivalCurve:
    if not config.surjective:
        warnings.warn("decoder is not surjective; oscillations are not expected", stacklevel=2)
    counts = count_outcomes(
        run_lrb_sequence, config, config.m_values, config.n_sequences, config.seed, workers
    )
    meta = {"experiment": "lrb", **config.summary()}
    return SurvivalCurve.from_counts(counts, config.n_sequences, meta)


# ---------------------------------------------------------------------------
# Encoded-frame oracle


def _window_linear_map(config: LrbConfig, g: CliffordTableau) -> np.ndarray:
    """GF(2) matrix of ``bits -> pi(update(pi^-1(bits), G))`` on the window bits."""
    w = config.window
    size = config.code.n - config.k
    cols = []
    for j in range(w.size):
        e = np.zeros(size, np.uint8)
        e[w[j]] = 1
        enc = config.pi.inverse(e)
        x, z = g.conjugate_bits(enc[0::2], enc[1::2])
        new = np.empty_like(enc)
        new[0::2], new[1::2] = x, z
        cols.append(config.pi.forward(new)[w])
    return np.array(cols, dtype=np.uint8).T


def encoded_gate(config: LrbConfig, g: CliffordTableau) -> CliffordTableau:
    """Physical n-qubit Clifford ``E (U_G x pi V_G pi^-1 x I) E^-1``."""
    if config.copies != 1:
        raise CodeError("the encoded oracle covers the single-copy construction only")
    n, k = config.code.n, config.k
    mat = _window_linear_map(config, g)
    slots = k + config.window
    sym = np.zeros((2 * n, 2 * n), np.uint8)
    sym[np.arange(n), np.arange(n)] = 1
    sym[n + np.arange(n), n + np.arange(n)] = 1
    # logical block
    gs = g.symplectic
    sym[:k, :k] = gs[:k, :k]
    sym[:k, n:n + k] = gs[:k, k:]
    sym[n:n + k, :k] = gs[k:, :k]
    sym[n:n + k, n:n + k] = gs[k:, k:]
    # basis permutation x -> M x: X_j -> X^{M e_j}, Z_j -> Z^{M^-T e_j}
    minv_t = gf2.inverse(mat).T
    for a, sa in enumerate(slots):
        sym[sa, :n] = 0
        sym[n + sa, n:] = 0
        sym[sa, slots] = mat[:, a]
        sym[n + sa, n + slots] = minv_t[:, a]
    local = CliffordTableau.from_symplectic(sym)
    phase = local.phase.copy()
    phase[:k] = g.phase[:k]
    phase[n:n + k] = g.phase[k:]
    local = CliffordTableau(local.x, local.z, phase)
    enc = config.code.encoder
    return compose(enc, compose(local, inverse(enc)))


def _embed_pauli(p: PauliOperator, n: int) -> PauliOperator:
    x = np.zeros(n, np.uint8)
    z = np.zeros(n, np.uint8)
    x[:p.k], z[:p.k] = p.x, p.z
    return PauliOperator(x, z, p.phase)


def run_lrb_encoded(gates: list[CliffordTableau], config: LrbConfig) -> float:
    """Survival probability of the physical n-qubit circuit for fixed gates (r = 0).

    The syndrome is read from the stabilizer generators, the decoder's
    logical correction is applied as the encoded physical Pauli, and the
    final outcome is the probability of the logical-zero projector.
    """
    if config.reset_prob != 0.0:
        raise CodeError("the encoded oracle is exact only without syndrome reset")

    code, k = config.code, config.k
    n = code.n
    enc = config.code.encoder
    init = prepare_faulty_initial(config)
    flips = np.zeros(n, np.uint8)
    flips[k:] = init.syndrome_bits
    prep = state_apply_pauli(StabilizerState.zero(n), PauliOperator(flips, np.zeros(n, np.uint8)))
    state = StabilizerState(compose(enc, prep.tableau))
    for g in gates:
        state = StabilizerState(compose(encoded_gate(config, g), state.tableau))
        s = physical_syndrome(state, code)
        corr = config.decoder.decode(s)
        state = state_apply_pauli(state, enc.conjugate(_embed_pauli(corr, n)))
    logical_z = [code.logical("Z", i) for i in range(k)]
    return projector_probability(state, logical_z)

