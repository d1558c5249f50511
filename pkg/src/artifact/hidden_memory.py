"""Hidden classical memories that drive the oscillating survival curves.

Register B holds the bit encoding of a destabilizer of the benchmarked
register A and is updated covariantly with every gate. Register C is a
mod-tau step counter with a trigger bit that gates when register B is read.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .pauli_clifford import (
    CliffordTableau,
    PauliOperator,
    StabilizerState,
    pauli_decode,
    pauli_encode,
    state_apply_pauli,
)


@dataclass(frozen=True)
class RegisterB:
    bits: np.ndarray

    @property
    def k(self) -> int:
        return self.bits.shape[-1] // 2

    def pauli(self) -> PauliOperator:
        return pauli_decode(self.bits)


@dataclass(frozen=True)
class RegisterC:
    tau: int
    counter: int = 0
    trigger: int = 0

    def __post_init__(self):
        if self.tau < 2:
            raise ValueError(f"tau must be >= 2, got {self.tau}")
        if not 0 <= self.counter < self.tau:
            raise ValueError("counter out of range")


def registerb_init(p0: PauliOperator) -> RegisterB:
    if p0.is_identity():
        raise ValueError("initial destabilizer must not be the identity")
    return RegisterB(pauli_encode(p0))


def registerb_update(b: RegisterB, g: CliffordTableau) -> RegisterB:
    """Re-encode ``G P G^-1`` for the Pauli ``P`` stored in ``b``."""
    if g.k != b.k:
        raise ValueError("gate and register act on different numbers of qubits")
    bits = b.bits
    x, z = g.conjugate_bits(bits[0::2], bits[1::2])
    out = np.empty_like(bits)
    out[0::2], out[1::2] = x, z
    return RegisterB(out)


def noise_apply(s: StabilizerState, b: RegisterB) -> StabilizerState:
    """Apply the Pauli stored in register B to register A."""
    return state_apply_pauli(s, b.pauli())


def registerc_advance(c: RegisterC) -> RegisterC:
    """One step of the counter map; the trigger flips entering and leaving tau-1."""
    trig = c.trigger ^ 1 if c.counter >= c.tau - 2 else c.trigger
    return replace(c, counter=(c.counter + 1) % c.tau, trigger=trig)


def noise_apply_triggered(
    s: StabilizerState, b: RegisterB, c: RegisterC
) -> tuple[StabilizerState, RegisterC]:
    """Apply register B to register A if the trigger is set, then advance C.

    From a fresh register C the first application happens on the tau-th call.
    """
    if c.trigger:
        s = noise_apply(s, b)
    return s, registerc_advance(c)
