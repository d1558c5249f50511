"""Classical repetition code that protects the stored destabilizer against reset.

Register B holds ``c`` copies of the 2k-bit destabilizer encoding. Each round
the copies are merged by a column-wise OR, updated under the gate and written
back to every copy before the syndrome reset. A 1-bit is lost only when all
``c`` of its copies are reset in the same round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli_clifford import CliffordTableau
from .qec_codes import PiMap, reset_syndrome


@dataclass(frozen=True)
class ShieldMatrix:
    """``c`` rows, each a copy of the interleaved 2k-bit encoding."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.uint8)
        if rows.ndim != 2 or rows.shape[1] % 2:
            raise ValueError("shield rows must form a (c, 2k) bit matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def replicate(cls, bits, c: int) -> "ShieldMatrix":
        return cls(np.tile(np.asarray(bits, dtype=np.uint8), (c, 1)))

    @property
    def copies(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1] // 2

    def consensus(self) -> np.ndarray:
        return np.bitwise_or.reduce(self.rows, axis=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShieldMatrix):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)


def spread_or(m: ShieldMatrix) -> ShieldMatrix:
    """Set every copy of each bit to the OR of that bit across copies."""
    return ShieldMatrix.replicate(m.consensus(), m.copies)


def _update(bits: np.ndarray, g: CliffordTableau) -> np.ndarray:
    x, z = g.conjugate_bits(bits[0::2], bits[1::2])
    out = np.empty_like(bits)
    out[0::2], out[1::2] = x, z
    return out


def shield_round(
    m: ShieldMatrix,
    g: CliffordTableau,
    pi: PiMap | None,
    r: float,
    rng: np.random.Generator,
) -> ShieldMatrix:
    """Consensus, covariant update under ``g``, broadcast, then per-bit reset.

    When ``pi`` is given the consensus passes through the relabeled syndrome
    and back, exactly as the copy held in the decoder window does.
    """
    if g.k != m.k:
        raise ValueError("gate and shield act on different numbers of qubits")
    enc = m.consensus()
    if pi is not None:
        enc = pi.inverse(pi.forward(enc))
    new = _update(enc, g)
    if pi is not None:
        new = pi.inverse(pi.forward(new))
    rows = np.tile(new, (m.copies, 1))
    return ShieldMatrix(reset_syndrome(rows, r, rng))


def _check_target(A: float, r: float) -> None:
    if not math.sqrt(2) - 1 <= A < 1:
        raise ValueError(f"target amplitude must satisfy sqrt(2)-1 <= A < 1, got {A}")
    if not 0 < r < 1:
        raise ValueError(f"reset probability must lie in (0, 1), got {r}")


def copies_needed(k: int, m: int, A: float, r: float) -> int:
    """Copy count from the closed-form estimate ``ceil(log_{1/r}(sqrt(2km)/(1-A)))``.

    This is an approximation; ``amplitude_lower_bound`` at the returned count
    can fall short of ``A``. ``copies_sufficient`` gives the exact count.
    """
    _check_target(A, r)
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    return math.ceil(math.log(math.sqrt(2 * k * m) / (1 - A)) / math.log(1 / r))


def copies_sufficient(k: int, m: int, A: float, r: float) -> int:
    """Smallest ``c`` with ``(1 - r^c)^(2km) >= A``."""
    _check_target(A, r)
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    per_bit = A ** (1.0 / (2 * k * m))
    c = max(1, math.ceil(math.log1p(-per_bit) / math.log(r)))
    # guard the float boundary in both directions
    while c > 1 and amplitude_lower_bound(c - 1, k, m, r) >= A:
        c -= 1
    while amplitude_lower_bound(c, k, m, r) < A:
        c += 1
    return c


def amplitude_lower_bound(c: int, k: int, m: int, r: float) -> float:
    """``(1 - r^c)^(2km)``: every 1-bit of the encoding survives all m rounds."""
    if c < 1 or k < 1 or m < 0:
        raise ValueError("c, k must be positive and m non-negative")
    if not 0.0 <= r <= 1.0:
        raise ValueError("reset probability must lie in [0, 1]")
    return math.exp(2 * k * m * math.log1p(-(r**c))) if r < 1 else float(m == 0)


def simulate_shield_survival(
    k: int,
    m: int,
    c: int,
    r: float,
    n_trials: int,
    rng: np.random.Generator,
    bits=None,
) -> float:
    """Fraction of trials in which every 1-bit of ``bits`` survives m rounds.

    ``bits`` defaults to all ones, the worst case. A bit dies in a round when
    all ``c`` of its copies are reset, which happens with probability ``r^c``.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError("reset probability must lie in [0, 1]")
    ones = np.ones(2 * k, bool) if bits is None else np.asarray(bits, dtype=bool)
    w = int(ones.sum())
    if r == 0.0 or w == 0 or m == 0:
        return 1.0
    wiped = rng.binomial(c, r, size=(n_trials, m, w)) == c
    return float(np.mean(~wiped.any(axis=(1, 2))))
