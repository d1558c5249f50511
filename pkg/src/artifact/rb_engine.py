"""Randomized benchmarking sequences, exact twirl evaluation and decay fits."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg, optimize

from .hidden_memory import (
    RegisterC,
    noise_apply,
    noise_apply_triggered,
    registerc_advance,
    registerb_init,
    registerb_update,
)
from .pauli_clifford import (
    CliffordTableau,
    PauliOperator,
    StabilizerState,
    compose,
    default_destabilizer,
    enumerate_cliffords,
    inverse,
    random_clifford,
    random_symplectic,
    state_apply_clifford,
    state_apply_pauli,
)
from .sampling import SurvivalCurve, count_outcomes

MODELS = ("ideal", "depolarizing", "hidden_register", "hidden_register_tau")


@dataclass(frozen=True)
class RbConfig:
    k: int = 1
    model: str = "ideal"
    m_values: tuple[int, ...] = tuple(range(2, 13))
    n_sequences: int = 100
    seed: int = 0
    p: float = 0.0
    tau: int = 2

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.m_values or min(self.m_values) < 2:
            raise ValueError("sequence lengths must all be > 1")
        if self.n_sequences < 1:
            raise ValueError("n_sequences must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("depolarizing probability must lie in [0, 1]")
        if self.tau < 2:
            raise ValueError("tau must be >= 2")


def _random_pauli(k: int, rng: np.random.Generator) -> PauliOperator:
    bits = rng.integers(2, size=2 * k, dtype=np.uint8)
    x, z = bits[:k], bits[k:]
    return PauliOperator(x, z, int(x @ z))


def run_rb_trace(m: int, config: RbConfig, rng: np.random.Generator) -> StabilizerState:
    """Final state of one RB sequence of length ``m``, tracked as a full tableau."""
    if m < 2:
        raise ValueError("sequence length must be > 1")
    k, model = config.k, config.model
    state = StabilizerState.zero(k)
    total = CliffordTableau.identity(k)
    reg_b = reg_c = None
    if model.startswith("hidden_register"):
        reg_b = registerb_init(default_destabilizer(state))
        if model == "hidden_register_tau":
            reg_c = RegisterC(config.tau)

    def step(state, gate):
        nonlocal reg_b, reg_c
        state = state_apply_clifford(state, gate)
        if model == "depolarizing":
            if rng.random() < config.p:
                state = state_apply_pauli(state, _random_pauli(k, rng))
        elif model == "hidden_register":
            reg_b = registerb_update(reg_b, gate)
            state = noise_apply(state, reg_b)
        elif model == "hidden_register_tau":
            reg_b = registerb_update(reg_b, gate)
            state, reg_c = noise_apply_triggered(state, reg_b, reg_c)
        return state

    for _ in range(m - 1):
        g = random_clifford(k, rng)
        total = compose(g, total)
        state = step(state, g)
    return step(state, inverse(total))


def run_rb_sequence(m: int, config: RbConfig, rng: np.random.Generator) -> int:
    """Outcome bit of one RB sequence of length ``m``.

    Every model only ever applies Paulis on top of the gates, so the state is
    ``F U |0>`` for a Pauli frame ``F``; tracking ``F`` and the symplectic part
    of ``U`` suffices. Random draws match :func:`run_rb_trace` one for one.
    """
    if m < 2:
        raise ValueError("sequence length must be > 1")
    k, model = config.k, config.model
    frame = np.zeros(2 * k, np.int64)
    total = np.eye(2 * k, dtype=np.int64)
    lam = np.roll(np.eye(2 * k, dtype=np.int64), k, axis=1)
    reg = None
    if model.startswith("hidden_register"):
        p0 = default_destabilizer(StabilizerState.zero(k))
        reg = np.concatenate([p0.x, p0.z]).astype(np.int64)
        counter = RegisterC(config.tau) if model == "hidden_register_tau" else None
    for step in range(m):
        if step < m - 1:
            sym, _ = random_symplectic(k, rng)
            total = (total @ sym) & 1
        else:
            sym = (lam @ total.T @ lam) & 1
        frame = (frame @ sym) & 1
        if model == "depolarizing":
            if rng.random() < config.p:
                frame ^= rng.integers(2, size=2 * k, dtype=np.uint8)
        elif model == "hidden_register":
            reg = (reg @ sym) & 1
            frame ^= reg
        elif model == "hidden_register_tau":
            reg = (reg @ sym) & 1
            if counter.trigger:
                frame ^= reg
            counter = registerc_advance(counter)
    return int(not frame[:k].any())


def estimate_survival(config: RbConfig, workers: int = 1) -> SurvivalCurve:
    counts = count_outcomes(
        run_rb_sequence, config, config.m_values, config.n_sequences, config.seed, workers
    )
    meta = {"experiment": "rb", "seed": config.seed, **config.__dict__}
    return SurvivalCurve.from_counts(counts, config.n_sequences, meta)


# ---------------------------------------------------------------------------
# Pauli-basis superoperators for k <= 2


@lru_cache(maxsize=None)
def pauli_basis(k: int) -> tuple[PauliOperator, ...]:
    """Hermitian Paulis ordered by their interleaved encoding read as an integer."""
    out = []
    for idx in range(4**k):
        bits = [(idx >> (2 * k - 1 - j)) & 1 for j in range(2 * k)]
        x = np.array(bits[0::2], np.uint8)
        z = np.array(bits[1::2], np.uint8)
        out.append(PauliOperator(x, z, int(x @ z)))
    return tuple(out)


def pauli_index(p: PauliOperator) -> int:
    idx = 0
    for a, b in zip(p.x, p.z):
        idx = (idx << 2) | (int(a) << 1) | int(b)
    return idx


_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense matrix of ``p`` (qubit 0 is the most significant tensor factor)."""
    mat = np.eye(1, dtype=complex)
    for a, b in zip(p.x, p.z):
        mat = np.kron(mat, _SINGLE[(int(a), int(b))])
    # stored phase is relative to X^x Z^z, the matrices above are Hermitian
    return (1j ** ((p.phase - int(p.x @ p.z)) % 4)) * mat


def ptm_from_kraus(kraus, k: int) -> np.ndarray:
    """Real Pauli transfer matrix ``R[b, a] = 2^-k tr(D_b E(D_a))``."""
    basis = [pauli_matrix(p) for p in pauli_basis(k)]
    d = 2**k
    out = np.zeros((4**k, 4**k))
    for a, da in enumerate(basis):
        img = sum(kop @ da @ kop.conj().T for kop in kraus)
        for b, db in enumerate(basis):
            out[b, a] = np.real(np.trace(db @ img)) / d
    return out


def depolarizing_ptm(p: float, k: int) -> np.ndarray:
    diag = np.full(4**k, 1.0 - p)
    diag[0] = 1.0
    return np.diag(diag)


def clifford_superop(g: CliffordTableau) -> np.ndarray:
    """Signed permutation ``S[b, a]`` with ``G D_a G^-1 = S[b, a] D_b``."""
    basis = pauli_basis(g.k)
    out = np.zeros((len(basis), len(basis)))
    for a, p in enumerate(basis):
        img = g.conjugate(p)
        sign = 1.0 if (img.phase - int(img.x @ img.z)) % 4 == 0 else -1.0
        out[pauli_index(img), a] = sign
    return out


@lru_cache(maxsize=None)
def _group_superops(k: int) -> tuple[np.ndarray, ...]:
    return tuple(clifford_superop(g) for g in enumerate_cliffords(k))


@dataclass(frozen=True)
class TwirlOracle:
    T: np.ndarray
    k: int

    def commutation_residual(self) -> float:
        """Largest entry of ``T S - S T`` over every group superoperator ``S``."""
        return max(float(np.max(np.abs(self.T @ s - s @ self.T))) for s in _group_superops(self.k))


def twirl_exact(channel: np.ndarray, k: int) -> TwirlOracle:
    if k > 2:
        raise ValueError("exact twirl enumerates the Clifford group; only k <= 2 is supported")
    channel = np.asarray(channel, dtype=float)
    if channel.shape != (4**k, 4**k):
        raise ValueError(f"channel must be a {4**k}x{4**k} Pauli transfer matrix")
    ops = _group_superops(k)
    total = sum(s @ channel @ s.T for s in ops)
    return TwirlOracle(total / len(ops), k)


def zero_state_vector(k: int) -> np.ndarray:
    """``|0...0><0...0|`` in the normalized Pauli basis."""
    vec = np.zeros(4**k)
    for a, p in enumerate(pauli_basis(k)):
        if not p.x.any():
            vec[a] = 2.0 ** (-k / 2)
    return vec


def exact_survival(m: int, channel: np.ndarray, k: int) -> float:
    """``tr(Q E T^m Q)`` with ``T`` the twirl of ``channel``.

    An RB sequence of length ``m`` applies the noise ``m`` times, which is
    ``exact_survival(m - 1, ...)``.
    """
    if m < 0:
        raise ValueError("exponent must be non-negative")
    t = twirl_exact(channel, k).T
    q = zero_state_vector(k)
    return float(q @ np.asarray(channel) @ np.linalg.matrix_power(t, m) @ q)


def sequence_survival(m: int, channel: np.ndarray, k: int) -> float:
    """Exact survival of a length-``m`` RB sequence (``m`` noisy gates)."""
    return exact_survival(m - 1, channel, k)


# ---------------------------------------------------------------------------
# Decay fitting


@dataclass
class DecayFit:
    components: list[tuple[float, float]]
    residual: float
    r: int
    degenerate: bool = False

    def predict(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        return sum(a * lam**m for a, lam in self.components)


def _amplitudes(lams, m, p) -> tuple[np.ndarray, np.ndarray]:
    phi = np.power(np.asarray(lams, dtype=float)[None, :], m[:, None])
    amps, *_ = np.linalg.lstsq(phi, p, rcond=None)
    return amps, phi @ amps - p


def fit_exponential(curve, r_components: int = 1) -> DecayFit:
    """Least-squares fit of ``sum_i a_i lam_i^m`` with every ``lam_i`` in (0, 1].

    ``curve`` is a :class:`SurvivalCurve` or a pair ``(m, p)``.
    """
    if isinstance(curve, SurvivalCurve):
        m, p = curve.m.astype(float), curve.p_hat.astype(float)
    else:
        m, p = (np.asarray(v, dtype=float) for v in curve)
    r = int(r_components)
    if r < 1:
        raise ValueError("need at least one component")
    if m.size < 2 * r:
        raise ValueError(f"need at least {2 * r} points for {r} components, got {m.size}")

    if np.ptp(p) <= 1e-12 * max(1.0, abs(p).max()):
        return DecayFit([(float(p.mean()), 1.0)], 0.0, 1, degenerate=True)

    lo = 1e-9

    def resid(lams):
        return _amplitudes(lams, m, p)[1]

    starts = []
    if r == 1 and np.all(p > 0):
        slope, _ = np.polyfit(m, np.log(p), 1)
        starts.append([float(np.clip(math.exp(slope), lo, 1.0))])
    grid = np.linspace(0.05, 1.0, 12 if r <= 2 else 6)
    starts += [list(c) for c in itertools.combinations(grid, r)]

    best = None
    for x0 in starts:
        sol = optimize.least_squares(
            resid, x0, bounds=(lo, 1.0), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000
        )
        lams = np.sort(sol.x)
        amps, res = _amplitudes(lams, m, p)
        rms = float(np.sqrt(np.mean(res**2)))
        spread = float(np.ptp(lams))
        key = (round(rms, 12), spread)
        if best is None or key < best[0]:
            best = (key, lams, amps, rms)
    _, lams, amps, rms = best
    comps = [(float(a), float(lam)) for a, lam in zip(amps, lams)]
    phi = np.power(lams[None, :], m[:, None])
    degenerate = np.linalg.matrix_rank(phi) < r
    return DecayFit(comps, rms, r, degenerate=bool(degenerate))


# ---------------------------------------------------------------------------
# Multiplicity witness


@dataclass
class RepresentationReport:
    name: str
    dimension: int
    commutant_dim: int
    multiplicity_free: bool
    scalar_residual: float
    scalar_action: bool
    eigenvalues: np.ndarray


@dataclass
class WitnessReport:
    standard: RepresentationReport
    hidden: RepresentationReport
    hidden_survival: dict = field(default_factory=dict)


def _commutant(gens: list[np.ndarray]) -> np.ndarray:
    d = gens[0].shape[0]
    eye = np.eye(d)
    # vec(S X - X S) = (I ⊗ S - S^T ⊗ I) vec(X) in column-major order
    rows = [np.kron(eye, s) - np.kron(s.T, eye) for s in gens]
    basis = linalg.null_space(np.vstack(rows))
    return np.array([basis[:, j].reshape(d, d, order="F") for j in range(basis.shape[1])])


def _report(name: str, gens, twirl: np.ndarray, tol: float = 1e-10) -> RepresentationReport:
    comm = _commutant(gens)
    noncomm = max(
        (float(np.max(np.abs(a @ b - b @ a))) for a in comm for b in comm), default=0.0
    )
    # T acts by scalars on every irreducible block iff it is central in the commutant
    resid = max(float(np.max(np.abs(twirl @ c - c @ twirl))) for c in comm)
    eig = np.sort_complex(np.round(np.linalg.eigvals(twirl), 12))
    return RepresentationReport(
        name, twirl.shape[0], len(comm), noncomm < tol, resid, resid < tol, eig
    )


def _hidden_superops(g: CliffordTableau) -> np.ndarray:
    """``U_G ⊗ V_G`` on (register A Pauli basis) ⊗ (register B basis states)."""
    u = clifford_superop(g)
    v = np.zeros((4, 4))
    for b, p in enumerate(pauli_basis(1)):
        v[pauli_index(g.conjugate(p)), b] = 1.0
    return np.kron(u, v)


def _hidden_noise() -> np.ndarray:
    """Apply the register-B Pauli to register A, controlled on register B."""
    basis = pauli_basis(1)
    out = np.zeros((16, 16))
    for b, pb in enumerate(basis):
        proj = np.zeros((4, 4))
        proj[b, b] = 1.0
        signs = np.diag([1.0 if (pa.x @ pb.z + pa.z @ pb.x) % 2 == 0 else -1.0 for pa in basis])
        out += np.kron(signs, proj)
    return out


def multiplicity_witness(k: int = 1, p: float = 0.1, max_m: int = 12) -> WitnessReport:
    """Compare the twirl's action in the standard and hidden-register representations."""
    if k != 1:
        raise ValueError("the witness is computed for k = 1")
    group = enumerate_cliffords(1)
    gens = [clifford_superop(CliffordTableau.identity(1).apply_gate(g, 0)) for g in ("H", "S")]
    standard = _report("standard", gens, twirl_exact(depolarizing_ptm(p, 1), 1).T)

    ops = [_hidden_superops(g) for g in group]
    noise = _hidden_noise()
    twirl = sum(s @ noise @ s.T for s in ops) / len(ops)
    hgens = [_hidden_superops(CliffordTableau.identity(1).apply_gate(g, 0)) for g in ("H", "S")]
    hidden = _report("hidden_register", hgens, twirl)

    p0 = default_destabilizer(StabilizerState.zero(1))
    start = np.kron(zero_state_vector(1), np.eye(4)[pauli_index(p0)])
    readout = np.kron(zero_state_vector(1), np.ones(4))
    survival = {
        m: float(readout @ noise @ np.linalg.matrix_power(twirl, m - 1) @ start)
        for m in range(2, max_m + 1)
    }
    return WitnessReport(standard, hidden, survival)
