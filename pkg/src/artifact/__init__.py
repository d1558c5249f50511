"""Randomized benchmarking with hidden classical memories.

Stabilizer tableaux and random Cliffords (``pauli_clifford``), hidden
registers that make RB survival oscillate (``hidden_memory``, ``rb_engine``),
stabilizer codes and lookup decoders (``qec_codes``), logical RB driven by a
surjective decoder (``lrb_engine``) and the repetition code that protects its
memory against syndrome reset (``repetition_shield``).
"""

from .hidden_memory import RegisterB, RegisterC
from .lrb_engine import LrbConfig, estimate_lrb_survival, lrb_config, run_lrb_sequence
from .pauli_clifford import (
    CliffordTableau,
    PauliOperator,
    StabilizerState,
    compose,
    inverse,
    random_clifford,
)
from .qec_codes import StabilizerCode, min_weight_decoder, product_steane, steane_code
from .rb_engine import RbConfig, estimate_survival, fit_exponential, multiplicity_witness
from .repetition_shield import amplitude_lower_bound, copies_needed, copies_sufficient
from .sampling import SurvivalCurve

__version__ = "0.1.0"

__all__ = [
    "CliffordTableau",
    "LrbConfig",
    "PauliOperator",
    "RbConfig",
    "RegisterB",
    "RegisterC",
    "StabilizerCode",
    "StabilizerState",
    "SurvivalCurve",
    "amplitude_lower_bound",
    "compose",
    "copies_needed",
    "copies_sufficient",
    "estimate_lrb_survival",
    "estimate_survival",
    "fit_exponential",
    "inverse",
    "lrb_config",
    "min_weight_decoder",
    "multiplicity_witness",
    "product_steane",
    "random_clifford",
    "run_lrb_sequence",
    "steane_code",
]
