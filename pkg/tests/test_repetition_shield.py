import math

import numpy as np
import pytest

from artifact.hidden_memory import registerb_init, registerb_update
from artifact.lrb_engine import lrb_config
from artifact.pauli_clifford import CliffordTableau, PauliOperator, random_clifford
from artifact.repetition_shield import (
    ShieldMatrix,
    amplitude_lower_bound,
    copies_needed,
    copies_sufficient,
    shield_round,
    simulate_shield_survival,
    spread_or,
)


def test_spread_or_examples():
    assert spread_or(ShieldMatrix([[1, 0], [0, 0]])) == ShieldMatrix([[1, 0], [1, 0]])
    assert spread_or(ShieldMatrix(np.zeros((3, 2)))) == ShieldMatrix(np.zeros((3, 2)))
    assert spread_or(ShieldMatrix([[1, 0], [0, 1]])) == ShieldMatrix([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        ShieldMatrix([[1, 0, 1]])


def test_spread_or_idempotent_and_monotone(rng):
    for _ in range(50):
        m = ShieldMatrix(rng.integers(2, size=(5, 6)))
        once = spread_or(m)
        assert spread_or(once) == once
        assert ((once.rows | m.rows) == once.rows).all()
        assert (once.rows == once.rows[0]).all()


def test_round_without_reset_is_replicated_update(rng):
    b = registerb_init(PauliOperator.from_label("XZ"))
    m = ShieldMatrix.replicate(b.bits, 4)
    for _ in range(10):
        g = random_clifford(2, rng)
        m = shield_round(m, g, None, 0.0, rng)
        b = registerb_update(b, g)
        assert m == ShieldMatrix.replicate(b.bits, 4)


def test_round_without_reset_commutes_with_spread(rng):
    for _ in range(30):
        m = ShieldMatrix(rng.integers(2, size=(3, 4)))
        g = random_clifford(2, rng)
        a = shield_round(spread_or(m), g, None, 0.0, rng)
        b = spread_or(shield_round(m, g, None, 0.0, rng))
        assert a == b


def test_round_through_relabeling(rng):
    pi = lrb_config(2).pi
    m = ShieldMatrix.replicate([1, 0, 0, 0], 3)
    g = random_clifford(2, rng)
    assert shield_round(m, g, pi, 0.0, rng) == shield_round(m, g, None, 0.0, rng)


def test_full_reset_clears_every_row(rng):
    m = ShieldMatrix.replicate([1, 1, 0, 1], 5)
    assert not shield_round(m, CliffordTableau.identity(2), None, 1.0, rng).rows.any()
    with pytest.raises(ValueError):
        shield_round(m, CliffordTableau.identity(1), None, 0.0, rng)


def test_per_bit_survival_matches_binomial():
    rng = np.random.default_rng(17)
    c, r, n = 3, 0.6, 100_000
    m = ShieldMatrix.replicate([1, 0], c)
    g = CliffordTableau.identity(1)
    alive = 0
    for _ in range(n // 1000):
        for _ in range(1000):
            alive += int(shield_round(m, g, None, r, rng).consensus()[0])
    p = 1 - r**c
    assert abs(alive / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_copies_needed_examples():
    assert copies_needed(20, 5, 0.99, 0.95) == 142
    assert copies_needed(1, 1, 0.5, 0.5) == 2
    with pytest.raises(ValueError):
        copies_needed(1, 1, 0.3, 0.5)
    with pytest.raises(ValueError):
        copies_needed(1, 1, 0.5, 1.0)


def test_amplitude_bound_examples():
    assert amplitude_lower_bound(3, 4, 5, 0.0) == 1.0
    assert amplitude_lower_bound(2, 1, 1, 0.5) == pytest.approx(0.75**2)
    with pytest.raises(ValueError):
        amplitude_lower_bound(0, 1, 1, 0.5)


def test_closed_form_copy_count_can_fall_short():
    # the closed form at the figure parameters does not reach the target;
    # the exact count does
    assert amplitude_lower_bound(142, 20, 5, 0.95) < 0.99
    c = copies_sufficient(20, 5, 0.99, 0.95)
    assert c == 193
    assert amplitude_lower_bound(c, 20, 5, 0.95) >= 0.99
    assert amplitude_lower_bound(c - 1, 20, 5, 0.95) < 0.99


def test_sufficient_copies_reach_target_over_grid():
    for k in (1, 3, 20):
        for m in (1, 5, 30):
            for a in (0.5, 0.9, 0.99):
                for r in (0.1, 0.5, 0.95):
                    c = copies_sufficient(k, m, a, r)
                    assert amplitude_lower_bound(c, k, m, r) >= a
                    assert c == 1 or amplitude_lower_bound(c - 1, k, m, r) < a


def test_simulation_respects_lower_bound():
    rng = np.random.default_rng(23)
    n = 4000
    for _ in range(20):
        k = int(rng.integers(1, 6))
        m = int(rng.integers(1, 8))
        c = int(rng.integers(1, 6))
        r = float(rng.uniform(0.1, 0.9))
        est = simulate_shield_survival(k, m, c, r, n, rng)
        bound = amplitude_lower_bound(c, k, m, r)
        assert est >= bound - 3 * math.sqrt(max(bound * (1 - bound), 1e-12) / n)


def test_simulation_edge_cases(rng):
    assert simulate_shield_survival(3, 4, 2, 0.0, 100, rng) == 1.0
    # one copy: each 1-bit survives a round with probability 1 - r
    est = simulate_shield_survival(1, 1, 1, 0.5, 40_000, rng, bits=[1, 0])
    assert abs(est - 0.5) < 0.01
