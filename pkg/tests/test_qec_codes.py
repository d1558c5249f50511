import itertools

import numpy as np
import pytest

from artifact import gf2
from artifact.pauli_clifford import (
    PauliOperator,
    StabilizerState,
    clifford_from_generators,
    inverse,
    pauli_commutes,
    pauli_expectation,
    pauli_multiply,
    state_apply_clifford,
    state_apply_pauli,
)
from artifact.qec_codes import (
    HAMMING_7_4,
    CodeError,
    build_pi,
    check_surjective,
    code_distance,
    css_from_parity_checks,
    load_parity_check_file,
    logical_component,
    measure_syndrome,
    min_weight_decoder,
    physical_syndrome,
    product_steane,
    reset_syndrome,
    steane_code,
    trivial_decoder,
)

from conftest import random_circuit

P = PauliOperator.from_label


@pytest.fixture(scope="module")
def steane():
    return steane_code()


@pytest.fixture(scope="module")
def decoder(steane):
    return min_weight_decoder(steane)


def single(letter, q, n=7):
    return P("".join(letter if i == q else "I" for i in range(n)))


def test_steane_structure(steane):
    gens = steane.generators()
    assert len(gens) == 6
    assert all(pauli_commutes(a, b) for a, b in itertools.combinations(gens, 2))
    assert not pauli_commutes(steane.logical("X", 0), steane.logical("Z", 0))
    assert steane.logical("X", 0) == P("XXXXXXX")
    assert steane.is_transversal()
    steane.validate()


def test_steane_distance_by_brute_force(steane):
    assert code_distance(steane, max_weight=2) is None
    assert code_distance(steane) == 3


def test_css_loader_matches_steane(steane):
    code = css_from_parity_checks(HAMMING_7_4, HAMMING_7_4)
    assert (code.n, code.k) == (7, 1)
    both = np.vstack([code.stabilizers, steane.stabilizers])
    assert gf2.rank(both) == gf2.rank(code.stabilizers) == 6
    assert code.k == 7 - gf2.rank(HAMMING_7_4) - gf2.rank(HAMMING_7_4)


def test_css_rejects_non_orthogonal_checks():
    with pytest.raises(CodeError):
        css_from_parity_checks([[1, 0]], [[1, 1]])


def test_css_reports_rank_deficiency():
    hx = np.vstack([HAMMING_7_4, HAMMING_7_4[0] ^ HAMMING_7_4[1]])
    code = css_from_parity_checks(hx, HAMMING_7_4)
    assert code.k == 1
    assert any("rank deficiency" in note for note in code.notes)


def test_parity_check_file(tmp_path, steane):
    rows = "\n".join("".join(map(str, r)) for r in HAMMING_7_4)
    f = tmp_path / "steane.txt"
    f.write_text(f"7 1\n{rows}\n\n{rows}\n")
    code = load_parity_check_file(f)
    assert gf2.rank(np.vstack([code.stabilizers, steane.stabilizers])) == 6
    bad = tmp_path / "bad.txt"
    bad.write_text(f"7 2\n{rows}\n\n{rows}\n")
    with pytest.raises(CodeError):
        load_parity_check_file(bad)
    with pytest.raises(CodeError):
        (tmp_path / "gap.txt").write_text(f"7 1\n{rows}\n{rows}\n")
        load_parity_check_file(tmp_path / "gap.txt")


def test_syndrome_of_x_on_qubit_zero_is_hz_column(steane):
    s = steane.syndrome(single("X", 0))
    assert s[:3].tolist() == [0, 0, 0]
    assert s[3:].tolist() == HAMMING_7_4[:, 0].tolist()


def test_syndrome_unchanged_by_logicals(steane):
    e = single("Y", 4)
    for lg in (steane.logical("X", 0), steane.logical("Z", 0)):
        assert np.array_equal(steane.syndrome(pauli_multiply(lg, e)), steane.syndrome(e))


def test_unique_weight_one_syndromes(steane):
    syn = {tuple(steane.syndrome(single(a, q))) for a in "XYZ" for q in range(7)}
    assert len(syn) == 21
    assert (0,) * 6 not in syn


def test_logical_component_examples(steane):
    for g in steane.generators():
        assert logical_component(g, steane).is_identity()
    assert logical_component(steane.logical("X", 0), steane) == P("X")
    assert logical_component(single("X", 0), steane) == P("X")
    assert logical_component(single("Z", 3), steane) == P("Z")


def test_decoder_examples(steane, decoder):
    decode = decoder.decode
    assert decode(steane.syndrome(single("X", 0))) == P("X")
    assert decode(steane.syndrome(single("Z", 0))) == P("Z")
    assert decode(steane.syndrome(single("Y", 0))).equal_mod_phase(P("Y"))
    assert decode(np.zeros(6, np.uint8)).is_identity()
    assert decoder.groups[0][0].report["unfilled"] == []


def test_decoder_consistency_on_weight_one_errors(steane, decoder):
    for a in "XYZ":
        for q in range(7):
            e = single(a, q)
            assert decoder.decode(steane.syndrome(e)).equal_mod_phase(logical_component(e, steane))


def test_surjectivity(decoder):
    ok, pre = check_surjective(decoder, 1)
    assert ok
    for p in (P("I"), P("X"), P("Z"), P("Y")):
        assert decoder.decode(pre.syndrome(p)).equal_mod_phase(p)
    assert pre.syndrome(P("X")).tolist() == [0, 0, 0, 0, 0, 1]


def test_trivial_decoder_is_not_surjective():
    ok, _ = check_surjective(trivial_decoder(6, 1))
    assert not ok
    with pytest.raises(CodeError):
        build_pi(trivial_decoder(6, 1), check_surjective(trivial_decoder(6, 1))[1])


def test_pi_steane_examples(steane, decoder):
    _, pre = check_surjective(decoder)
    pi = build_pi(decoder, pre, 1)
    assert pi.forward([1, 0]).tolist() == steane.syndrome(single("X", 0)).tolist()
    assert pi.window.tolist() == [2, 5]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pi_round_trip_and_injective(k):
    code = product_steane(k)
    dec = min_weight_decoder(code)
    ok, pre = check_surjective(dec, k)
    assert ok
    pi = build_pi(dec, pre, k)
    images = set()
    for bits in itertools.product([0, 1], repeat=2 * k):
        syn = pi.forward(bits)
        images.add(syn.tobytes())
        x, z = dec.decode_bits(syn)
        assert np.concatenate([x, z]).tolist() == list(bits[0::2]) + list(bits[1::2])
        assert pi.inverse(syn).tolist() == list(bits)
    assert len(images) == 4**k


def test_product_code_decodes_blockwise():
    code = product_steane(2, padding=3)
    assert (code.n, code.k, code.n_syndrome) == (17, 2, 15)
    dec = min_weight_decoder(code)
    e = P("I" * 7 + "IIZIIII" + "III")
    assert dec.decode(code.syndrome(e)) == P("IZ")


@pytest.mark.parametrize("k", [1, 2])
def test_encoder_frame_contract(k, rng):
    code = product_steane(k) if k > 1 else steane_code()
    enc, n = code.encoder, code.n
    assert enc.is_symplectic()
    for i in range(k):
        assert enc.conjugate(P("I" * i + "Z" + "I" * (n - i - 1))).equal_mod_phase(code.logical("Z", i))
    for j, g in enumerate(code.generators()):
        z = P("I" * (k + j) + "Z" + "I" * (n - k - j - 1))
        assert enc.conjugate(z) == g
    for _ in range(200 // k):
        seq = random_circuit(k, 10, rng)
        local = clifford_from_generators(seq, n)
        logical = state_apply_clifford(StabilizerState.zero(n), local)
        physical = state_apply_clifford(logical, enc)
        assert not physical_syndrome(physical, code).any()
        for i in range(k):
            zi = P("I" * i + "Z" + "I" * (n - i - 1))
            assert pauli_expectation(physical, code.logical("Z", i)) == pauli_expectation(logical, zi)
        assert state_apply_clifford(physical, inverse(enc)) == logical


def test_physical_syndrome_after_error(steane):
    zero = state_apply_clifford(StabilizerState.zero(7), steane.encoder)
    assert not physical_syndrome(zero, steane).any()
    hit = state_apply_pauli(zero, single("X", 0))
    assert physical_syndrome(hit, steane).tolist() == steane.syndrome(single("X", 0)).tolist()


def test_measure_syndrome_copies_bits():
    class S:
        syndrome_bits = np.array([1, 0, 1], np.uint8)

    out = measure_syndrome(S)
    out[0] = 0
    assert S.syndrome_bits[0] == 1


def test_reset_syndrome_examples():
    rng = np.random.default_rng(3)
    bits = np.ones(50, np.uint8)
    assert not reset_syndrome(bits, 1.0, rng).any()
    assert np.array_equal(reset_syndrome(bits, 0.0, rng), bits)
    out = reset_syndrome(np.ones(100_000, np.uint8), 0.5, rng)
    zeroed = 1 - out.mean()
    assert abs(zeroed - 0.5) <= 3 * np.sqrt(0.25 / 100_000)
    assert not reset_syndrome(np.zeros(10, np.uint8), 0.3, rng).any()
    with pytest.raises(ValueError):
        reset_syndrome(bits, 1.2, rng)
