import pytest
from hypothesis import given, settings, strategies as st

from factorsat.circuit import (
    AndGate, InputP, InputQ, PartialProduct, build_circuit, column_profile, planted_assignment, pp_count,
)
from factorsat.numeric import to_bits

# worked 4-bit example: column populations and per-column contractions
GOLDEN_PROFILE = [1, 2, 4, 7, 9, 10, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1]
GOLDEN_CONTRACTIONS = [0, 1, 3, 6, 8, 9, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0]
GOLDEN_N_BITS = [1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]


def padded_bits(n, width):
    bits = to_bits(n)
    return bits + [0] * (width - len(bits))


def test_golden_sizes():
    cs = build_circuit(4, 4, to_bits(143))
    assert (cs.num_vars, len(cs.ands), len(cs.xors), len(cs.pins)) == (168, 88, 72, 16)
    assert cs.profile == GOLDEN_PROFILE
    assert cs.contractions == GOLDEN_CONTRACTIONS
    assert [int(pin.value) for pin in cs.pins] == GOLDEN_N_BITS


def test_variable_numbering():
    cs = build_circuit(3, 2, to_bits(5 * 3))
    assert cs.var_kinds[:5] == [InputP(0), InputP(1), InputP(2), InputQ(0), InputQ(1)]
    assert cs.var_kinds[5] == PartialProduct(0, 0)
    assert cs.ands[0] == AndGate(5, 0, 3)
    assert list(cs.p_vars) == [0, 1, 2] and list(cs.q_vars) == [3, 4]


def test_pp_count_matches_enumeration():
    for n_p in range(1, 7):
        for n_q in range(1, 7):
            for k in range(n_p + n_q - 1):
                brute = sum(1 for i in range(n_p) for j in range(n_q) if i + j == k)
                assert pp_count(k, n_p, n_q) == brute


def test_pp_count_out_of_range():
    with pytest.raises(ValueError):
        pp_count(7, 4, 4)


def test_profile_ends_at_single_entry():
    for d in range(2, 12):
        prof = column_profile(d, d)
        assert len(prof) == d * d and prof[-1] == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_forward_evaluation_reproduces_product(n_p, n_q, data):
    # any operands of the right widths, not just primes
    p = data.draw(st.integers(1 << (n_p - 1), (1 << n_p) - 1))
    q = data.draw(st.integers(1 << (n_q - 1), (1 << n_q) - 1))
    cs = build_circuit(n_p, n_q, padded_bits(p * q, n_p + n_q))
    values = planted_assignment(cs, to_bits(p), to_bits(q))
    for g in cs.ands:
        assert values[g.out] == (values[g.in1] and values[g.in2])
    for g in cs.xors:
        assert values[g.out] == (values[g.in1] != values[g.in2])
    # the surviving entry of column k carries bit k of the product
    assert [int(values[pin.var]) for pin in cs.pins] == padded_bits(p * q, len(cs.pins))


def test_wrong_factors_contradict_pins():
    cs = build_circuit(4, 4, to_bits(143))
    with pytest.raises(AssertionError):
        planted_assignment(cs, to_bits(11), to_bits(15))


def test_n_length_is_checked():
    with pytest.raises(ValueError):
        build_circuit(4, 4, [1, 1, 1])


def test_every_var_defined_once():
    cs = build_circuit(5, 4, to_bits(31 * 13))
    outs = [g.out for g in cs.ands + cs.xors]
    assert len(outs) == len(set(outs)) == cs.num_vars - 9
    assert all(g.in1 < g.out and g.in2 < g.out for g in cs.ands + cs.xors)


def test_dump_format():
    cs = build_circuit(2, 2, to_bits(6))
    lines = cs.dump().splitlines()
    assert lines[0] == "AND 4 0 2"
    assert sum(line.startswith("PIN") for line in lines) == len(cs.pins)
