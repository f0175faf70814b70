import pytest
from hypothesis import given, strategies as st

from factorsat.numeric import derive_seed, from_bits, is_prime, sample_prime, sample_prime_pair, to_bits

from conftest import small_primes


def trial_division(n):
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def test_is_prime_matches_trial_division_below_20000():
    assert [n for n in range(20000) if is_prime(n)] == [n for n in range(20000) if trial_division(n)]


@pytest.mark.parametrize("n", [561, 1105, 1729, 41041, 2047, 1373653, 25326001, 3215031751,
                               3825123056546413051, 318665857834031151167461])
def test_pseudoprimes_are_rejected(n):
    assert not is_prime(n)


@pytest.mark.parametrize("n", [2 ** 31 - 1, 2 ** 61 - 1, 2 ** 89 - 1, 2 ** 127 - 1])
def test_mersenne_primes(n):
    assert is_prime(n)


def test_large_composite_from_two_primes():
    assert not is_prime((2 ** 61 - 1) * (2 ** 89 - 1))


@given(st.integers(min_value=1, max_value=2 ** 200))
def test_bits_roundtrip(n):
    bits = to_bits(n)
    assert bits[-1] == 1
    assert from_bits(bits) == n
    assert len(bits) == n.bit_length()


def test_to_bits_is_lsb_first():
    assert to_bits(143) == [1, 1, 1, 1, 0, 0, 0, 1]


def test_to_bits_rejects_zero():
    with pytest.raises(ValueError):
        to_bits(0)


@pytest.mark.parametrize("bits", [2, 3, 4, 5, 8, 16, 40])
def test_sample_prime_has_exact_bit_length(bits):
    for seed in range(5):
        p = sample_prime(bits, seed)
        assert p.bit_length() == bits and is_prime(p)


def test_four_bit_primes_are_11_and_13():
    assert small_primes(4) == [11, 13]
    assert {sample_prime(4, s) for s in range(40)} == {11, 13}


def test_sampling_is_deterministic():
    assert sample_prime_pair(12, 12, 99) == sample_prime_pair(12, 12, 99)
    assert derive_seed(1, "p") == derive_seed(1, "p") != derive_seed(1, "q")


def test_pair_is_distinct_unless_allowed():
    for seed in range(30):
        p, q = sample_prime_pair(3, 3, seed)
        assert p != q and {p, q} <= {5, 7}
    assert any(p == q for p, q in (sample_prime_pair(3, 3, s, allow_equal=True) for s in range(30)))
