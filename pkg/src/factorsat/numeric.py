"""Integers, bit strings and prime sampling."""

from __future__ import annotations

import hashlib
import random

# Deterministic Miller-Rabin witnesses: correct for every n < 3.3e24 (> 2**64).
_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Extra pseudo-random rounds above 2**64; each round errs with prob <= 1/4.
_EXTRA_ROUNDS = 32
_SMALL_PRIMES = tuple(p for p in range(3, 1000, 2) if all(p % f for f in range(3, int(p**0.5) + 1, 2)))

MAX_SAMPLE_TRIES = 1_000_000


def to_bits(n: int) -> list[int]:
    """LSB-first binary expansion of ``n`` without leading-zero padding.

    >>> to_bits(11)
    [1, 1, 0, 1]
    """
    if n < 0:
        raise ValueError("negative integers have no bit string")
    if n == 0:
        raise ValueError("zero has no bit-length")
    return [(n >> i) & 1 for i in range(n.bit_length())]


def from_bits(bits) -> int:
    value = 0
    for i, b in enumerate(bits):
        if b not in (0, 1, True, False):
            raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
        value |= int(b) << i
    return value


def _miller_rabin_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Exact for n < 2**64 (the first twelve prime bases are a proven witness
    set up to 3.3e24). Above that, 32 additional rounds with bases drawn from
    a PRNG seeded by ``n`` bound the error by 4**-32 = 2**-64, and the answer
    is still deterministic for a given ``n``.
    """
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _BASES:
        if not _miller_rabin_round(n, d, s, a % n):
            return False
    if n >= 1 << 64:
        rng = random.Random(n)
        for _ in range(_EXTRA_ROUNDS):
            if not _miller_rabin_round(n, d, s, rng.randrange(2, n - 1)):
                return False
    return True


def sample_prime(bits: int, rng_seed: int) -> int:
    """Uniform random prime with exactly ``bits`` bits, reproducible per seed.

    Candidates are odd with the top bit forced, then rejected until prime.
    """
    if bits < 2:
        raise ValueError("bits must be >= 2")
    rng = random.Random(rng_seed)
    if bits == 2:
        return rng.choice((2, 3))
    top = 1 << (bits - 1)
    for _ in range(MAX_SAMPLE_TRIES):
        candidate = top | rng.getrandbits(bits - 1) | 1
        if is_prime(candidate):
            return candidate
    raise RuntimeError(f"no {bits}-bit prime found after {MAX_SAMPLE_TRIES} draws")


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary printable parts."""
    text = "/".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "little")


def sample_prime_pair(n_p: int, n_q: int, seed: int, allow_equal: bool = False) -> tuple[int, int]:
    """Sample (p, q) with the requested bit-lengths from one instance seed.

    p and q use independent streams derived from ``seed``. Unless
    ``allow_equal`` is set, p == q is rejected by redrawing q.
    """
    p = sample_prime(n_p, derive_seed(seed, "p"))
    for attempt in range(MAX_SAMPLE_TRIES):
        q = sample_prime(n_q, derive_seed(seed, "q", attempt) if attempt else derive_seed(seed, "q"))
        if allow_equal or q != p:
            return p, q
    raise RuntimeError("could not draw q distinct from p")
