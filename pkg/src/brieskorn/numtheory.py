"""Exact integer and rational primitives.

Everything here is a pure function of its arguments.  Rationals are plain
:class:`fractions.Fraction` values, which are always kept in lowest terms
with a positive denominator.
"""

from __future__ import annotations

import enum
import math
import random
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

ExactRational = Fraction
Factorization = list[tuple[int, int]]

TRIAL_DIVISION_CUTOFF = 10**6


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i in range(limit + 1) if sieve[i]]


# Trial division only needs primes up to sqrt of the cutoff region we scan.
_PRIMES = _small_primes(10**4)

# Deterministic for n < 3.3e24 (covers every 64-bit input).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lcm, values, 1)


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set.

    Exact for ``n < 3.3 * 10**24``; above that it is a strong probable-prime
    test with the same 13 bases.
    """
    if n < 2:
        return False
    for p in _PRIMES[:50]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Return a non-trivial factor of the odd composite ``n``."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    f = _pollard_brent(n, rng)
    _split(f, out, rng)
    _split(n // f, out, rng)


def factorize(n: int) -> Factorization:
    """Prime factorization of ``n >= 1`` as ``[(p, e), ...]`` sorted by p."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    found: dict[int, int] = {}
    for p in _PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
    # Continue trial division with odd candidates up to the cutoff.
    p = _PRIMES[-1] + 2
    while n > 1 and p <= TRIAL_DIVISION_CUTOFF and p * p <= n:
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
        p += 2
    if n > 1:
        if p * p > n:
            found[n] = found.get(n, 0) + 1
        else:
            _split(n, found, random.Random(n))
    return sorted(found.items())


def gcd_with_lcm_of_others(a: Sequence[int], j: int) -> int:
    """``gcd(a[j], lcm(a[i] for i != j))`` without building the lcm.

    Uses ``gcd(x, lcm(y, z)) == lcm(gcd(x, y), gcd(x, z))``: per prime this is
    ``min(v_p(x), max(v_p(y), v_p(z)))``, and every intermediate value stays
    bounded by ``a[j]``.
    """
    if not -len(a) <= j < len(a):
        raise IndexError(f"index {j} out of range for sequence of length {len(a)}")
    j %= len(a)
    target = a[j]
    b = 1
    for i, x in enumerate(a):
        if i != j:
            b = lcm(b, math.gcd(target, x))
            if b == target:
                break
    return b


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    # B_0..B_n with B_1 = -1/2, from sum_{k<=n} C(n+1, k) B_k = 0.
    table = [Fraction(1)]
    for k in range(1, n + 1):
        acc = sum((math.comb(k + 1, i) * table[i] for i in range(k)), Fraction(0))
        table.append(-acc / (k + 1))
    return tuple(table)


def bernoulli_classical(n: int) -> Fraction:
    """Classical Bernoulli number B_n (B_1 = -1/2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _bernoulli_table(n)[n]


def bernoulli(m: int) -> Fraction:
    """Topologists' Bernoulli number: ``|B_{2m}|`` in classical indexing."""
    if m < 1:
        raise ValueError(f"bernoulli expects m >= 1, got {m}")
    return abs(bernoulli_classical(2 * m))


def bp_order(n: int) -> int:
    """Order of the cyclic group bP_n for n = 4m, m >= 2."""
    if n % 4 or n < 8:
        raise ValueError(f"bp_order needs n = 4m with m >= 2, got {n}")
    m = n // 4
    ratio = 4 * bernoulli(m) / m
    return 2 ** (2 * m - 2) * (2 ** (2 * m - 1) - 1) * ratio.numerator


class BPEven(enum.Enum):
    ZERO = "zero"
    Z2 = "Z2"
    UNKNOWN = "unknown"


_KNOWN_VANISHING = frozenset({1, 3, 7, 15})


def bp_even_status(n: int) -> BPEven:
    """What is known about bP_n for n = 4m + 2, m >= 1."""
    if n % 4 != 2 or n < 6:
        raise ValueError(f"bp_even_status needs n = 4m + 2 with m >= 1, got {n}")
    m = (n - 2) // 4
    if m in _KNOWN_VANISHING:
        return BPEven.ZERO
    # m = 2**i - 1 (i >= 3) beyond the settled cases is left open.
    if (m + 1) & m == 0:
        return BPEven.UNKNOWN
    return BPEven.Z2
