"""Prime sieves, integer factorization, and multiplicative-function tables.

Everything here is exact integer work; the only floats are log-weight tables.
Hot loops have numba twins selected via _jit (TORSION_PROBE_JIT).
"""

import math
from fractions import Fraction

import numpy as np

from . import _jit
from .errors import FactorizationTooLarge

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _sieve_bool_numpy(limit):
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return is_prime


@_jit.njit
def _sieve_bool_jit(limit):
    is_prime = np.ones(limit + 1, dtype=np.bool_)
    is_prime[0] = False
    is_prime[1] = False
    p = 2
    while p * p <= limit:
        if is_prime[p]:
            for m in range(p * p, limit + 1, p):
                is_prime[m] = False
        p += 1
    return is_prime


_sieve_bool = _jit.select(_sieve_bool_jit, _sieve_bool_numpy)


def prime_flags(limit):
    """Boolean primality array of length limit+1."""
    if limit < 1:
        return np.zeros(max(limit + 1, 0), dtype=bool)
    return np.asarray(_sieve_bool(int(limit)))


def primes_up_to(limit):
    """All primes <= limit as an int64 array."""
    return np.flatnonzero(prime_flags(limit)).astype(np.int64)


def _segment_flags_numpy(lo, hi, base_primes):
    # primality flags for the window (lo, hi]
    n = hi - lo
    flags = np.ones(n, dtype=bool)
    for p in base_primes:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo // p) + 1) * p)
        flags[start - lo - 1 :: p] = False
    if lo < 1:
        flags[: min(1 - lo, n)] = False  # n=1 is not prime
    return flags


@_jit.njit
def _segment_flags_jit(lo, hi, base_primes):
    n = hi - lo
    flags = np.ones(n, dtype=np.bool_)
    for i in range(base_primes.shape[0]):
        p = base_primes[i]
        if p * p > hi:
            break
        start = p * p
        first = ((lo // p) + 1) * p
        if first > start:
            start = first
        for m in range(start, hi + 1, p):
            flags[m - lo - 1] = False
    if lo < 1:
        top = 1 - lo
        if top > n:
            top = n
        for j in range(top):
            flags[j] = False
    return flags


_segment_flags = _jit.select(_segment_flags_jit, _segment_flags_numpy)


def iter_prime_segments(lo, hi, block=1 << 20):
    """Yield arrays of the primes in (lo, hi], in ascending blocks.

    Marking starts at max(p*p, first multiple past the segment start), so base
    primes falling inside a segment survive unmarked.
    """
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        return
    base = primes_up_to(math.isqrt(hi))
    seg_lo = max(lo, 0)
    while seg_lo < hi:
        seg_hi = min(seg_lo + block, hi)
        flags = np.asarray(_segment_flags(seg_lo, seg_hi, base))
        yield (np.flatnonzero(flags) + seg_lo + 1).astype(np.int64)
        seg_lo = seg_hi


def is_probable_prime(n):
    """Deterministic Miller-Rabin for 64-bit-ish inputs (exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n, budget):
    # Brent's cycle variant; deterministic seed schedule.
    if n % 2 == 0:
        return 2
    for c in range(1, 20):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        count = 0
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
                count += min(m, r - k)
                if count > budget:
                    raise FactorizationTooLarge(f"Pollard budget exhausted for n={n}")
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
    raise FactorizationTooLarge(f"Pollard failed for n={n}")


def factorize(n, budget=1 << 22):
    """Prime factorization [(p, e), ...] ascending; exact.

    Trial division by sieved primes to 10^4, then Miller-Rabin + Pollard-Brent
    for any remaining cofactor, capped by `budget` iterations total.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("factorize expects n >= 1")
    factors = {}
    for p in (2, 3, 5):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= n and p < 10_000:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += wheel[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_brent(m, budget)
        stack.append(d)
        stack.append(m // d)
    return sorted(factors.items())


def divisor_count(factorization):
    d = 1
    for _, e in factorization:
        d *= e + 1
    return d


def sigma_minus_one(factorization):
    """sum_{d|q} 1/d as an exact Fraction."""
    s = Fraction(1)
    for p, e in factorization:
        s *= Fraction(sum(p**k for k in range(e + 1)), p**e)
    return s


def largest_prime_factor(factorization):
    return max((p for p, _ in factorization), default=1)


def squarefull_part(factorization):
    """Largest divisor whose primes all appear with exponent >= 2."""
    r = 1
    for p, e in factorization:
        if e >= 2:
            r *= p**e
    return r


def omega(n):
    """Number of distinct prime factors."""
    return len(factorize(n))


def mangoldt_table(limit):
    """Von Mangoldt Lambda(n) for 0 <= n <= limit as float64."""
    lam = np.zeros(limit + 1)
    for p in primes_up_to(limit):
        p = int(p)
        logp = math.log(p)
        pk = p
        while pk <= limit:
            lam[pk] = logp
            pk *= p
    return lam


def squarefree_flags(limit):
    """Boolean mu^2(n) table for 0 <= n <= limit."""
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    for p in primes_up_to(math.isqrt(limit)):
        p2 = int(p) * int(p)
        sf[p2::p2] = False
    return sf


def greatest_prime_factor_table(limit):
    """P(n) for 0 <= n <= limit (P(0)=P(1)=0), int64."""
    gpf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit):
        gpf[p::p] = p
    return gpf
