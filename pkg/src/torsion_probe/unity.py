"""Exact roots of unity and exact cyclotomic-integer accumulation.

A character value is either 0 or exp(2*pi*i*e/m) for a reduced fraction e/m.
Sums of such values live in Z[zeta_m]; an integer vector of counts per
exponent represents the sum exactly, and zero-testing reduces the counts
polynomial modulo the m-th cyclotomic polynomial.  Floats appear only in
to_complex().
"""

import cmath
from fractions import Fraction
from functools import lru_cache


class UnityValue:
    """0, or an exact root of unity exp(2*pi*i*e/m) with e/m reduced."""

    __slots__ = ("exponent",)

    def __init__(self, exponent):
        # exponent: Fraction in [0,1) for a root of unity, or None for 0
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("UnityValue is immutable")

    @classmethod
    def zero(cls):
        return _ZERO

    @classmethod
    def one(cls):
        return _ONE

    @classmethod
    def from_fraction(cls, e, m):
        if m <= 0:
            raise ValueError("denominator must be positive")
        return cls(Fraction(e % m, m))

    @property
    def is_zero(self):
        return self.exponent is None

    @property
    def is_one(self):
        return self.exponent == 0

    @property
    def order(self):
        """Multiplicative order; None for the zero value."""
        if self.exponent is None:
            return None
        return self.exponent.denominator if self.exponent else 1

    def __mul__(self, other):
        if self.exponent is None or other.exponent is None:
            return _ZERO
        return UnityValue((self.exponent + other.exponent) % 1)

    def __pow__(self, k):
        if self.exponent is None:
            return _ZERO if k else _ONE
        return UnityValue((self.exponent * k) % 1)

    def conjugate(self):
        if self.exponent is None:
            return _ZERO
        return UnityValue((-self.exponent) % 1)

    def to_complex(self):
        if self.exponent is None:
            return 0j
        e = self.exponent
        if e == 0:
            return complex(1)
        if e == Fraction(1, 2):
            return complex(-1)
        if e == Fraction(1, 4):
            return 1j
        if e == Fraction(3, 4):
            return -1j
        return cmath.exp(2j * cmath.pi * float(e))

    def as_real_int(self):
        """+1/-1/0 when the value is real, else raises."""
        if self.exponent is None:
            return 0
        if self.exponent == 0:
            return 1
        if self.exponent == Fraction(1, 2):
            return -1
        raise ValueError("value is not real")

    def __eq__(self, other):
        if not isinstance(other, UnityValue):
            return NotImplemented
        return self.exponent == other.exponent

    def __hash__(self):
        return hash(("UnityValue", self.exponent))

    def __repr__(self):
        if self.exponent is None:
            return "UnityValue(0)"
        return f"UnityValue(e^(2pi*i*{self.exponent}))"


_ZERO = UnityValue(None)
_ONE = UnityValue(Fraction(0))


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m):
    """Integer coefficient tuple of Phi_m, ascending degree."""
    if m == 1:
        return (-1, 1)
    # divide x^m - 1 by the product of Phi_d over proper divisors d | m
    poly = [0] * (m + 1)
    poly[0], poly[m] = -1, 1
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divide_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _poly_divide_exact(num, den):
    # exact division of integer polynomials, den monic, remainder known zero
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j, dj in enumerate(den):
                num[i - dn + j] -= c * dj
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


class RootOfUnitySum:
    """Exact integer combination sum_e counts[e] * zeta_m^e."""

    __slots__ = ("m", "counts")

    def __init__(self, m):
        if m <= 0:
            raise ValueError("m must be positive")
        self.m = m
        self.counts = [0] * m

    def add(self, value, mult=1):
        """Accumulate mult * value; value's order must divide m."""
        if value.is_zero:
            return
        e = value.exponent
        scaled = e * self.m
        if scaled.denominator != 1:
            raise ValueError(f"order {e.denominator} does not divide m={self.m}")
        self.counts[int(scaled) % self.m] += mult

    def add_count(self, exponent_index, mult=1):
        self.counts[exponent_index % self.m] += mult

    def __add__(self, other):
        if self.m != other.m:
            raise ValueError("mismatched cyclotomic orders")
        out = RootOfUnitySum(self.m)
        out.counts = [a + b for a, b in zip(self.counts, other.counts)]
        return out

    def __sub__(self, other):
        if self.m != other.m:
            raise ValueError("mismatched cyclotomic orders")
        out = RootOfUnitySum(self.m)
        out.counts = [a - b for a, b in zip(self.counts, other.counts)]
        return out

    def reduced(self):
        """Canonical representative: counts polynomial reduced mod Phi_m."""
        rem = list(self.counts)
        phi = cyclotomic_polynomial(self.m)
        dn = len(phi) - 1
        for i in range(len(rem) - 1, dn - 1, -1):
            c = rem[i]
            if c:
                rem[i] = 0
                for j, pj in enumerate(phi[:-1]):
                    rem[i - dn + j] -= c * pj
        out = RootOfUnitySum(self.m)
        out.counts = rem
        return out

    def is_zero(self):
        """Exact: counts polynomial divisible by Phi_m."""
        return not any(self.reduced().counts)

    def to_complex(self):
        total = 0j
        for e, c in enumerate(self.counts):
            if c:
                total += c * cmath.exp(2j * cmath.pi * e / self.m)
        return total

    def __repr__(self):
        return f"RootOfUnitySum(m={self.m}, counts={self.counts})"
