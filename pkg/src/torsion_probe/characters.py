"""Dirichlet characters mod q via CRT decomposition, with exact values.

A character is a tuple of exponent indices against fixed generators of the
unit groups mod the prime powers of q: the smallest primitive root for odd
p^e, the pair (-1, 5) for 2^e with e >= 3, and -1 for 2^2.  Values are exact
root-of-unity fractions (UnityValue); floating complex numbers appear only in
the value tables consumed by the analytic modules.
"""

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import NotFundamental
from .sieves import factorize
from .unity import UnityValue


class Component(NamedTuple):
    """One cyclic factor of (Z/q)*: x maps to generator^table[x mod modulus]."""

    prime: int
    modulus: int       # p^e carrying this factor
    order: int         # size of the cyclic factor
    generator: int     # residue mod modulus with trivial coordinates elsewhere
    table: np.ndarray  # discrete log per residue; -1 where p | x


def _primitive_root(pe, p, s):
    # smallest primitive root mod p^e (odd p), checked against the prime
    # factorization of s = phi(p^e)
    checks = [s // ell for ell, _ in factorize(s)]
    g = 2
    while True:
        if g % p != 0 and all(pow(g, c, pe) != 1 for c in checks):
            return g
        g += 1


def _odd_component(p, e):
    pe = p**e
    s = pe // p * (p - 1)
    g = _primitive_root(pe, p, s)
    table = np.full(pe, -1, dtype=np.int64)
    x = 1
    for k in range(s):
        table[x] = k
        x = x * g % pe
    return Component(p, pe, s, g, table)


def _two_components(e):
    if e <= 1:
        return []
    pe = 2**e
    if e == 2:
        table = np.full(4, -1, dtype=np.int64)
        table[1], table[3] = 0, 1
        return [Component(2, 4, 2, 3, table)]
    # every odd x mod 2^e is (-1)^a * 5^l, a < 2, l < 2^(e-2)
    half = pe >> 2
    eps = np.full(pe, -1, dtype=np.int64)
    ell = np.full(pe, -1, dtype=np.int64)
    x = 1
    for l in range(half):
        eps[x], ell[x] = 0, l
        eps[pe - x], ell[pe - x] = 1, l
        x = x * 5 % pe
    return [
        Component(2, pe, 2, pe - 1, eps),
        Component(2, pe, half, 5, ell),
    ]


class CharacterGroup:
    """Shared structure of the character group mod q; cached per q."""

    def __init__(self, q):
        self.q = q
        self.factorization = factorize(q) if q > 1 else []
        comps = []
        for p, e in self.factorization:
            if p == 2:
                comps.extend(_two_components(e))
            else:
                comps.append(_odd_component(p, e))
        self.components = tuple(comps)
        self.orders = tuple(c.order for c in comps)
        self.exponent_lcm = math.lcm(*self.orders) if comps else 1
        self.phi = math.prod(self.orders)

    def generator_lifts(self):
        """For each component, a residue mod q hitting its generator with all
        other coordinates trivial (CRT lift)."""
        lifts = []
        for comp in self.components:
            rest = self.q // comp.modulus
            if rest == 1:
                lifts.append(comp.generator % self.q)
            else:
                # x = generator mod p^e, x = 1 mod q/p^e
                inv = pow(rest, -1, comp.modulus)
                x = (1 + rest * ((comp.generator - 1) * inv % comp.modulus)) % self.q
                lifts.append(x)
        return lifts


@lru_cache(maxsize=512)
def character_group(q):
    if q < 1:
        raise ValueError("modulus must be >= 1")
    return CharacterGroup(int(q))


class DirichletCharacter:
    """Immutable character mod q, identified by exponent indices."""

    __slots__ = ("group", "exponents", "order", "conductor", "parity", "index",
                 "_exponent_table", "_value_table")

    def __init__(self, group, exponents):
        exponents = tuple(int(k) % s for k, s in zip(exponents, group.orders))
        if len(exponents) != len(group.orders):
            raise ValueError("exponent tuple length mismatch")
        self.group = group
        self.exponents = exponents
        self.order = math.lcm(*(s // math.gcd(s, k) for s, k in
                                zip(group.orders, exponents))) if exponents else 1
        self.conductor = self._compute_conductor()
        self.index = 0
        for k, s in zip(exponents, group.orders):
            self.index = self.index * s + k
        self.parity = self._compute_parity()
        self._exponent_table = None
        self._value_table = None

    # -- identity ---------------------------------------------------------

    @property
    def modulus(self):
        return self.group.q

    @property
    def label(self):
        return f"{self.modulus}.{self.index}"

    @property
    def is_principal(self):
        return self.order == 1

    @property
    def is_real(self):
        return self.order <= 2

    @property
    def is_primitive(self):
        return self.conductor == self.modulus

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def __repr__(self):
        return f"DirichletCharacter(q={self.modulus}, index={self.index}, order={self.order})"

    # -- structure --------------------------------------------------------

    def _compute_conductor(self):
        f = 1
        comps = self.group.components
        i = 0
        while i < len(comps):
            comp = comps[i]
            if comp.prime == 2 and i + 1 < len(comps) and comps[i + 1].prime == 2:
                # (eps, ell) pair for 2^e, e >= 3
                d_eps = 2 // math.gcd(2, self.exponents[i])
                s5 = comps[i + 1].order
                d5 = s5 // math.gcd(s5, self.exponents[i + 1])
                if d5 > 1:
                    f *= 4 * d5
                elif d_eps > 1:
                    f *= 4
                i += 2
                continue
            s = comp.order
            d = s // math.gcd(s, self.exponents[i])
            if d > 1:
                if comp.prime == 2:
                    f *= 4  # single component only occurs for modulus 4
                else:
                    p = comp.prime
                    vp = 0
                    dd = d
                    while dd % p == 0:
                        dd //= p
                        vp += 1
                    f *= p ** (1 + vp)
            i += 1
        return f

    def _compute_parity(self):
        if self.modulus == 1:
            return 1
        return self.eval(self.modulus - 1).as_real_int()

    # -- evaluation -------------------------------------------------------

    def eval(self, n):
        """Exact value chi(n) as a UnityValue."""
        q = self.modulus
        if q == 1:
            return UnityValue.one()
        r = int(n) % q
        if math.gcd(r, q) != 1:
            return UnityValue.zero()
        exponent = Fraction(0)
        for comp, k in zip(self.group.components, self.exponents):
            if k:
                t = int(comp.table[r % comp.modulus])
                exponent += Fraction(k * t, comp.order)
        return UnityValue(exponent % 1)

    def exponent_table(self):
        """int64 array of length q: chi(n) = zeta_order^e, or -1 for chi(n)=0."""
        if self._exponent_table is None:
            q, group = self.modulus, self.group
            if q == 1:
                table = np.zeros(1, dtype=np.int64)
            else:
                mg = group.exponent_lcm
                acc = np.zeros(q, dtype=np.int64)
                ns = np.arange(q)
                # component tables miss primes with no cyclic factor (2^1)
                coprime = np.gcd(ns, q) == 1
                for comp, k in zip(group.components, self.exponents):
                    if k:
                        local = comp.table[ns % comp.modulus]
                        acc += k * (mg // comp.order) * np.where(local >= 0, local, 0)
                acc %= mg
                table = acc * self.order // mg
                table[~coprime] = -1
            self._exponent_table = table
        return self._exponent_table

    def value_table(self):
        """complex128 array of length q with chi(0..q-1)."""
        if self._value_table is None:
            e = self.exponent_table()
            m = self.order
            # one cmath call per distinct root keeps the table bit-identical
            # with eval().to_complex()
            roots = np.array([UnityValue.from_fraction(k, m).to_complex()
                              for k in range(m)], dtype=np.complex128)
            vals = roots[np.maximum(e, 0)]
            vals[e < 0] = 0
            self._value_table = vals
        return self._value_table

    def values_at(self, ns):
        """Vectorized chi over an integer array."""
        return self.value_table()[np.asarray(ns, dtype=np.int64) % self.modulus]

    # -- algebra ----------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        if other.modulus != self.modulus:
            raise ValueError("character product requires a common modulus")
        exps = tuple((a + b) % s for a, b, s in
                     zip(self.exponents, other.exponents, self.group.orders))
        return DirichletCharacter(self.group, exps)

    def conjugate(self):
        exps = tuple((-k) % s for k, s in zip(self.exponents, self.group.orders))
        return DirichletCharacter(self.group, exps)

    def power(self, j):
        exps = tuple((k * j) % s for k, s in zip(self.exponents, self.group.orders))
        return DirichletCharacter(self.group, exps)


# -- module-level operations ----------------------------------------------

def kronecker(D, n):
    """Kronecker symbol (D|n), total on all integer pairs."""
    D, n = int(D), int(n)
    if n == 0:
        return 1 if D in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if D % 2 == 0:
            return 0
        if t % 2 == 1 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D|n) for odd n > 0
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(disc):
    disc = int(disc)
    if disc in (0, 1):
        return False
    if disc % 4 == 1:
        return _squarefree(disc)
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n):
    return all(e == 1 for _, e in factorize(abs(n)))


def attach_quadratic(disc):
    """Primitive real character mod |disc| with chi(n) = kronecker(disc, n)."""
    disc = int(disc)
    if not is_fundamental_discriminant(disc):
        raise NotFundamental(f"{disc} is not a fundamental discriminant")
    group = character_group(abs(disc))
    exps = []
    for comp, lift in zip(group.components, group.generator_lifts()):
        v = kronecker(disc, lift)
        exps.append(0 if v == 1 else comp.order // 2)
    chi = DirichletCharacter(group, tuple(exps))
    assert chi.order == 2 and chi.conductor == abs(disc)
    return chi


def principal_character(q):
    group = character_group(q)
    return DirichletCharacter(group, (0,) * len(group.orders))


def enumerate_characters(q, order_filter=None):
    """All phi(q) characters mod q in exponent-lexicographic order."""
    group = character_group(q)
    chars = [DirichletCharacter(group, exps)
             for exps in itertools.product(*(range(s) for s in group.orders))]
    if order_filter is not None:
        chars = [c for c in chars if c.order == order_filter]
    return chars


def from_index(q, index):
    """Character mod q by its enumeration index (mixed-radix decode)."""
    group = character_group(q)
    if not 0 <= index < group.phi:
        raise ValueError(f"index {index} out of range for modulus {q}")
    exps = []
    for s in reversed(group.orders):
        exps.append(index % s)
        index //= s
    return DirichletCharacter(group, tuple(reversed(exps)))


def eval_at(chi, n):
    return chi.eval(n)


def _unit_lift(q, modulus, residue):
    # x = residue (mod modulus), x = 1 (mod q/modulus'), coprime to q
    rest = 1
    for p, e in factorize(q):
        if modulus % p != 0:
            rest *= p**e
    if rest == 1:
        return residue % q if q > 1 else 0
    inv = pow(rest % modulus, -1, modulus)
    return (1 + rest * ((residue - 1) * inv % modulus)) % (modulus * rest)


def primitivize(chi):
    """(primitive character inducing chi, conductor)."""
    f = chi.conductor
    q = chi.modulus
    if f == q:
        return chi, f
    group_f = character_group(f)
    exps = []
    for comp in group_f.components:
        x = _unit_lift(q, comp.modulus, comp.generator)
        val = chi.eval(x)
        scaled = val.exponent * comp.order
        assert scaled.denominator == 1
        exps.append(int(scaled) % comp.order)
    prim = DirichletCharacter(group_f, tuple(exps))
    assert prim.conductor == f
    return prim, f


def induce(chi, q):
    """Character mod q induced by chi (whose modulus must divide q)."""
    f = chi.modulus
    if q % f != 0:
        raise ValueError(f"{f} does not divide {q}")
    group = character_group(q)
    exps = []
    for comp in group.components:
        x = _unit_lift(q, comp.modulus, comp.generator)
        val = chi.eval(x)
        if val.is_zero:
            raise AssertionError("generator lift not coprime to conductor")
        scaled = val.exponent * comp.order
        assert scaled.denominator == 1
        exps.append(int(scaled) % comp.order)
    return DirichletCharacter(group, tuple(exps))
