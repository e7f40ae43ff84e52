"""Incomplete character sums, exactly, plus the closed-form comparison bound.

A window sum over (M, M+N] collapses to residue-class counts: each residue
r mod q appears floor((M+N-r)/q) - floor((M-r)/q) times.  The counts feed an
exact cyclotomic accumulator, so full periods cancel to literal zero and
floats appear only when the caller asks for a complex number.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _jit
from .errors import EmptySample, MixedSquarefullClass, NotPrimitive, RangeOrder
from .sieves import factorize
from .unity import RootOfUnitySum


def _residue_counts_numpy(q, M, N):
    r = np.arange(q, dtype=np.int64)
    return (M + N - r) // q - (M - r) // q


@_jit.njit
def _residue_counts_jit(q, M, N):
    out = np.empty(q, np.int64)
    for r in range(q):
        out[r] = (M + N - r) // q - (M - r) // q
    return out


_residue_counts = _jit.select(_residue_counts_jit, _residue_counts_numpy)


def partial_sum_exact(chi, M, N):
    """Sum of chi(n) over M < n <= M+N as an exact cyclotomic integer."""
    q = chi.modulus
    cnt = _residue_counts(q, int(M), int(N))
    e = chi.exponent_table()
    m = chi.order
    coprime = e >= 0
    per_exponent = np.zeros(m, dtype=np.int64)
    np.add.at(per_exponent, e[coprime], cnt[coprime])
    acc = RootOfUnitySum(m)
    acc.counts = [int(c) for c in per_exponent]
    return acc


def partial_sum(chi, M, N):
    """Exact window sum emitted as a complex number."""
    return partial_sum_exact(chi, M, N).reduced().to_complex()


def arith_profile(q):
    """(largest prime, square-full part, divisor count, sigma_{-1}) of q."""
    if q < 2:
        raise ValueError("profile requires q >= 2")
    fac = factorize(q)
    p = fac[-1][0]
    r = math.prod(pe**e for pe, e in fac if e >= 2)
    d = math.prod(e + 1 for _, e in fac)
    sigma = math.prod(Fraction(pe**(e + 1) - 1, pe**e * (pe - 1)) for pe, e in fac)
    return p, r, d, sigma


@dataclass(frozen=True)
class GRBoundParams:
    """Inputs of the window-sum bound for differencing depth k."""

    modulus: int
    start: int
    length: int
    depth: int
    largest_prime: int
    squarefull: int
    divisors: int
    sigma_minus_one: Fraction

    @property
    def L(self):
        return 2 ** (self.depth + 3) - 2

    @classmethod
    def from_modulus(cls, q, start, length, depth):
        if depth < 1:
            raise ValueError("depth must be a positive integer")
        p, r, d, sigma = arith_profile(q)
        return cls(q, int(start), int(length), int(depth), p, r, d, sigma)


def gr_bound(params, log_q=None):
    """Closed-form bound on |window sum| with implied constant 1.

    M^(1-(k+3)/L) q^(1/L) d(q)^((3k^2+11k+8)/(2L)) (log q)^((k+3)/L)
    sigma_{-1}(q) p^((k^2+3k+4)/(4L)) with L = 2^(k+3)-2.  Valid only for
    N <= M; a reversed range is refused, not extrapolated.
    """
    if params.length > params.start:
        raise RangeOrder(
            f"bound requires N <= M, got N={params.length} > M={params.start}")
    if log_q is None:
        log_q = math.log(params.modulus)
    k = params.depth
    L = params.L
    return (params.start ** (1 - (k + 3) / L)
            * params.modulus ** (1 / L)
            * params.divisors ** ((3 * k * k + 11 * k + 8) / (2 * L))
            * log_q ** ((k + 3) / L)
            * float(params.sigma_minus_one)
            * params.largest_prime ** ((k * k + 3 * k + 4) / (4 * L)))


def best_depth(q, start, length, k_max=20):
    """Depth in [1, k_max] minimizing the bound, with the bound value."""
    best = None
    for k in range(1, k_max + 1):
        value = gr_bound(GRBoundParams.from_modulus(q, start, length, k))
        if best is None or value < best[1]:
            best = (k, value)
    return best


def polya_vinogradov(chi):
    """Baseline comparison bound sqrt(q) * log q for primitive non-principal chi."""
    if chi.is_principal or not chi.is_primitive:
        raise NotPrimitive(f"{chi!r} is not primitive non-principal")
    q = chi.modulus
    return math.sqrt(q) * math.log(q)


@dataclass(frozen=True)
class SumComparison:
    """One exact window sum next to its closed-form bound."""

    exact: complex
    abs: float
    bound: float
    ratio: float


def compare_window(chi, M, N, k):
    exact = partial_sum(chi, M, N)
    bound = gr_bound(GRBoundParams.from_modulus(chi.modulus, M, N, k))
    mag = abs(exact)
    return SumComparison(exact, mag, bound, mag / bound)


def fit_constant(sample):
    """Max |sum|/bound over a sample sharing one square-full class r.

    Returns (r, worst SumComparison).  The bound's implied constant depends
    only on r, so mixing classes in one fit is refused.
    """
    if not sample:
        raise EmptySample("cannot fit a constant to an empty sample")
    classes = {arith_profile(chi.modulus)[1] for chi, _, _, _ in sample}
    if len(classes) != 1:
        raise MixedSquarefullClass(f"sample spans square-full classes {sorted(classes)}")
    worst = None
    for entry in sample:
        comp = compare_window(*entry)
        if worst is None or comp.ratio > worst.ratio:
            worst = comp
    return classes.pop(), worst
