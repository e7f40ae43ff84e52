"""Gaussian-smoothed coefficient sums, a double-log tent kernel over prime
windows, and the parameter planners that couple the two to a target modulus.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _jit, characters, sieves
from .errors import (
    CapTooSmall,
    ConstraintViolated,
    FactorizationTooLarge,
    Infeasible,
    QuadratureBudget,
)
from .lfun import evaluate_L_batch

_SIEVE_BUDGET = 1 << 24
_PRIME_WINDOW_BUDGET = math.exp(16.0)
_EULER_CUTOFF = 5000
_TAIL_LOG_TOL = 27.631  # -log(1e-12); sets the default quadrature height


# ---------------------------------------------------------------- planners


@dataclass(frozen=True)
class QTPlan:
    """Feasible parameter choice for the quadratic smoothing argument.

    margin_ok records delta <= (kappa*(2*theta - theta^2) - xi)/3 and cap_ok
    records delta <= kappa^3/(65*(1 + 8*kappa)^3), both re-evaluated on the
    stored fields.
    """

    ell: int
    theta: float
    xi: float
    delta: float
    eta: float
    varpi: float
    kappa: float
    margin_ok: bool
    cap_ok: bool

    def smoothing_y(self, q):
        """Gaussian width kappa * log(q) for a conductor q."""
        return self.kappa * math.log(q)


def _plan_rates(ell, delta):
    varpi = 1.0 / (2 * ell) - delta
    eta = delta ** (1.0 / 3.0)
    kappa = varpi / (2.0 + eta)
    return varpi, eta, kappa


def _margin_rhs(kappa, theta, xi):
    return (kappa * (2.0 * theta - theta * theta) - xi) / 3.0


def _cap_rhs(kappa):
    return kappa**3 / (65.0 * (1.0 + 8.0 * kappa) ** 3)


def qt_plan(ell, theta, xi):
    """Largest delta compatible with both smoothing constraints.

    Raising delta lowers kappa and with it both right-hand sides, so the
    feasibility predicate is monotone and bisection lands on the boundary.
    """
    ell = int(ell)
    if ell < 3 or not sieves.is_probable_prime(ell):
        raise ConstraintViolated(f"ell must be an odd prime >= 3, got {ell}")
    if not 0.0 < theta < 0.5:
        raise ConstraintViolated(f"theta must lie in (0, 1/2), got {theta}")
    if xi <= 0.0:
        raise ConstraintViolated(f"xi must be positive, got {xi}")
    threshold = (2.0 * theta - theta * theta) / (4.0 * ell)
    if xi >= threshold:
        raise Infeasible(
            f"xi={xi} is not below (2*theta - theta^2)/(4*ell)={threshold}"
        )

    def feasible(d):
        _, _, kappa = _plan_rates(ell, d)
        return d <= min(_margin_rhs(kappa, theta, xi), _cap_rhs(kappa))

    lo, hi = 0.0, 1.0 / (2 * ell)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    varpi, eta, kappa = _plan_rates(ell, lo)
    return QTPlan(
        ell=ell,
        theta=float(theta),
        xi=float(xi),
        delta=lo,
        eta=eta,
        varpi=varpi,
        kappa=kappa,
        margin_ok=lo <= _margin_rhs(kappa, theta, xi),
        cap_ok=lo <= _cap_rhs(kappa),
    )


@dataclass(frozen=True)
class CTConfig:
    """Window geometry for the cubic-field prime sums."""

    ell: int
    delta: float
    disc: int
    vartheta: float
    y: float

    @property
    def window_low(self):
        return self.y ** ((1.0 - self.delta) ** 2)


def ct_config(ell, delta, disc, vartheta):
    """Validated window configuration with y = |disc|^(1/(4 ell) - delta)."""
    ell = int(ell)
    if ell < 2 or not sieves.is_probable_prime(ell):
        raise ConstraintViolated(f"ell must be prime, got {ell}")
    if not 0.0 < delta < 1.0 / (4.0 * ell):
        raise ConstraintViolated(
            f"delta must lie in (0, {1.0 / (4.0 * ell)}), got {delta}"
        )
    disc = int(disc)
    size = abs(disc)
    if size < 2:
        raise ConstraintViolated(f"|disc| must be at least 2, got {disc}")
    if not 1.0 <= vartheta <= math.log(size):
        raise ConstraintViolated(
            f"vartheta must lie in [1, log|disc|] = [1, {math.log(size)}],"
            f" got {vartheta}"
        )
    y = size ** (1.0 / (4.0 * ell) - delta)
    return CTConfig(
        ell=ell, delta=float(delta), disc=disc, vartheta=float(vartheta), y=y
    )


# ------------------------------------------------------- coefficient series


def _factor_row(disc):
    """Local factor per residue class mod |disc|: 2 at +1 classes, else 0."""
    m = abs(int(disc))
    row = np.zeros(m, dtype=np.int64)
    for r in range(m):
        if characters.kronecker(disc, r) == 1:
            row[r] = 2
    return row


def _coefficient_sieve_numpy(n_limit, disc_abs, factor_row, base_primes):
    a = np.ones(n_limit + 1, dtype=np.int64)
    a[0] = 0
    rem = np.arange(n_limit + 1)
    for p in base_primes:
        p = int(p)
        a[p::p] *= factor_row[p % disc_abs]
        rem[p::p] //= p
        p2 = p * p
        if p2 <= n_limit:
            a[p2::p2] = 0
    # squarefree n keep at most one prime factor above sqrt(n_limit)
    big = rem > 1
    big &= a != 0
    a[big] *= factor_row[rem[big] % disc_abs]
    return a


@_jit.njit
def _coefficient_sieve_jit(n_limit, disc_abs, factor_row, base_primes):
    a = np.ones(n_limit + 1, dtype=np.int64)
    a[0] = 0
    rem = np.arange(n_limit + 1)
    for i in range(base_primes.shape[0]):
        p = base_primes[i]
        f = factor_row[p % disc_abs]
        for n in range(p, n_limit + 1, p):
            a[n] *= f
            rem[n] //= p
        p2 = p * p
        if p2 <= n_limit:
            for n in range(p2, n_limit + 1, p2):
                a[n] = 0
    for n in range(2, n_limit + 1):
        r = rem[n]
        if r > 1 and a[n] != 0:
            a[n] *= factor_row[r % disc_abs]
    return a


_coefficient_sieve = _jit.select(_coefficient_sieve_jit, _coefficient_sieve_numpy)


@dataclass(frozen=True)
class CoefficientSeries:
    """Squarefree ideal-count coefficients for a quadratic discriminant.

    a(n) = mu^2(n) * prod_{p|n}(chi0(p) + chi(p)): the product is 2 at split
    primes and 0 elsewhere, so a(n) counts the integral ideals of norm n when
    n is squarefree and coprime to the discriminant, and vanishes otherwise.
    Multiplicative, with 0 <= a(n) <= d(n).
    """

    disc: int
    chi: characters.DirichletCharacter

    def a(self, n):
        n = int(n)
        if n <= 0:
            return 0
        value = 1
        for p, e in sieves.factorize(n):
            if e > 1 or self.disc % p == 0:
                return 0
            if characters.kronecker(self.disc, p) != 1:
                return 0
            value *= 2
        return value

    def coefficients(self, n_limit):
        """a(0..n_limit) as an int64 array, a(0) = 0."""
        n_limit = int(n_limit)
        if n_limit < 0:
            raise ConstraintViolated(f"limit must be >= 0, got {n_limit}")
        if n_limit > _SIEVE_BUDGET:
            raise FactorizationTooLarge(
                f"coefficient sieve limit {n_limit} exceeds {_SIEVE_BUDGET}"
            )
        row = _factor_row(self.disc)
        base = sieves.primes_up_to(math.isqrt(n_limit))
        return np.asarray(_coefficient_sieve(n_limit, abs(self.disc), row, base))


def coefficient_series(disc):
    """Attach the quadratic character and wrap the coefficient accessors."""
    disc = int(disc)
    return CoefficientSeries(disc=disc, chi=characters.attach_quadratic(disc))


# ---------------------------------------------------------- Gaussian sums


def _resolve_cap(y, n_cap):
    if n_cap is None:
        # beyond e^{8y} the tail mass is O(1) against an e^y-sized total
        n_cap = math.ceil(math.exp(8.0 * y))
    n_cap = int(n_cap)
    if n_cap < 1:
        raise ConstraintViolated(f"n_cap must be >= 1, got {n_cap}")
    if n_cap > _SIEVE_BUDGET:
        raise FactorizationTooLarge(
            f"cap {n_cap} exceeds the sieve budget {_SIEVE_BUDGET};"
            " pass a smaller n_cap"
        )
    return n_cap


def _gaussian_terms(series, y, n_cap):
    table = series.coefficients(n_cap).astype(np.float64)
    ns = np.arange(n_cap + 1, dtype=np.float64)
    ns[0] = 1.0
    terms = table * np.exp(-np.log(ns) ** 2 / (4.0 * y))
    terms[0] = 0.0
    return terms


def gaussian_weighted_sum(series, y, n_cap=None):
    """(2 sqrt(pi y))^-1 * sum_{n <= n_cap} a(n) exp(-(log n)^2 / 4y).

    Raises CapTooSmall when the final included term still carries more than
    1e-15 of the accumulated mass, i.e. when truncation visibly bites.
    """
    if y <= 0.0:
        raise ConstraintViolated(f"smoothing width y must be positive, got {y}")
    n_cap = _resolve_cap(y, n_cap)
    terms = _gaussian_terms(series, y, n_cap)
    total = float(terms.sum())
    if terms[n_cap] > 1e-15 * total:
        raise CapTooSmall(
            f"term at n={n_cap} is {terms[n_cap]:.3e} against total {total:.3e}"
        )
    return total / (2.0 * math.sqrt(math.pi * y))


def gaussian_tail_bound(y, n_cap):
    """Analytic estimate for the mass discarded beyond n_cap.

    Uses a(n) <= d(n) with divisor density log t + 2; substituting t = e^u
    completes the square and leaves an erfc plus a Gaussian point term.
    """
    if y <= 0.0 or n_cap < 1:
        raise ConstraintViolated("need y > 0 and n_cap >= 1")
    u0 = math.log(n_cap)
    z0 = (u0 - 2.0 * y) / (2.0 * math.sqrt(y))
    raw = math.exp(y) * (
        2.0 * y * math.exp(-z0 * z0)
        + (2.0 * y + 2.0) * math.sqrt(math.pi * y) * math.erfc(z0)
    )
    return raw / (2.0 * math.sqrt(math.pi * y))


def _euler_corrections(disc, s):
    # reconciles zeta * L with the squarefree coefficient series: local
    # factors are 1-x at ramified p, (1+2x)(1-x)^2 at split p, 1-x^2 at
    # inert p, written as polynomials in x = p^-s
    out = np.ones_like(s)
    for p in sieves.primes_up_to(_EULER_CUTOFF):
        p = int(p)
        x = np.exp(-s * math.log(p))
        if disc % p == 0:
            out = out * (1.0 - x)
        elif characters.kronecker(disc, p) == 1:
            x2 = x * x
            out = out * (1.0 - 3.0 * x2 + 2.0 * x2 * x)
        else:
            out = out * (1.0 - x * x)
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def contour_integral_gaussian(series, y, height_cap=None, tol=1e-10, max_nodes=1 << 12):
    """(2 pi i)^-1 integral of f(s) exp(s^2 y) along Re(s) = 2.

    The integrand is built as zeta * L * (local corrections), absolutely
    convergent on the line; it decays like exp((4 - t^2) y), so the default
    height keeps the discarded tail near 1e-12. Composite Gauss-Legendre
    panels double until two successive estimates agree within tol.
    """
    if y <= 0.0:
        raise ConstraintViolated(f"smoothing width y must be positive, got {y}")
    if height_cap is not None:
        top = float(height_cap)
    else:
        top = math.sqrt(4.0 + _TAIL_LOG_TOL / y)
    zeta_chi = characters.principal_character(1)
    ltol = tol * 1e-2

    def estimate(panels):
        edges = np.linspace(-top, top, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        ts = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        s = 2.0 + 1j * ts
        vals = evaluate_L_batch(zeta_chi, s, tol=ltol)
        vals = vals * evaluate_L_batch(series.chi, s, tol=ltol)
        vals = vals * _euler_corrections(series.disc, s)
        vals = vals * np.exp(s * s * y)
        weights = np.broadcast_to(_GL_WEIGHTS, (panels, 16)).ravel()
        return complex((vals * weights).sum() * half / (2.0 * math.pi))

    panels = 8
    prev = estimate(panels)
    while True:
        panels *= 2
        if panels * 16 > max_nodes:
            raise QuadratureBudget(
                f"no agreement within {tol} inside the {max_nodes}-node budget"
            )
        cur = estimate(panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur


def window_mass(series, y, delta, n_cap=None):
    """Split the smoothed sum at e^{(2 +/- eta) y}, eta = delta^(1/3).

    Returns (core, low_tail, high_tail), each carrying the same
    (2 sqrt(pi y))^-1 normalization as the full sum.
    """
    if y <= 0.0:
        raise ConstraintViolated(f"smoothing width y must be positive, got {y}")
    if not 0.0 < delta < 1.0:
        raise ConstraintViolated(f"delta must lie in (0,1), got {delta}")
    n_cap = _resolve_cap(y, n_cap)
    eta = delta ** (1.0 / 3.0)
    terms = _gaussian_terms(series, y, n_cap)
    norm = 1.0 / (2.0 * math.sqrt(math.pi * y))

    def edge(exponent):
        if exponent > math.log(n_cap + 1.0):
            return n_cap
        return min(int(math.floor(math.exp(exponent))), n_cap)

    lo_edge = edge((2.0 - eta) * y)
    hi_edge = edge((2.0 + eta) * y)
    low = float(terms[: lo_edge + 1].sum())
    core = float(terms[lo_edge + 1 : hi_edge + 1].sum())
    high = float(terms[hi_edge + 1 :].sum())
    return norm * core, norm * low, norm * high


# -------------------------------------------------------------- tent kernel


def cubic_kernel_f(s, y, delta):
    """((1-d) y^u - (2-d) y^{(1-d)u} + y^{(1-d)^2 u}) / u^2 at u = s - 1.

    Continued through the removable point s = 1, where the value is
    (1/2) d^2 (1-d)(2-d) (log y)^2. Nonnegative for real s, and bounded by
    (4 - 2 delta) / |s-1|^2 when Re(s) <= 1.
    """
    if y <= 1.0:
        raise ConstraintViolated(f"kernel scale y must exceed 1, got {y}")
    if not 0.0 < delta < 1.0:
        raise ConstraintViolated(f"delta must lie in (0,1), got {delta}")
    u = complex(s) - 1.0
    big_l = math.log(y)
    z = u * big_l
    c = 1.0 - delta
    if abs(z) < 0.25:
        # power series in z; the constant and linear coefficients vanish
        # identically, which is what makes the singularity removable
        acc = 0.0 + 0.0j
        zk = 1.0 + 0.0j
        fact = 2.0
        pw = c * c
        pw2 = pw * pw
        for k in range(2, 60):
            term = (c - (2.0 - delta) * pw + pw2) * zk / fact
            acc += term
            if k > 6 and abs(term) <= 1e-19 * abs(acc):
                break
            zk *= z
            fact *= k + 1
            pw *= c
            pw2 *= c * c
        return acc * big_l * big_l
    num = c * cmath.exp(z) - (2.0 - delta) * cmath.exp(c * z) + cmath.exp(c * c * z)
    return num / (u * u)


# --------------------------------------------------------- prime-window sums


def weighted_prime_sum(chi, y, delta, sieve_limit=_PRIME_WINDOW_BUDGET):
    """Tent-weighted sum of chi(p) log(p)/p over primes in (y^{(1-d)^2}, y].

    The weight min(log(p / y^{(1-d)^2}), log(y^{1-d} / p^{1-d})) rises from
    zero at the lower edge and falls back to zero at p = y. Complex-valued so
    characters of any order fit; real characters give an exactly real result.
    """
    if y <= 1.0:
        raise ConstraintViolated(f"window top y must exceed 1, got {y}")
    if not 0.0 < delta < 1.0:
        raise ConstraintViolated(f"delta must lie in (0,1), got {delta}")
    if y > sieve_limit:
        raise FactorizationTooLarge(
            f"window top {y} exceeds the sieve budget {sieve_limit}"
        )
    big_l = math.log(y)
    c = 1.0 - delta
    lower = y ** (c * c)
    top = int(math.floor(y))
    if top < 2:
        return 0.0 + 0.0j
    acc = 0.0 + 0.0j
    for seg in sieves.iter_prime_segments(int(math.floor(lower)), top):
        ps = seg[seg > lower]
        if ps.size == 0:
            continue
        u = np.log(ps.astype(np.float64))
        tent = np.minimum(u - c * c * big_l, c * (big_l - u))
        acc += complex((chi.values_at(ps) * (u / ps * tent)).sum())
    return acc


# ------------------------------------------------------------ zero-side sums


@dataclass(frozen=True)
class AnnulusRow:
    """One dyadic shell of the zero census around s = 1."""

    scale: int  # 0 for the inner ball, else the dyadic multiplier R
    inner: float
    outer: float
    count: int
    linnik_bound: int  # the O(R + 1) reference count
    inside_hypothesis_disc: bool


def zero_side_sum(zeros, y, delta, log_modulus, vartheta):
    """-sum f(rho) over supplied zeros, with a dyadic census of |rho - 1|.

    Shells are measured in units of 1/log_modulus: an inner ball of one unit,
    then annuli (R, 2R] for R = 1, 2, 4, ... until the farthest zero is
    covered. Each row carries the R+1 reference count and whether the shell
    sits inside the radius-vartheta hypothesis disc. Supplied zeros must obey
    |gamma| <= 1.
    """
    if log_modulus <= 0.0:
        raise ConstraintViolated(f"log_modulus must be positive, got {log_modulus}")
    if vartheta < 1.0:
        raise ConstraintViolated(f"vartheta must be at least 1, got {vartheta}")
    total = 0.0 + 0.0j
    scaled = []
    base = float(log_modulus)
    for zero in zeros:
        if abs(zero.gamma) > 1.0:
            raise ConstraintViolated(
                f"zero at height {zero.gamma} lies outside |gamma| <= 1"
            )
        rho = complex(zero.beta, zero.gamma)
        total -= cubic_kernel_f(rho, y, delta)
        scaled.append(abs(rho - 1.0) * base)
    if not scaled:
        return total, ()
    rows = [
        AnnulusRow(
            scale=0,
            inner=0.0,
            outer=1.0 / base,
            count=sum(1 for x in scaled if x <= 1.0),
            linnik_bound=1,
            inside_hypothesis_disc=1.0 <= vartheta,
        )
    ]
    top = max(scaled)
    r_scale = 1
    while r_scale < top:
        rows.append(
            AnnulusRow(
                scale=r_scale,
                inner=r_scale / base,
                outer=2.0 * r_scale / base,
                count=sum(1 for x in scaled if r_scale < x <= 2 * r_scale),
                linnik_bound=r_scale + 1,
                inside_hypothesis_disc=2.0 * r_scale <= vartheta,
            )
        )
        r_scale *= 2
    return total, tuple(rows)
