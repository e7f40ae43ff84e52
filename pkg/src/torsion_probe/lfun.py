"""Dirichlet L-functions on rectangles: evaluation, log-derivatives,
sup-norm reports, argument-principle zero scans, and zero-free-disc
certificates.

Every evaluation routes through one primitive-character core: imprimitive
inputs are primitivized and corrected by their missing Euler factors, and
the principal character mod 1 rides the same path with an explicit pole
term, so zeta-vs-L comparisons never fork the code.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import emsum
from .characters import primitivize
from .errors import (
    BoundaryZeroSuspected,
    ConstraintViolated,
    DegenerateRegion,
    NearZeroOrPole,
    PoleAtOne,
    ResolutionExhausted,
)
from .sieves import factorize, mangoldt_table

_POLE_EPS = 1e-12


class _Evaluator:
    """Primitive decomposition and cached value data for one character."""

    def __init__(self, chi):
        self.chi = chi
        self.prim, self.conductor = primitivize(chi)
        self.correction_primes = [
            p for p, _ in factorize(chi.modulus) if self.conductor % p != 0
        ] if chi.modulus > 1 else []
        f = self.conductor
        residues = np.arange(1, f + 1, dtype=np.int64)
        vals = self.prim.values_at(residues)
        keep = vals != 0
        self.residues = residues[keep]
        self.res_weights = vals[keep]
        # full-period character sum: phi(f) for the principal case, else 0
        self.pole_weight = len(self.residues) if self.prim.is_principal else 0
        self.has_pole = self.pole_weight != 0

    def batch(self, s, tol, want_deriv=False):
        s = np.asarray(s, dtype=np.complex128).reshape(-1)
        f = self.conductor
        sigma_min = float(s.real.min())
        t_abs = float(np.abs(s.imag).max())
        scale = len(self.residues) * f ** max(0.0, -sigma_min)
        n_block = emsum.choose_block_length(sigma_min, t_abs, tol, scale)

        m = np.arange(1, f * n_block + 1, dtype=np.int64)
        mvals = self.prim.values_at(m)
        keep = mvals != 0
        logm = np.log(m[keep].astype(np.float64))
        weights = mvals[keep]
        value = emsum.direct_sums(s, logm, weights)
        if want_deriv:
            deriv = emsum.direct_sums(s, logm, weights * (-logm))

        w_edges = n_block + self.residues.astype(np.float64) / f
        if want_deriv:
            t_val, t_der = emsum.em_tail(s, w_edges, want_deriv=True)
        else:
            t_val = emsum.em_tail(s, w_edges)
        log_f = math.log(f)
        f_pow = np.exp(-s * log_f)
        tail = t_val @ self.res_weights
        value = value + f_pow * tail
        if want_deriv:
            dtail = t_der @ self.res_weights
            deriv = deriv + f_pow * (dtail - log_f * tail)
        if self.pole_weight:
            pole = f_pow / (s - 1.0)
            value = value + self.pole_weight * pole
            if want_deriv:
                deriv = deriv + self.pole_weight * (-log_f * pole - f_pow / (s - 1.0) ** 2)

        for p in self.correction_primes:
            cp = self.prim.eval(p).to_complex()
            log_p = math.log(p)
            factor = 1.0 - cp * np.exp(-s * log_p)
            if want_deriv:
                deriv = deriv * factor + value * cp * log_p * np.exp(-s * log_p)
            value = value * factor
        return (value, deriv) if want_deriv else value


@lru_cache(maxsize=256)
def _evaluator(chi):
    return _Evaluator(chi)


def _check_window(chi, s_arr):
    if float(np.min(np.real(s_arr))) <= -1.0:
        raise ConstraintViolated("evaluation window requires Re(s) > -1")
    if chi.is_principal and bool(np.any(np.abs(s_arr - 1.0) < _POLE_EPS)):
        raise PoleAtOne("principal L-function has a pole at s = 1")


def evaluate_L(chi, s, tol=1e-10):
    """L(s, chi) to accuracy tol via the Hurwitz decomposition."""
    s = complex(s)
    arr = np.array([s], dtype=np.complex128)
    _check_window(chi, arr)
    return complex(_evaluator(chi).batch(arr, tol)[0])


def evaluate_L_batch(chi, s_array, tol=1e-10):
    """Vectorized evaluate_L over an array of points."""
    arr = np.asarray(s_array, dtype=np.complex128)
    _check_window(chi, arr)
    return _evaluator(chi).batch(arr, tol)


def log_derivative(chi, s, tol=1e-10):
    """L'/L at s; refuses points where |L| sits below the safety threshold."""
    s = complex(s)
    arr = np.array([s], dtype=np.complex128)
    _check_window(chi, arr)
    value, deriv = _evaluator(chi).batch(arr, tol, want_deriv=True)
    if abs(value[0]) < 1000.0 * tol:
        raise NearZeroOrPole(
            f"|L({s})| = {abs(value[0]):.3e} is too close to a zero or pole")
    return complex(deriv[0] / value[0])


# -- sup norm --------------------------------------------------------------

@dataclass(frozen=True)
class SupNormReport:
    sigma_min: float
    t_max: float
    resolution: float
    max_abs: float
    argmax: complex
    phi: float
    sigma_samples: tuple
    evaluations: int


def sup_norm(chi, theta, t_max, resolution, tol=1e-9):
    """Grid maximum of |L| over [1-theta, 2] x [-t_max, t_max].

    The sigma grid always contains the line sigma = 1; local refinement
    shrinks the mesh by 4x three times around the running argmax.
    """
    if chi.is_principal:
        raise PoleAtOne("pole at s = 1 lies inside every sup-norm rectangle")
    sigma_min = 1.0 - theta
    if not sigma_min < 2.0 or t_max < 0:
        raise DegenerateRegion(f"bad sup-norm region: sigma_min={sigma_min}, t_max={t_max}")
    h = min(0.1, max(resolution, 1e-4))
    sigmas = np.linspace(sigma_min, 2.0, int(math.ceil((2.0 - sigma_min) / h)) + 1)
    if not np.any(np.abs(sigmas - 1.0) < 1e-12):
        sigmas = np.sort(np.append(sigmas, 1.0))
    n_t = int(math.ceil(2 * t_max / h)) + 1 if t_max > 0 else 1
    ts = np.linspace(-t_max, t_max, n_t)
    grid = (sigmas[:, None] + 1j * ts[None, :]).ravel()
    vals = np.abs(evaluate_L_batch(chi, grid, tol))
    evaluations = grid.size
    best = int(np.argmax(vals))
    max_abs, argmax = float(vals[best]), complex(grid[best])
    step = h
    for _ in range(3):
        step /= 4.0
        ds = np.linspace(-4 * step, 4 * step, 9)
        local = (argmax + ds[:, None] + 1j * ds[None, :]).ravel()
        keep = ((local.real >= sigma_min) & (local.real <= 2.0)
                & (np.abs(local.imag) <= max(t_max, 0.0)))
        local = local[keep]
        if local.size == 0:
            break
        lv = np.abs(evaluate_L_batch(chi, local, tol))
        evaluations += local.size
        k = int(np.argmax(lv))
        if lv[k] > max_abs:
            max_abs, argmax = float(lv[k]), complex(local[k])
    return SupNormReport(sigma_min, float(t_max), float(resolution), max_abs,
                         argmax, math.log(max_abs), tuple(sigmas), evaluations)


# -- zero scanning ---------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    beta: float
    gamma: float
    residual: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"zero outside critical strip: beta={self.beta}")


@dataclass(frozen=True)
class ZeroScanReport:
    rectangle: tuple
    requested: tuple
    resolution: float
    count: int
    zeros: tuple
    pole_adjusted: bool
    caveat: str
    evaluations: int


_CAVEAT = ("floating-point argument-principle count at the stated resolution; "
           "not certified interval arithmetic")


class _Scanner:
    def __init__(self, ev, tol, resolution):
        self.ev = ev
        self.tol = tol
        self.resolution = resolution
        self.evaluations = 0

    def values(self, pts, want_deriv=False):
        self.evaluations += len(pts)
        return self.ev.batch(np.asarray(pts, dtype=np.complex128), self.tol,
                             want_deriv=want_deriv)

    def _edge_samples(self, rect):
        s1, s2, t1, t2 = rect
        corners = [complex(s1, t1), complex(s2, t1), complex(s2, t2),
                   complex(s1, t2), complex(s1, t1)]
        h0 = max(min(0.05, 0.25 * min(s2 - s1, t2 - t1)), 1e-9)
        pts = []
        for a, b in zip(corners, corners[1:]):
            n = max(4, int(math.ceil(abs(b - a) / h0)))
            pts.extend(a + (b - a) * k / n for k in range(n))
        pts.append(corners[0])
        return pts

    def winding(self, rect):
        """Net argument change / 2pi along the rectangle boundary."""
        pts = self._edge_samples(rect)
        vals = list(self.values(pts))
        floor = 1e-9 * max(rect[1] - rect[0], rect[3] - rect[2])
        for _ in range(60):
            phases = np.angle(np.array(vals))
            d = np.diff(phases)
            d = (d + math.pi) % (2 * math.pi) - math.pi
            bad = np.flatnonzero(np.abs(d) > math.pi / 2)
            if bad.size == 0:
                total = float(d.sum())
                w = total / (2 * math.pi)
                if abs(w - round(w)) > 0.25:
                    raise ResolutionExhausted(
                        f"winding {w:.3f} did not settle on {rect}")
                return int(round(w))
            inserts, positions = [], []
            for i in bad:
                a, b = pts[i], pts[i + 1]
                if abs(b - a) < floor:
                    if min(abs(vals[i]), abs(vals[i + 1])) < math.sqrt(self.tol):
                        raise BoundaryZeroSuspected(
                            f"|L| collapses on the boundary near {a}")
                    continue
                inserts.append((a + b) / 2)
                positions.append(i)
            if not inserts:
                raise ResolutionExhausted(f"phase tracking stalled on {rect}")
            new_vals = self.values(inserts)
            for i, mid, v in zip(reversed(positions), reversed(inserts),
                                 reversed(list(new_vals))):
                pts.insert(i + 1, mid)
                vals.insert(i + 1, v)
        raise ResolutionExhausted(f"boundary refinement exceeded its budget on {rect}")

    def _newton(self, start, rect):
        s1, s2, t1, t2 = rect
        margin = 0.5 * max(s2 - s1, t2 - t1) + self.resolution
        s = complex(start)
        best = None
        for _ in range(60):
            value, deriv = self.values([s], want_deriv=True)
            va, da = complex(value[0]), complex(deriv[0])
            if best is None or abs(va) < best[1]:
                best = (s, abs(va))
            if abs(va) < 1e-11:
                break
            if da == 0:
                return None
            s = s - va / da
            if not (s1 - margin <= s.real <= s2 + margin
                    and t1 - margin <= s.imag <= t2 + margin):
                return None
        s, residual = best
        if residual > 1e-8:
            return None
        slack = self.resolution
        if not (s1 - slack <= s.real <= s2 + slack
                and t1 - slack <= s.imag <= t2 + slack):
            return None
        return Zero(float(s.real), float(s.imag), residual)

    def zeros_in(self, rect, pole):
        """All zeros inside rect; pole is the s=1 pole location if interior."""
        s1, s2, t1, t2 = rect
        pole_in = (pole is not None
                   and s1 < pole.real < s2 and t1 < pole.imag < t2)
        count = self.winding(rect) + (1 if pole_in else 0)
        if count == 0:
            return []
        if count == 1 and not pole_in:
            z = self._newton(complex((s1 + s2) / 2, (t1 + t2) / 2), rect)
            if z is not None:
                return [z]
        if max(s2 - s1, t2 - t1) < self.resolution:
            raise ResolutionExhausted(
                f"cell {rect} still holds winding {count} at the resolution floor")
        horizontal = (s2 - s1) >= (t2 - t1)
        length = (s2 - s1) if horizontal else (t2 - t1)
        last_err = None
        for frac in (0.5, 0.37, 0.63):
            cut = (s1 if horizontal else t1) + frac * length
            if horizontal:
                halves = [(s1, cut, t1, t2), (cut, s2, t1, t2)]
            else:
                halves = [(s1, s2, t1, cut), (s1, s2, cut, t2)]
            try:
                found = []
                for half in halves:
                    found.extend(self.zeros_in(half, pole))
                return found
            except BoundaryZeroSuspected as err:
                last_err = err
                continue
        raise ResolutionExhausted(
            f"no zero-free cut found for {rect}: {last_err}")


def scan_zeros(chi, rectangle, resolution, tol=1e-9):
    """Argument-principle zero census of L(s, chi) on a rectangle.

    The boundary is auto-perturbed to exclude the s=1 pole of principal
    characters; an interior pole is compensated in the winding count.
    """
    s1, s2, t1, t2 = (float(v) for v in rectangle)
    if not (s1 < s2 and t1 < t2):
        raise DegenerateRegion(f"rectangle {rectangle} has no interior")
    ev = _evaluator(chi)
    requested = (s1, s2, t1, t2)
    pole_adjusted = False
    caveat = _CAVEAT
    if ev.has_pole and s1 <= 1.0 <= s2 and t1 <= 0.0 <= t2:
        pole_adjusted = True
        eps = 0.5 * min(resolution, 1e-4)
        if s2 == 1.0:
            s2 = 1.0 - eps
        elif s1 == 1.0:
            s1 = 1.0 + eps
        elif t1 == 0.0 and not t1 < 0.0 < t2:
            t1 = eps
        elif t2 == 0.0 and not t1 < 0.0 < t2:
            t2 = -eps
        if s1 != requested[0] or s2 != requested[1] or t1 != requested[2] or t2 != requested[3]:
            caveat += "; boundary perturbed to exclude the s=1 pole"
    pole = complex(1.0, 0.0) if ev.has_pole else None
    scanner = _Scanner(ev, tol, resolution)
    zeros = scanner.zeros_in((s1, s2, t1, t2), pole)
    seen, unique = set(), []
    for z in sorted(zeros, key=lambda z: (z.gamma, z.beta)):
        key = (round(z.beta, 8), round(z.gamma, 8))
        if key not in seen:
            seen.add(key)
            unique.append(z)
    return ZeroScanReport((s1, s2, t1, t2), requested, float(resolution),
                          len(unique), tuple(unique), pole_adjusted, caveat,
                          scanner.evaluations)


# -- certification ---------------------------------------------------------

@dataclass(frozen=True)
class ZeroFreeCertificate:
    character: str
    theta: float
    phi: float
    c2: float
    rho_disc: float
    hypothesis_phi_theta: bool
    hypothesis_loglog: bool
    chi_square_hypothesis: str
    verdict: str
    zeros: tuple
    exceptional: Optional[Zero]
    scan: Optional[ZeroScanReport]


def taxonomy_verdict(order, zeros, resolution, simple_flags):
    """Classify a disc scan per the at-most-one-real-simple-zero taxonomy."""
    if not zeros:
        return "zero-free"
    if order > 2:
        return f"violation: {len(zeros)} zero(s) found for a complex character"
    if len(zeros) > 1:
        return f"violation: {len(zeros)} zeros in the disc"
    z = zeros[0]
    if abs(z.gamma) >= resolution:
        return f"violation: nonreal zero at {z.beta}+{z.gamma}i for an order-2 character"
    if not simple_flags[0]:
        return f"violation: zero at beta={z.beta} is not simple"
    return f"one real zero at beta={z.beta:.8f}"


def certify_zero_free(chi, theta, phi, c2=0.05, t_cap=1.0, resolution=1e-3,
                      tol=1e-9):
    """Scan the disc region sigma >= 1 - c2*theta/phi, |t| <= t_cap.

    Hypothesis inequalities are recorded as booleans against the raw phi,
    never enforced.  A measured phi below 1 is lifted to 1 for the radius:
    that is the smallest value meeting the phi >= 1 hypothesis, and it still
    bounds |L| since e^1 exceeds the measured sup.  The verdict follows the
    order-based taxonomy.
    """
    if chi.is_principal:
        raise PoleAtOne("certification is for non-principal characters")
    phi_used = max(float(phi), 1.0)
    rho = c2 * theta / phi_used
    if rho <= 0:
        raise ConstraintViolated(f"disc radius {rho} must be positive")
    q = chi.modulus
    hyp_phi = bool(phi * math.exp(-phi) <= theta <= 1.0 <= phi)
    hyp_loglog = bool(phi >= theta * (1.0 + math.log(math.log(3 * q))))
    chi_sq = "not-applicable" if chi.order == 2 else "not-checked"
    rect = (1.0 - rho, 1.0 + rho, -t_cap, t_cap)
    scan = None
    try:
        scan = scan_zeros(chi, rect, resolution, tol)
        zeros = list(scan.zeros)
        flags = []
        for z in zeros:
            if chi.order == 2 and abs(z.gamma) < resolution:
                delta = max(resolution, 1e-4)
                lo = evaluate_L(chi, complex(z.beta - delta, 0.0), tol)
                hi = evaluate_L(chi, complex(z.beta + delta, 0.0), tol)
                flags.append(bool(lo.real * hi.real < 0))
            else:
                # isolation in a winding-1 cell already implies multiplicity 1
                flags.append(True)
        verdict = taxonomy_verdict(chi.order, zeros, resolution, flags)
    except ResolutionExhausted as err:
        zeros = []
        verdict = f"violation: unresolved zero cluster ({err})"
    exceptional = zeros[0] if verdict.startswith("one real zero") else None
    return ZeroFreeCertificate(chi.label, float(theta), float(phi), float(c2),
                               rho, hyp_phi, hyp_loglog, chi_sq, verdict,
                               tuple(zeros), exceptional, scan)


@dataclass(frozen=True)
class PairExclusionReport:
    counts: tuple
    which: str
    violation: bool
    vacuous: bool
    scans: Optional[tuple]


def pair_exclusion(chi1, chi2, region, resolution=1e-3, tol=1e-9):
    """Scan two order-2 L-functions; at most one may hold a zero."""
    if chi1.modulus != chi2.modulus:
        raise ConstraintViolated("pair exclusion requires a common modulus")
    if chi1.order != 2 or chi2.order != 2:
        raise ConstraintViolated("pair exclusion requires two order-2 characters")
    if chi1 == chi2:
        raise ConstraintViolated("the two characters must be distinct")
    s1, s2, t1, t2 = (float(v) for v in region)
    if s1 > s2 or t1 > t2:
        raise DegenerateRegion(f"region {region} is reversed")
    if s1 == s2 or t1 == t2:
        return PairExclusionReport((0, 0), "neither", False, True, None)
    r1 = scan_zeros(chi1, region, resolution, tol)
    r2 = scan_zeros(chi2, region, resolution, tol)
    counts = (r1.count, r2.count)
    which = {(False, False): "neither", (True, False): "first",
             (False, True): "second", (True, True): "both"}[
        (r1.count > 0, r2.count > 0)]
    return PairExclusionReport(counts, which, which == "both", False, (r1, r2))


# -- positivity partial sums -----------------------------------------------

def three_four_one_partial(chi, sigma0, t, N):
    """Truncated 3-4-1 sum: sum Lambda(n) n^-sigma0 (3 + 4cos + cos2) over
    n <= N coprime to the modulus; termwise nonnegative."""
    if sigma0 <= 1:
        raise ConstraintViolated("the series requires sigma0 > 1")
    N = int(N)
    if N < 2:
        return 0.0
    lam = mangoldt_table(N)
    n = np.flatnonzero(lam > 0)
    v = chi.values_at(n)
    keep = v != 0
    n, v = n[keep], v[keep]
    if n.size == 0:
        return 0.0
    phase = v * np.exp(-1j * t * np.log(n.astype(np.float64)))
    term = 3.0 + 4.0 * phase.real + (phase * phase).real
    # analytically 2(1+cos)^2 >= 0; floor away negative float dust
    term = np.maximum(term, 0.0)
    return float(np.sum(lam[n] * n.astype(np.float64) ** (-sigma0) * term))
