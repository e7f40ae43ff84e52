"""Euler-Maclaurin machinery behind the L evaluators.

Splits sum_{n>=0} (n+x)^{-s} into a direct block plus a tail expansion at
w = N + x:

    w^(1-s)/(s-1) + w^(-s)/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} w^(-s-2j+1)

with the order fixed at J=12 and N chosen adaptively from the remainder
bound.  The pole piece 1/(s-1) is split off analytically so non-principal
character sums cancel it exactly and the principal case adds it back once.
"""

import math

import numpy as np

from . import _jit
from .errors import PrecisionBudgetExceeded

# B_2 .. B_26 over (2j)!; B_26 feeds the remainder estimate only
_B2J = [
    (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730), (7, 6),
    (-3617, 510), (43867, 798), (-174611, 330), (854513, 138),
    (-236364091, 2730), (8553103, 6),
]
EM_ORDER = 12
_COEFF = [num / (den * math.factorial(2 * j + 2)) for j, (num, den) in enumerate(_B2J)]
_N_CAP = 1 << 18


def _log_remainder(sigma, t_abs, n_base):
    """log of the J+1 tail term bound at w = n_base, worst case over the batch."""
    s_abs = math.hypot(max(abs(sigma), 1.0), t_abs)
    out = math.log(abs(_COEFF[EM_ORDER]))
    for i in range(2 * EM_ORDER + 2):
        out += math.log(s_abs + i)
    out -= (sigma + 2 * EM_ORDER + 1) * math.log(n_base)
    return out


def choose_block_length(sigma_min, t_abs_max, tol, scale=1.0):
    """Smallest direct-block length N whose tail bound is below tol/scale."""
    target = math.log(tol / (2.0 * scale))
    n = 32
    while n <= _N_CAP:
        if _log_remainder(sigma_min, t_abs_max, n) <= target:
            return n
        n *= 2
    raise PrecisionBudgetExceeded(
        f"Euler-Maclaurin block exceeds {_N_CAP} points for "
        f"sigma>={sigma_min}, |t|<={t_abs_max}, tol={tol}")


def _phi_pair(z):
    """phi(z) = (e^z - 1)/z and phi'(z), elementwise, stable at z = 0."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 0.25
    out = np.empty_like(z)
    dout = np.empty_like(z)
    zb = z[~small]
    if zb.size:
        e = np.exp(zb)
        out[~small] = (e - 1.0) / zb
        dout[~small] = (e * (zb - 1.0) + 1.0) / zb**2
    zs = z[small]
    if zs.size:
        # phi = sum z^k/(k+1)!, phi' = sum k z^(k-1)/(k+1)!
        acc = np.ones_like(zs)
        dacc = np.full_like(zs, 0.5)
        zk = np.ones_like(zs)
        for k in range(1, 14):
            zk = zk * zs
            acc += zk / math.factorial(k + 1)
            dacc += (k + 1) * zk / math.factorial(k + 2)
        out[small] = acc
        dout[small] = dacc
    return out, dout


def em_tail(s, w, want_deriv=False):
    """Tail values T(s, w) for each s (rows) and block edge w (columns).

    The 1/(s-1) pole piece is excluded; callers re-add it weighted by the
    full character sum.  Returns T, or (T, dT/ds) when want_deriv.
    """
    s = np.asarray(s, dtype=np.complex128).reshape(-1, 1)
    w = np.asarray(w, dtype=np.float64).reshape(1, -1)
    logw = np.log(w)
    w_ms = np.exp(-s * logw)                       # w^{-s}
    u = s - 1.0
    phi, dphi = _phi_pair(-u * logw)
    t_val = -logw * phi + 0.5 * w_ms
    if want_deriv:
        t_der = logw**2 * dphi - 0.5 * logw * w_ms

    poch = np.ones_like(s)
    dpoch = np.zeros_like(s)
    w_pow = w_ms / w                               # w^{-s-2j+1} at j=1
    i = 0
    for j in range(1, EM_ORDER + 1):
        # extend (s)_{2j-1} = s(s+1)...(s+2j-2) and d/ds of it
        while i < 2 * j - 1:
            dpoch = dpoch * (s + i) + poch
            poch = poch * (s + i)
            i += 1
        c = _COEFF[j - 1]
        t_val = t_val + c * poch * w_pow
        if want_deriv:
            t_der = t_der + c * (dpoch - poch * logw) * w_pow
        w_pow = w_pow / w**2
    return (t_val, t_der) if want_deriv else t_val


def _direct_sums_numpy(s, logm, weights):
    out = np.zeros(s.shape[0], dtype=np.complex128)
    block = max(1, (1 << 21) // max(1, logm.shape[0]))
    for lo in range(0, s.shape[0], block):
        sb = s[lo:lo + block]
        out[lo:lo + block] = np.exp(-sb[:, None] * logm[None, :]) @ weights
    return out


@_jit.njit(parallel=True)
def _direct_sums_jit(s, logm, weights):
    out = np.empty(s.shape[0], dtype=np.complex128)
    for k in _jit.prange(s.shape[0]):
        acc = 0.0 + 0.0j
        sk = s[k]
        for m in range(logm.shape[0]):
            acc += weights[m] * np.exp(-sk * logm[m])
        out[k] = acc
    return out


_direct_sums = _jit.select(_direct_sums_jit, _direct_sums_numpy)


def direct_sums(s, logm, weights):
    """sum_m weights[m] * exp(-s*logm[m]) for each point in s."""
    s = np.ascontiguousarray(s, dtype=np.complex128)
    logm = np.ascontiguousarray(logm, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    return _direct_sums(s, logm, weights)
