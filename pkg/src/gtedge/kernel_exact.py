"""The exact finite-n correlation kernel K_n of the uniform interlacing
process with fixed top row, its conjugations B_n and A_{t,n}, the equivalent
kernel, the correction term alpha_n, and the edge-rescaled kernel.

K_n((un,rn),(vn,sn)) = -phi_{rn,sn}(un,vn)
    + (n-sn)!/(n-rn-1)! * sum_{k: x_k >= un} sum_{l=vn+sn-n}^{vn}
      prod_{j=un+rn-n+1}^{un-1}(x_k-j) / prod_{j != l}(l-j)
      * prod_{i != k}(l-x_i)/(x_k-x_i).

Three evaluation modes share one exact big-integer core: Fraction output
(n <= 64), numpy signed-log floats with automatic escalation when the
alternating sum cancels, and signed-log output of the exact accumulation at
any n.  The window sums cancel by ~n bits, which rules out any fixed working
precision at large n; only the float fast path takes that risk, and it
escalates on its own cancellation diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpz
from scipy.special import gammaln

from .measures import RegionTag
from .numerics import SignedLog, signed_logsumexp

__all__ = [
    "DomainViolation",
    "Degenerate",
    "KernelValue",
    "phi",
    "phi_exact",
    "kernel_Kn",
    "conj_Bn",
    "conj_Bn_exact",
    "conj_Atn",
    "kernel_equiv",
    "alpha_n",
    "rescaled_kernel",
]

RATIONAL_MAX_N = 64
ESCALATE_BITS = 12


class DomainViolation(Exception):
    """Query outside 1 <= rn,sn <= n-1, un >= x_n+n-rn, vn >= x_n+n-sn."""


class Degenerate(Exception):
    """t coincides with chi_n or chi_n + eta_n - 1."""


@dataclass(frozen=True)
class KernelValue:
    """A kernel evaluation with its provenance and cancellation diagnostic."""

    value: SignedLog
    mode: str                    # ExactRational | FloatLog | Mpfr
    cancellation_bits: int
    exact: object = None         # Fraction in ExactRational mode

    def to_float(self):
        return self.value.to_float()


# ---------------------------------------------------------------------------
# combinatorial factor


def phi_exact(r, s, u, v):
    """One-step transition count: 0 for v<u or s<=r, else the binomial
    C(v-u+s-r-1, s-r-1) (which is 1 when s = r+1)."""
    if v < u or s <= r:
        return 0
    return math.comb(v - u + s - r - 1, s - r - 1)


def phi(r, s, u, v):
    return SignedLog.from_int(phi_exact(r, s, u, v))


# ---------------------------------------------------------------------------
# K_n in three modes


def _check_domain(x, un, rn, vn, sn):
    n = x.n
    if not (1 <= rn <= n - 1 and 1 <= sn <= n - 1):
        raise DomainViolation(f"rows (rn, sn)=({rn}, {sn}) outside [1, {n - 1}]")
    x_min = x.x[-1]
    if un < x_min + n - rn or vn < x_min + n - sn:
        raise DomainViolation(
            f"positions (un, vn)=({un}, {vn}) below (x_n+n-rn, x_n+n-sn)="
            f"({x_min + n - rn}, {x_min + n - sn})")


def _integer_terms(x, un, rn, vn, sn):
    """Exact integer core of the kernel sum.

    Returns (phi, terms) with phi the transition count and terms a list of
    (numerator, denominator) big-integer pairs, one per particle x_k >= un.
    The alternating window sums S_k cancel by ~0.8 n bits and the k terms by
    a further ~0.2 n bits, so every intermediate stays exact here; rounding
    is the caller's business.
    """
    n = x.n
    xs = x.x
    w_lo = vn + sn - n
    window = range(w_lo, vn + 1)
    E = {}
    for l in window:
        e = mpz(1)
        for xi in xs:
            e = e * (l - xi)
        E[l] = e
    m_s = n - sn
    coefs = {l: mpz((-1) ** (m_s - (l - w_lo)) * math.comb(m_s, l - w_lo))
             for l in window}
    fact_r = mpz(math.factorial(n - rn - 1))
    terms = []
    for k0, xk in enumerate(xs):
        if xk < un:
            break
        Nk = mpz(1)
        for m in range(xk - un + 1, xk - un + n - rn):
            Nk = Nk * m
        Qk = mpz(1)
        for i0, xi in enumerate(xs):
            if i0 != k0:
                Qk = Qk * (xk - xi)
        Sk = mpz(0)
        for l in window:
            if l == xk:
                Sk += coefs[l] * Qk
            elif E[l] != 0:
                Sk += coefs[l] * (E[l] // (l - xk))
        terms.append((int(Nk * Sk), int(fact_r * Qk)))
    return phi_exact(rn, sn, un, vn), terms


def _kernel_rational(x, un, rn, vn, sn):
    phi0, terms = _integer_terms(x, un, rn, vn, sn)
    total = Fraction(-phi0)
    for num, den in terms:
        total += Fraction(num, den)
    return total


def _kernel_floatlog(x, un, rn, vn, sn):
    n = x.n
    xs = np.asarray(x.x, dtype=np.int64)
    w_lo = vn + sn - n
    ls = np.arange(w_lo, vn + 1, dtype=np.int64)
    L = ls.size
    diffs = ls[:, None] - xs[None, :]
    zero_mask = diffs == 0
    absd = np.where(zero_mask, 1, np.abs(diffs)).astype(float)
    logE = np.sum(np.log(absd), axis=1)
    signE = np.prod(np.where(diffs < 0, -1, 1), axis=1)
    row_has_zero = zero_mask.any(axis=1)
    m_s = n - sn
    idx = np.arange(L, dtype=float)
    log_coef = gammaln(m_s + 1) - gammaln(idx + 1) - gammaln(m_s - idx + 1)
    sign_coef = np.where((m_s - np.arange(L)) % 2 == 0, 1, -1)
    logs = [np.array([math.log(p)]) if (p := phi_exact(rn, sn, un, vn)) > 0
            else np.array([])]
    signs = [np.array([-1.0]) if logs[0].size else np.array([])]
    lg_fact_r = gammaln(n - rn)
    for k0, xk in enumerate(x.x):
        if xk < un:
            break
        log_nk = gammaln(xk - un + n - rn) - gammaln(xk - un + 1)
        dk = xk - xs
        dk_other = np.concatenate([dk[:k0], dk[k0 + 1:]]).astype(float)
        log_qk = float(np.sum(np.log(np.abs(dk_other))))
        sign_qk = -1 if k0 % 2 else 1
        hits = ls == xk
        d_lk = (ls - xk).astype(float)
        safe_d = np.where(hits, 1.0, np.abs(d_lk))
        log_g = np.where(hits, log_qk, logE - np.log(safe_d))
        sign_g = np.where(hits, sign_qk,
                          signE * np.where(d_lk < 0, -1, 1))
        dead = row_has_zero & ~hits
        sign_t = np.where(dead, 0, sign_coef * sign_g * sign_qk)
        log_t = (log_nk - lg_fact_r - log_qk) + log_coef + log_g
        keep = sign_t != 0
        logs.append(log_t[keep])
        signs.append(sign_t[keep].astype(float))
    all_logs = np.concatenate(logs)
    all_signs = np.concatenate(signs)
    if all_logs.size == 0:
        return SignedLog.zero(), 0
    return signed_logsumexp(all_logs, all_signs)


def _log2_fraction(fr):
    """log2 |fr| to within ~1 bit (diagnostic use)."""
    return fr.numerator.bit_length() - fr.denominator.bit_length()


def _kernel_mpfr(x, un, rn, vn, sn, precision_bits):
    """Exact accumulation of the integer core, rounded once at the end.

    The window sums lose ~n bits to cancellation, so no fixed working
    precision survives large n; precision_bits is honored as a floor (the
    returned log-magnitude carries the full exact value to float rounding).
    """
    phi0, terms = _integer_terms(x, un, rn, vn, sn)
    total = Fraction(-phi0)
    peak = abs(total)
    for num, den in terms:
        term = Fraction(num, den)
        if abs(term) > peak:
            peak = abs(term)
        total += term
    if total == 0:
        return SignedLog.zero(), 0
    bits = 0
    if peak != 0:
        bits = max(0, _log2_fraction(peak) - _log2_fraction(abs(total)) + 1)
    return SignedLog.from_fraction(total), bits


def kernel_Kn(x, un, rn, vn, sn, mode="auto", precision_bits=256):
    """The kernel K_n at ((un, rn), (vn, sn)) for top row x.

    mode: "rational" (exact Fraction result, n <= 64), "floatlog" (numpy
    signed logs, escalated to the exact core when cancellation exceeds
    ESCALATE_BITS), "mpfr" (exact core, signed-log result, any n), or
    "auto" (= floatlog).
    """
    _check_domain(x, un, rn, vn, sn)
    if mode == "rational":
        if x.n > RATIONAL_MAX_N:
            raise ValueError(f"rational mode limited to n <= {RATIONAL_MAX_N}")
        val = _kernel_rational(x, un, rn, vn, sn)
        return KernelValue(value=SignedLog.from_fraction(val),
                           mode="ExactRational", cancellation_bits=0,
                           exact=val)
    if mode == "mpfr":
        value, bits = _kernel_mpfr(x, un, rn, vn, sn, precision_bits)
        return KernelValue(value=value, mode="Mpfr", cancellation_bits=bits)
    if mode in ("auto", "floatlog"):
        value, bits = _kernel_floatlog(x, un, rn, vn, sn)
        if bits > ESCALATE_BITS:
            value, _ = _kernel_mpfr(x, un, rn, vn, sn, precision_bits)
        return KernelValue(value=value, mode="FloatLog",
                           cancellation_bits=bits)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# conjugation factors


def conj_Bn_exact(n, r, s):
    """B_n(r, s) = (n-s)!/(n-r)! * n^(s-r) as an exact Fraction."""
    if not (1 <= r <= n and 1 <= s <= n):
        raise ValueError("need 1 <= r, s <= n")
    val = Fraction(math.factorial(n - s), math.factorial(n - r))
    return val * Fraction(n) ** (s - r)


def conj_Bn(n, r, s):
    if not (1 <= r <= n and 1 <= s <= n):
        raise ValueError("need 1 <= r, s <= n")
    logmag = (gammaln(n - s + 1) - gammaln(n - r + 1)
              + (s - r) * math.log(n))
    return SignedLog(1, float(logmag))


def conj_Atn(ctx, U, R, V, S):
    """The conjugation factor A_{t,n}((U,R),(V,S)) in signed-log form.

    Power factors (t-chi_n)^-(V-U), (t-chi_n-eta_n+1)^(V+S-U-R) with integer
    exponents, times two exponential factors with quadratic and cubic
    rescaled-coordinate differences.
    """
    t, n = ctx.t, ctx.n
    d1 = t - ctx.chi_n
    d2 = t - ctx.chi_n - ctx.eta_n + 1.0
    if d1 == 0.0 or d2 == 0.0:
        raise Degenerate(f"t={t} coincides with chi_n or chi_n+eta_n-1")
    e1 = -(V - U)
    e2 = (V + S) - (U + R)
    sign = 1
    if d1 < 0 and e1 % 2:
        sign = -sign
    if d2 < 0 and e2 % 2:
        sign = -sign
    logmag = e1 * math.log(abs(d1)) + e2 * math.log(abs(d2))
    av, au = V / n - ctx.chi_n, U / n - ctx.chi_n
    bv = (V + S) / n - ctx.chi_n - ctx.eta_n
    bu = (U + R) / n - ctx.chi_n - ctx.eta_n
    logmag += (n / 2.0) * (av ** 2 - au ** 2) / d1
    logmag -= (n / 2.0) * (bv ** 2 - bu ** 2) / d2
    logmag += (n / 6.0) * (av ** 3 - au ** 3) / d1 ** 2
    logmag -= (n / 6.0) * (bv ** 3 - bu ** 3) / d2 ** 2
    return SignedLog(sign, logmag)


# ---------------------------------------------------------------------------
# equivalent kernel, correction term, rescaled kernel


def kernel_equiv(ctx, qp, mode="auto", precision_bits=256):
    """The conjugated kernel whose determinants match K_n's:
    K_n((vn,sn),(un,rn)) / (B_n(sn,rn) * A_{t,n}((vn,sn),(un,rn)))."""
    kv = kernel_Kn(ctx.x, qp.vn, qp.sn, qp.un, qp.rn,
                   mode=mode, precision_bits=precision_bits)
    b = conj_Bn(ctx.n, qp.sn, qp.rn)
    a = conj_Atn(ctx, qp.vn, qp.sn, qp.un, qp.rn)
    value = kv.value / b / a
    return KernelValue(value=value, mode=kv.mode,
                       cancellation_bits=kv.cancellation_bits, exact=None)


def alpha_n(ctx, qp):
    """The nonnegative correction term of the edge rescaling, region by region.

    Each branch is an indicator times a factorial ratio over
    |A_{t,n}((vn,sn),(un,rn))| * B_n(sn,rn).
    """
    un, rn, vn, sn = qp.un, qp.rn, qp.vn, qp.sn
    region = ctx.region
    if region is RegionTag.MuPlus:
        live = un >= vn and rn > sn
        if not live:
            return SignedLog.zero()
        lognum = (gammaln(un + rn - vn - sn) - gammaln(rn - sn)
                  - gammaln(un - vn + 1))
    elif region is RegionTag.LambdaMinusMu:
        live = un >= vn and un + rn <= vn + sn and rn <= sn
        if not live:
            return SignedLog.zero()
        lognum = (gammaln(sn - rn + 1) - gammaln(un - vn + 1)
                  - gammaln(vn + sn - un - rn + 1))
    elif region is RegionTag.MuMinus:
        live = un + rn <= vn + sn and rn > sn
        if not live:
            return SignedLog.zero()
        lognum = (gammaln(vn - un) - gammaln(rn - sn)
                  - gammaln(vn + sn - un - rn + 1))
    else:
        raise ValueError(f"region {region} carries no correction term")
    a = abs(conj_Atn(ctx, vn, sn, un, rn))
    b = conj_Bn(ctx.n, sn, rn)
    return SignedLog(1, float(lognum)) / a / b


def rescaled_kernel(ctx, qp, mode="auto", precision_bits=256):
    """n^(1/3)/beta times the equivalent kernel (particle regions) or times
    the complementary kernel 1_(un=vn) - kernel (hole region)."""
    kv = kernel_equiv(ctx, qp, mode=mode, precision_bits=precision_bits)
    n13 = ctx.n ** (1 / 3)
    beta = ctx.edge.beta
    if ctx.region is RegionTag.LambdaMinusMu:
        ind = SignedLog.one() if qp.un == qp.vn else SignedLog.zero()
        return (ind - kv.value).to_float() * n13 / beta
    return kv.value.to_float() * n13 / beta
