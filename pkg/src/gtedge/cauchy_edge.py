"""Cauchy transforms with analytic extensions, edge curves, liquid-region
membership, and the 12-case classification of edge parameters.

All integrals against the piecewise-polynomial density are closed-form: each
piece is Taylor-shifted to the evaluation point, leaving power and principal-log
endpoint terms.  On a horizontal integration path the imaginary part of x - w
is constant, so the principal branch never jumps mid-piece.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .measures import (
    OutOfPolygon,
    RegionTag,
    classify_t,
    region_interval,
    support_sets,
)
from .numerics import BoundaryZero, count_roots

__all__ = [
    "OnSupport",
    "OnSupportS",
    "DegenerateEdge",
    "NotTypical",
    "TOnSupport",
    "AssumptionViolated",
    "EpsViolation",
    "EdgePoint",
    "IntervalLt",
    "cauchy",
    "cauchy_derivative",
    "cauchy_ext",
    "cauchy_ext_all",
    "edge_point",
    "classify_case",
    "edge_nonasymptotic",
    "discrete_cauchy_all",
    "f_derivatives",
    "f_prime_vec",
    "liquid_region_test",
    "locate_Lt",
]

MULT_TOL = 1e-8           # third-derivative threshold for multiplicity 3
DEGENERATE_CPRIME = 1e-13


class OnSupport(Exception):
    """Evaluation point lies on the support of mu."""


class OnSupportS(Exception):
    """Evaluation point lies on S = S1 u S2 u S3 (or on R for k=0)."""


class DegenerateEdge(Exception):
    """|C'(t)| too small for the edge-curve formulas."""


class NotTypical(Exception):
    """Multiplicity 3, or the gap containing t escapes the J/K taxonomy."""


class TOnSupport(Exception):
    """t lies on S."""


class AssumptionViolated(Exception):
    """A fired case (4, 5, 8, 9) fails its support-avoidance assumption."""


class EpsViolation(Exception):
    """t is within eps of its region boundary (or collides with a particle)."""


# ---------------------------------------------------------------------------
# closed-form piece integrals


def _taylor_shift(coeffs, w):
    """Coefficients a_j with p(x) = sum_j a_j (x - w)^j."""
    a = [complex(c) for c in coeffs]
    m = len(a)
    for j in range(m):
        for i in range(m - 2, j - 1, -1):
            a[i] += w * a[i + 1]
    return a


def _pow_diff(d_hi, d_lo, delta, p):
    """d_hi**p - d_lo**p factored through delta = d_hi - d_lo.

    The factored form stays accurate when both endpoints are far from the
    pole and their powers nearly cancel.
    """
    m = abs(p)
    s = sum(d_hi ** i * d_lo ** (m - 1 - i) for i in range(m))
    if p > 0:
        return delta * s
    return -delta * s / (d_hi ** m * d_lo ** m)


def _piece_integral(coeffs, lo, hi, w, k):
    """Integral of p(x)/(w - x)^k over [lo, hi], k >= 1, w not in [lo, hi]."""
    if all(c == 0 for c in coeffs):
        return 0j
    a = _taylor_shift(coeffs, w)
    d_hi = complex(hi) - w
    d_lo = complex(lo) - w
    delta = complex(hi - lo)
    on_axis = w.imag == 0
    out = 0j
    for j, aj in enumerate(a):
        if aj == 0:
            continue
        p = j - k + 1
        if p == 0:
            if on_axis:
                out += aj * math.log1p((hi - lo) / d_lo.real)
            else:
                out += aj * (cmath.log(d_hi) - cmath.log(d_lo))
        else:
            out += aj * _pow_diff(d_hi, d_lo, delta, p) / p
    return out * (-1) ** k


def _piece_log_integral(coeffs, lo, hi, w):
    """Integral of p(x) * Log(w - x) over [lo, hi] for w off the real axis.

    By parts with the antiderivative P vanishing at lo:
    [P * Log(w - x)] + integral of P(x)/(w - x).
    """
    if all(c == 0 for c in coeffs):
        return 0j
    P = [0.0] * (len(coeffs) + 1)
    for j, c in enumerate(coeffs):
        P[j + 1] = c / (j + 1)
    P[0] = -sum(P[j] * lo ** j for j in range(1, len(P)))
    P_hi = sum(P[j] * hi ** j for j in range(len(P)))
    return P_hi * cmath.log(w - hi) + _piece_integral(P, lo, hi, w, 1)


def _windowed(pieces, win_lo, win_hi):
    """Pieces clipped to a window, dropping empty remainders."""
    out = []
    for lo, hi, coeffs in pieces:
        l, h = max(lo, win_lo), min(hi, win_hi)
        if l < h:
            out.append((l, h, coeffs))
    return out


def _dist_to_intervals(ivals, t):
    best = math.inf
    for lo, hi in ivals:
        best = min(best, max(lo - t, t - hi, 0.0))
    return best


def _in_closed(ivals, t, tol=0.0):
    return any(lo - tol <= t <= hi + tol for lo, hi in ivals)


# ---------------------------------------------------------------------------
# Cauchy transform and analytic extensions


def cauchy(mu, w):
    """C(w) = integral of mu[dx]/(w - x), closed form per piece."""
    w = complex(w)
    if w.imag == 0 and _in_closed(mu.supp_mu_intervals(), w.real):
        raise OnSupport(f"w={w.real} lies on Supp(mu)")
    return sum(_piece_integral(c, lo, hi, w, 1) for lo, hi, c in mu.pieces)


def cauchy_derivative(mu, w, m):
    """C^(m)(w) = (-1)^m m! * integral of mu[dx]/(w - x)^(m+1)."""
    w = complex(w)
    if w.imag == 0 and _in_closed(mu.supp_mu_intervals(), w.real):
        raise OnSupport(f"w={w.real} lies on Supp(mu)")
    if m == 0:
        return cauchy(mu, w)
    val = sum(_piece_integral(c, lo, hi, w, m + 1) for lo, hi, c in mu.pieces)
    return (-1) ** m * math.factorial(m) * val


def cauchy_ext_all(mu, t, region=None, I=None, kmax=3):
    """(e^{C(t)}, (C'(t), ..., C^(kmax)(t))) through the analytic extension.

    Off the support this is the plain transform.  Inside a density-1 interval
    the extension through any subinterval I = (t2, t1) containing t gives
    e^C = e^{C_I}(t-t2)/(t-t1) < 0, with derivative corrections from the two
    log endpoints; the result is independent of the choice of I.
    """
    t = float(t)
    if region is None:
        region = classify_t(mu, t)
    if region in (RegionTag.MuPlus, RegionTag.MuMinus):
        c0 = cauchy(mu, t).real
        derivs = []
        for m in range(1, kmax + 1):
            val = sum(_piece_integral(c, lo, hi, complex(t), m + 1)
                      for lo, hi, c in mu.pieces)
            derivs.append(((-1) ** m * math.factorial(m) * val).real)
        return math.exp(c0), tuple(derivs)
    if region is not RegionTag.LambdaMinusMu:
        raise ValueError(f"t={t} is not in a classified open region")
    if I is None:
        for lo, hi in mu.full_density_intervals():
            if lo < t < hi:
                I = (lo, hi)
                break
    t2, t1 = I
    if not t2 < t < t1:
        raise ValueError(f"extension interval {I} does not contain t={t}")
    clipped = []
    for lo, hi, coeffs in mu.pieces:
        for l, h in ((lo, min(hi, t2)), (max(lo, t1), hi)):
            if l < h:
                clipped.append((l, h, coeffs))
    c_rest = sum(_piece_integral(c, lo, hi, complex(t), 1)
                 for lo, hi, c in clipped).real
    exp_c = math.exp(c_rest) * (t - t2) / (t - t1)
    derivs = []
    for m in range(1, kmax + 1):
        val = sum(_piece_integral(c, lo, hi, complex(t), m + 1)
                  for lo, hi, c in clipped)
        base = ((-1) ** m * math.factorial(m) * val).real
        corr = (-1) ** (m - 1) * math.factorial(m - 1) * (
            (t - t2) ** -m - (t - t1) ** -m)
        derivs.append(base + corr)
    return exp_c, tuple(derivs)


def cauchy_ext(mu, t, region=None, I=None):
    """(e^{C(t)}, C'(t)) through the analytic extension (see cauchy_ext_all)."""
    exp_c, derivs = cauchy_ext_all(mu, t, region=region, I=I, kmax=1)
    return exp_c, derivs[0]


# ---------------------------------------------------------------------------
# edge curve and classification


@dataclass(frozen=True)
class EdgePoint:
    """One point of the edge curve with its local classification data."""

    t: float
    region: RegionTag
    chi: float
    eta: float
    expC: float
    Cprime: float
    f3: float
    multiplicity: int
    case_id: int
    beta: float
    tangent: tuple
    normal: tuple


@dataclass(frozen=True)
class IntervalLt:
    """The maximal open interval of R \\ S containing t, with its taxonomy kind."""

    lo: float
    hi: float
    kind: str       # J1 | J2 | J3 | J4 | GapK1 | GapK2 | GapK3


def locate_Lt(mu, chi, eta, t):
    """Locate t's maximal open interval in the complement of S1 u S2 u S3."""
    S = support_sets(mu, chi, eta)
    allS = S.all_intervals()
    if _in_closed(allS, t):
        raise TOnSupport(f"t={t} lies on S")
    gap_lo, gap_hi = -math.inf, math.inf
    for lo, hi in allS:
        if hi <= t:
            gap_lo = max(gap_lo, hi)
        if lo >= t:
            gap_hi = min(gap_hi, lo)
    if S.S1 and t > S.sup1():
        return IntervalLt(S.sup1(), math.inf, "J1")
    if S.S3 and t < S.inf3():
        return IntervalLt(-math.inf, S.inf3(), "J2")
    if S.S1 and S.S2 and S.sup2() <= gap_lo and gap_hi <= S.inf1() \
            and S.sup2() < t < S.inf1():
        return IntervalLt(S.sup2(), S.inf1(), "J3")
    if S.S2 and S.S3 and S.sup3() <= gap_lo and gap_hi <= S.inf2() \
            and S.sup3() < t < S.inf2():
        return IntervalLt(S.sup3(), S.inf2(), "J4")
    for ivals, kind in ((S.S1, "GapK1"), (S.S2, "GapK2"), (S.S3, "GapK3")):
        if ivals and ivals[0][0] < t < ivals[-1][1]:
            return IntervalLt(gap_lo, gap_hi, kind)
    raise NotTypical(f"gap containing t={t} is outside the J/K taxonomy")


_CASE_TABLE = {
    (RegionTag.MuPlus, "J1", 1): 1,
    (RegionTag.MuPlus, "GapK1", 1): 2,
    (RegionTag.MuPlus, "GapK1", -1): 3,
    (RegionTag.MuPlus, "J3", -1): 4,
    (RegionTag.LambdaMinusMu, "J3", -1): 5,
    (RegionTag.LambdaMinusMu, "GapK2", -1): 6,
    (RegionTag.LambdaMinusMu, "GapK2", 1): 7,
    (RegionTag.LambdaMinusMu, "J4", 1): 8,
    (RegionTag.MuMinus, "J4", 1): 9,
    (RegionTag.MuMinus, "GapK3", 1): 10,
    (RegionTag.MuMinus, "GapK3", -1): 11,
    (RegionTag.MuMinus, "J2", -1): 12,
}


def _check_asscases(mu, case_id, chi, eta):
    lower = chi + eta - 1
    supp = mu.supp_mu_intervals()
    holes = mu.supp_lambda_minus_mu_intervals()
    bad = (
        (case_id == 4 and _in_closed(supp, chi)) or
        (case_id == 5 and _in_closed(holes, chi)) or
        (case_id == 8 and _in_closed(holes, lower)) or
        (case_id == 9 and _in_closed(supp, lower))
    )
    if bad:
        raise AssumptionViolated(
            f"case {case_id}: edge point touches the forbidden support set")


def edge_point(mu, t, allow_atypical=False):
    """Edge-curve point (chi_E, eta_E) at parameter t, with case data.

    chi_E = t + (e^C - 1)/(e^C C'), eta_E = 1 + (e^C - 1)^2/(e^C C').
    """
    t = float(t)
    region = classify_t(mu, t)
    if region is RegionTag.Unclassifiable:
        raise ValueError(f"t={t} is not inside a classified open region")
    exp_c, (c1, c2, c3) = cauchy_ext_all(mu, t, region=region, kmax=3)
    if abs(c1) < DEGENERATE_CPRIME:
        raise DegenerateEdge(f"|C'({t})| = {abs(c1)} below {DEGENERATE_CPRIME}")
    if region is RegionTag.LambdaMinusMu:
        em1 = exp_c - 1.0
    else:
        # expm1 keeps e^C - 1 accurate when C(t) ~ 1/t far from the support
        em1 = math.expm1(cauchy(mu, t).real)
    chi = t + em1 / (exp_c * c1)
    eta = 1 + em1 ** 2 / (exp_c * c1)
    if not (mu.b > chi > chi + eta - 1 > mu.a):
        raise OutOfPolygon(
            f"edge point (chi, eta)=({chi}, {eta}) leaves the open polygon")
    d_chi = t - chi
    d_low = t - chi - eta + 1
    f3 = c2 + 1.0 / d_low ** 2 - 1.0 / d_chi ** 2
    f4 = c3 - 2.0 / d_low ** 3 + 2.0 / d_chi ** 3
    S = support_sets(mu, chi, eta)
    dist = _dist_to_intervals(S.all_intervals(), t)
    scale = abs(f4) * dist + 1.0
    multiplicity = 3 if abs(f3) < MULT_TOL * scale else 2
    case_id = 0
    if multiplicity == 2:
        lt = locate_Lt(mu, chi, eta, t)
        key = (region, lt.kind, 1 if f3 > 0 else -1)
        if key not in _CASE_TABLE:
            raise NotTypical(f"no case for region={region.value}, "
                             f"L_t={lt.kind}, sign f'''={key[2]}")
        case_id = _CASE_TABLE[key]
        _check_asscases(mu, case_id, chi, eta)
    elif not allow_atypical:
        raise NotTypical(f"f'''({t}) = {f3} within multiplicity-3 tolerance")
    beta = 2.0 ** (1 / 3) * abs(f3) ** (-1 / 3) * abs(c1) if multiplicity == 2 \
        else math.nan
    return EdgePoint(
        t=t, region=region, chi=chi, eta=eta, expC=exp_c, Cprime=c1,
        f3=f3, multiplicity=multiplicity, case_id=case_id, beta=beta,
        tangent=(1.0, em1), normal=(em1, -1.0),
    )


def classify_case(mu, t):
    """Case id 1..12 of the edge parameter t."""
    return edge_point(mu, t).case_id


# ---------------------------------------------------------------------------
# non-asymptotic (discrete) counterpart


def discrete_cauchy_all(mu_n, t, kmax=3):
    """(e^{C_n(t)}, (C_n', ..., C_n^(kmax))) for the atoms-plus-blocks measure.

    When t sits inside a Lebesgue block the block's log term is continued
    analytically, exactly as in cauchy_ext_all; the derivative corrections are
    the same rational functions whether t is inside or outside the block.
    """
    t = float(t)
    n = mu_n.n
    atoms = np.asarray(mu_n.atoms, dtype=float)
    if atoms.size and np.min(np.abs(t - atoms)) == 0.0:
        raise EpsViolation(f"a particle sits exactly at t={t}")
    c_real = 0.0
    sign = 1.0
    if atoms.size:
        c_real += float(np.sum(1.0 / (t - atoms))) / n
    for lo, hi in mu_n.blocks:
        num, den = t - lo, t - hi
        c_real += math.log(abs(num)) - math.log(abs(den))
        if num * den < 0:
            sign = -sign
    exp_c = sign * math.exp(c_real)
    derivs = []
    for m in range(1, kmax + 1):
        val = 0.0
        if atoms.size:
            val += (-1) ** m * math.factorial(m) * float(
                np.sum((t - atoms) ** (-(m + 1)))) / n
        for lo, hi in mu_n.blocks:
            val += (-1) ** (m - 1) * math.factorial(m - 1) * (
                (t - lo) ** -m - (t - hi) ** -m)
        derivs.append(val)
    return exp_c, tuple(derivs)


def _check_eps(mu_n, t):
    tag, (lo, hi) = region_interval(mu_n.mu, t)
    eps = mu_n.eps
    if min(t - lo, hi - t) <= eps:
        raise EpsViolation(
            f"t={t} is within eps={eps} of its region boundary ({lo}, {hi})")
    atoms = np.asarray(mu_n.atoms, dtype=float)
    if atoms.size and float(np.min(np.abs(t - atoms))) <= eps / 2:
        raise EpsViolation(f"a particle lies within eps/2 of t={t}")
    return tag


def edge_nonasymptotic(mu_n, t):
    """(chi_n, eta_n): the edge-curve formulas driven by C_n instead of C."""
    _check_eps(mu_n, t)
    exp_c, (c1,) = discrete_cauchy_all(mu_n, t, kmax=1)
    if abs(c1) < DEGENERATE_CPRIME:
        raise DegenerateEdge(f"|C_n'({t})| = {abs(c1)}")
    chi_n = t + (exp_c - 1) / (exp_c * c1)
    eta_n = 1 + (exp_c - 1) ** 2 / (exp_c * c1)
    return chi_n, eta_n


# ---------------------------------------------------------------------------
# the asymptotic saddle function f and the liquid region


def f_derivatives(mu, chi, eta, w, k):
    """k-th derivative (k = 0..4) of the saddle function
    f(w) = int_{S1} rho Log(w-x) - int_{S2} (1-rho) Log(w-x) + int_{S3} rho Log(w-x).

    k >= 1 uses the closed-form power/log endpoint terms; the window form of
    the three integrals makes density-1 subregions of [chi+eta-1, chi] drop out
    automatically (their 1-rho numerator is the zero polynomial).
    """
    if not 0 <= k <= 4:
        raise ValueError("k must be in 0..4")
    lower = chi + eta - 1
    w = complex(w)
    S = support_sets(mu, chi, eta)
    if w.imag == 0:
        if k == 0:
            raise OnSupportS("k=0 needs w off the real axis")
        if _in_closed(S.all_intervals(), w.real, tol=1e-13):
            raise OnSupportS(f"w={w.real} lies on S")
    cover = mu.covering_pieces()
    upper_win = _windowed(cover, chi, mu.b)
    lower_win = _windowed(cover, mu.a, lower)
    mid_win = _windowed(cover, lower, chi)

    def one_minus(coeffs):
        out = tuple(-c for c in coeffs)
        return (1.0 + out[0],) + out[1:]

    if k == 0:
        out = sum(_piece_log_integral(c, lo, hi, w) for lo, hi, c in upper_win)
        out += sum(_piece_log_integral(c, lo, hi, w) for lo, hi, c in lower_win)
        out -= sum(_piece_log_integral(one_minus(c), lo, hi, w)
                   for lo, hi, c in mid_win)
        return out
    pre = (-1) ** (k - 1) * math.factorial(k - 1)
    out = sum(_piece_integral(c, lo, hi, w, k) for lo, hi, c in upper_win)
    out += sum(_piece_integral(c, lo, hi, w, k) for lo, hi, c in lower_win)
    out -= sum(_piece_integral(one_minus(c), lo, hi, w, k)
               for lo, hi, c in mid_win)
    return pre * out


def _f1_pieces(mu, chi, eta):
    """(lo, hi, coeffs, sign) list of the f' integrand over the three windows,
    dropping identically-zero numerators."""
    lower = chi + eta - 1
    cover = mu.covering_pieces()
    out = [(lo, hi, c, 1.0)
           for lo, hi, c in _windowed(cover, chi, mu.b)]
    out += [(lo, hi, c, 1.0)
            for lo, hi, c in _windowed(cover, mu.a, lower)]
    for lo, hi, c in _windowed(cover, lower, chi):
        om = (1.0 - c[0],) + tuple(-v for v in c[1:])
        out.append((lo, hi, om, -1.0))
    return [(lo, hi, c, s) for lo, hi, c, s in out
            if not all(v == 0 for v in c)]


def f_prime_vec(mu, chi, eta, zs):
    """f'(z) on an array of points off the real axis.

    Same closed form as f_derivatives(..., k=1), vectorized per piece; the
    per-point principal logs are branch-safe because lo - z and hi - z share
    the (nonzero) imaginary part of -z.
    """
    zs = np.asarray(zs, dtype=complex)
    out = np.zeros_like(zs)
    for lo, hi, coeffs, sgn in _f1_pieces(mu, chi, eta):
        m = len(coeffs)
        d_hi = hi - zs
        d_lo = lo - zs
        acc = np.zeros_like(zs)
        for j in range(m):
            # Taylor coefficient about z: a_j(z) = sum_m c_m C(m, j) z^(m-j)
            pj = [coeffs[mm] * math.comb(mm, j) for mm in range(m - 1, j - 1, -1)]
            aj = np.polyval(pj, zs)
            if j == 0:
                acc += aj * (np.log(d_hi) - np.log(d_lo))
            else:
                acc += aj * (d_hi ** j - d_lo ** j) / j
        out -= sgn * acc
    return out


def liquid_region_test(mu, chi, eta):
    """True iff f' has a root in the open upper half-plane.

    Argument-principle count over [a-1, b+1] x [im_lo, 2(b-a)]; f' is analytic
    there, so the winding number is the root count.  The bottom edge is lifted
    off the axis in decade steps when a near-axis zero aliases the phase.
    """
    if not (mu.b >= chi >= chi + eta - 1 >= mu.a and 0 <= eta <= 1):
        raise OutOfPolygon(f"(chi, eta)=({chi}, {eta}) outside the polygon")

    def fvec(arr):
        return f_prime_vec(mu, chi, eta, np.atleast_1d(arr))

    rect_top = 2.0 * (mu.b - mu.a)
    for im_lo in (1e-6, 1e-5, 1e-4, 1e-3, 1e-2):
        try:
            cnt = count_roots(fvec, (mu.a - 1.0, mu.b + 1.0, im_lo, rect_top))
        except BoundaryZero:
            continue
        return cnt > 0
    return False
