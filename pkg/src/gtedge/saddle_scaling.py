"""Finite-n saddle machinery: the scaling constants at an edge parameter, the
lattice query points in tangent/normal coordinates, the discrete saddle
functions f_n / f~_n, their near-t roots, and the exact exp(n F_n(t)) product.

The scaling constants (q_n, q1_n, q2_n, m_n, p_n) are driven by the discrete
Cauchy transform C_n of the atoms-plus-blocks measure mu_n; the edge identity
t - chi_n - eta_n + 1 = (t - chi_n) e^{C_n(t)} makes f_{t,n}'(t) and
f_{t,n}''(t) vanish by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cauchy_edge import (
    DegenerateEdge,
    EdgePoint,
    _check_eps,
    discrete_cauchy_all,
    edge_point,
    f_prime_vec,
)
from .measures import DiscreteMeasure, LimitMeasure, ParticleConfig, RegionTag, default_eps, make_mu_n
from .numerics import NoConvergence, SignedLog, count_roots, refine_root

__all__ = [
    "DegenerateThirdDerivative",
    "OutOfLattice",
    "OnDiscreteSupport",
    "WrongRootCount",
    "PoleHit",
    "ScalingContext",
    "QueryPair",
    "build_scaling",
    "particle_sequence",
    "fn_eval",
    "fn_eval_mean",
    "saddle_roots",
    "exact_exp_nFn",
]


class DegenerateThirdDerivative(Exception):
    """|f_{t,n}'''(t)| too small to define the scaling constants."""


class OutOfLattice(Exception):
    """A query row index left [1, n-1]."""


class OnDiscreteSupport(Exception):
    """Real evaluation point hits a lattice point of the discrete saddle sets."""


class WrongRootCount(Exception):
    """Root count of f_n' in the disc around t differs from 2."""


class PoleHit(Exception):
    """t coincides with a lattice point of the exp(n F_n) product sets."""


@dataclass(frozen=True)
class ScalingContext:
    """Everything n-dependent at a fixed edge parameter t."""

    mu: LimitMeasure
    x: ParticleConfig
    t: float
    eps: float
    xi: float
    region: RegionTag
    edge: EdgePoint          # asymptotic edge data (chi_E, eta_E, beta, case)
    mu_n: DiscreteMeasure
    chi_n: float
    eta_n: float
    expCn: float
    Cprime_n: float
    f3_tn: float
    q_n: float
    q1_n: float
    q2_n: float
    m_n: float
    p_n: float

    @property
    def n(self):
        return self.x.n

    @property
    def tangent_n(self):
        return (1.0, self.expCn - 1.0)

    @property
    def normal_n(self):
        return (self.expCn - 1.0, -1.0)


@dataclass(frozen=True)
class QueryPair:
    """Lattice query points with the continuum parameters they realize."""

    u: float
    r: float
    v: float
    s: float
    un: int
    rn: int
    vn: int
    sn: int
    requested: tuple = None


def build_scaling(mu, x, t, eps=None, xi=None):
    """Scaling constants of the edge parameter t for the top row x.

    q_n solves (1/6) q_n^3 f_{t,n}'''(t) = 1/3 with the real cube root carrying
    the sign of f'''; q1_n = 1/q_n, q2_n = 2/q_n^2; m_n and p_n invert the two
    tangent/normal displays.
    """
    edge = edge_point(mu, t)
    if eps is None:
        eps = default_eps(mu, t)
    if xi is None:
        xi = eps / 8.0
    mu_n = make_mu_n(x, mu, eps)
    _check_eps(mu_n, t)
    exp_c, (c1, c2, _c3) = discrete_cauchy_all(mu_n, t, kmax=3)
    if abs(c1) < 1e-13:
        raise DegenerateEdge(f"|C_n'({t})| = {abs(c1)}")
    chi_n = t + (exp_c - 1) / (exp_c * c1)
    eta_n = 1 + (exp_c - 1) ** 2 / (exp_c * c1)
    d_chi = t - chi_n
    d_low = t - chi_n - eta_n + 1
    f3_tn = c2 + 1.0 / d_low ** 2 - 1.0 / d_chi ** 2
    if abs(f3_tn) < 1e-12:
        raise DegenerateThirdDerivative(f"f_(t,n)'''({t}) = {f3_tn}")
    q_n = math.copysign((2.0 / abs(f3_tn)) ** (1 / 3), f3_tn)
    q1_n = 1.0 / q_n
    q2_n = 2.0 / q_n ** 2
    g = exp_c - 1.0
    p_n = -q1_n * d_chi * exp_c / (g ** 2 + 1.0)
    m_n = q2_n * d_chi ** 2 * exp_c / g
    return ScalingContext(
        mu=mu, x=x, t=float(t), eps=float(eps), xi=float(xi),
        region=edge.region, edge=edge, mu_n=mu_n,
        chi_n=chi_n, eta_n=eta_n, expCn=exp_c, Cprime_n=c1,
        f3_tn=f3_tn, q_n=q_n, q1_n=q1_n, q2_n=q2_n, m_n=m_n, p_n=p_n,
    )


def _round_half_up(val):
    return int(math.floor(val + 0.5))


def _one_point(ctx, u, r):
    n = ctx.n
    g = ctx.expCn - 1.0
    tu = n ** (2 / 3) * ctx.m_n * u
    nr = n ** (1 / 3) * ctx.p_n * r
    pos = n * ctx.chi_n + tu * 1.0 + nr * g
    row = n * ctx.eta_n + tu * g + nr * (-1.0)
    return _round_half_up(pos), _round_half_up(row)


def _realized(ctx, pos, row):
    n = ctx.n
    g = ctx.expCn - 1.0
    du = pos - n * ctx.chi_n
    dr = row - n * ctx.eta_n
    tu = (du + g * dr) / (1.0 + g * g)
    nr = (g * du - dr) / (1.0 + g * g)
    return tu / (n ** (2 / 3) * ctx.m_n), nr / (n ** (1 / 3) * ctx.p_n)


def particle_sequence(ctx, u, r, v, s):
    """Lattice query points realizing (u, r, v, s) in tangent/normal scaling.

    Rounds half-up, lifts a position by the minimal amount when the kernel
    domain inequality u_n >= x_n + n - r_n is violated, and reports the
    continuum parameters the final integers actually realize.
    """
    un, rn = _one_point(ctx, u, r)
    vn, sn = _one_point(ctx, v, s)
    n = ctx.n
    if not (1 <= rn <= n - 1) or not (1 <= sn <= n - 1):
        raise OutOfLattice(f"rows (rn, sn)=({rn}, {sn}) outside [1, {n - 1}]")
    x_min = ctx.x.x[-1]
    un = max(un, x_min + n - rn)
    vn = max(vn, x_min + n - sn)
    ru, rr = _realized(ctx, un, rn)
    rv, rs = _realized(ctx, vn, sn)
    return QueryPair(u=ru, r=rr, v=rv, s=rs, un=un, rn=rn, vn=vn, sn=sn,
                     requested=(float(u), float(r), float(v), float(s)))


# ---------------------------------------------------------------------------
# discrete saddle functions


def _saddle_sets(x, side, tilde):
    """Lattice points of P \\ W and W \\ P for the plain or tilde saddle sum."""
    pos, row = side
    n = x.n
    if tilde:
        w_lo, w_hi = pos + row - n + 1, pos - 1
    else:
        w_lo, w_hi = pos + row - n, pos
    P = np.asarray(x.x, dtype=np.int64)
    W = np.arange(w_lo, w_hi + 1, dtype=np.int64)
    return np.setdiff1d(P, W), np.setdiff1d(W, P)


def fn_eval(x, side, w, k, tilde=False, exclude=None, precision_bits=53):
    """k-th derivative (k = 0..3) of the discrete saddle function.

    f_n^(k)(w) = (1/n)(-1)^(k-1)(k-1)! [sum_{P\\W} (w - j/n)^-k - sum_{W\\P} ...],
    with W = {pos+row-n .. pos} (plain) or {pos+row-n+1 .. pos-1} (tilde).
    k=0 returns principal-branch logs off the real axis and the real part
    (sum of log absolute values) on it.  exclude=(lo, hi) drops lattice points
    with j/n strictly inside, for evaluation inside densely packed blocks.
    precision_bits > 53 switches real-axis evaluation to multiprecision, for
    the near-cancelling sums at large n.
    """
    if not 0 <= k <= 3:
        raise ValueError("k must be in 0..3")
    n = x.n
    plus, minus = _saddle_sets(x, side, tilde)
    pos_p = plus.astype(float) / n
    pos_m = minus.astype(float) / n
    if exclude is not None:
        lo, hi = exclude
        keep_p = (pos_p <= lo) | (pos_p >= hi)
        keep_m = (pos_m <= lo) | (pos_m >= hi)
        plus, minus = plus[keep_p], minus[keep_m]
        pos_p, pos_m = pos_p[keep_p], pos_m[keep_m]
    wc = complex(w)
    if wc.imag == 0:
        wr = wc.real
        if (pos_p.size and np.min(np.abs(wr - pos_p)) == 0.0) or \
                (pos_m.size and np.min(np.abs(wr - pos_m)) == 0.0):
            raise OnDiscreteSupport(f"w={wr} hits a saddle lattice point")
        if precision_bits > 53:
            import gmpy2

            with gmpy2.context(precision=precision_bits):
                wm = gmpy2.mpfr(wr)
                diffs_p = [wm - gmpy2.mpfr(int(j)) / n for j in plus]
                diffs_m = [wm - gmpy2.mpfr(int(j)) / n for j in minus]
                if k == 0:
                    acc = sum((gmpy2.log(abs(d)) for d in diffs_p),
                              gmpy2.mpfr(0))
                    acc -= sum((gmpy2.log(abs(d)) for d in diffs_m),
                               gmpy2.mpfr(0))
                    return float(acc / n)
                acc = sum((d ** (-k) for d in diffs_p), gmpy2.mpfr(0))
                acc -= sum((d ** (-k) for d in diffs_m), gmpy2.mpfr(0))
                return (-1) ** (k - 1) * math.factorial(k - 1) * float(acc) / n
        if k == 0:
            out = float(np.sum(np.log(np.abs(wr - pos_p))))
            out -= float(np.sum(np.log(np.abs(wr - pos_m))))
            return out / n
        val = float(np.sum((wr - pos_p) ** (-k)))
        val -= float(np.sum((wr - pos_m) ** (-k)))
        return (-1) ** (k - 1) * math.factorial(k - 1) * val / n
    if k == 0:
        out = complex(np.sum(np.log(wc - pos_p)) - np.sum(np.log(wc - pos_m)))
        return out / n
    val = complex(np.sum((wc - pos_p) ** (-k)) - np.sum((wc - pos_m) ** (-k)))
    return (-1) ** (k - 1) * math.factorial(k - 1) * val / n


def fn_eval_mean(x, side, w, k, exclude=None, precision_bits=53):
    """Endpoint-averaged saddle derivative: mean of plain and tilde variants.

    The plain and tilde index windows differ only in their two endpoints, so
    their mean is the trapezoid-weighted lattice sum; its derivatives approach
    the rescaled query parameters without the O(n^{-1/3}) endpoint bias that
    either variant carries alone.
    """
    a = fn_eval(x, side, w, k, tilde=False, exclude=exclude,
                precision_bits=precision_bits)
    b = fn_eval(x, side, w, k, tilde=True, exclude=exclude,
                precision_bits=precision_bits)
    return 0.5 * (a + b)


def saddle_roots(x, side, t, xi, tilde=False, limit_check=None):
    """The two roots of the averaged f_n' in the half-width-xi square at t.

    Returns (roots, tag) with tag in {"two-real", "real-double", "conjugate"}.
    limit_check=(mu, chi, eta) optionally verifies that the limiting f' has
    exactly its double root at t in the 4*xi box first.
    """
    t = float(t)
    plus, minus = _saddle_sets(x, side, tilde)
    pts = np.concatenate([plus, minus]).astype(float) / x.n
    if pts.size and np.any(np.abs(pts - t) < xi):
        raise WrongRootCount(
            f"saddle lattice points inside B({t}, {xi}); shrink xi")
    if limit_check is not None:
        mu, chi, eta = limit_check

        def limvec(arr):
            return f_prime_vec(mu, chi, eta, np.atleast_1d(arr))

        cnt = count_roots(limvec, (t - 4 * xi, t + 4 * xi, -4 * xi, 4 * xi))
        if cnt != 2:
            raise WrongRootCount(
                f"limit f' has {cnt} roots in B({t}, {4 * xi}), expected 2")

    def fvec(arr):
        arr = np.atleast_1d(arr)
        return np.array([fn_eval_mean(x, side, complex(z), 1) for z in arr])

    rect = (t - xi, t + xi, -xi, xi)
    cnt = count_roots(fvec, rect)
    if cnt != 2:
        raise WrongRootCount(f"f_n' has {cnt} roots in B({t}, {xi}), expected 2")

    def f(z):
        return fn_eval_mean(x, side, z, 1)

    def df(z):
        return fn_eval_mean(x, side, z, 2)

    found = []
    seeds = [t + 0.5 * xi * np.exp(1j * math.pi * j / 4) for j in range(8)]
    seeds += [t + 0.05j * xi, t - 0.05j * xi]
    for seed in seeds:
        try:
            root = refine_root(f, df, complex(seed))
        except NoConvergence:
            continue
        if not (rect[0] <= root.real <= rect[1] and rect[2] <= root.imag <= rect[3]):
            continue
        if all(abs(root - rr) > 1e-7 * (1.0 + abs(rr)) for rr in found):
            found.append(root)
        if len(found) == 2:
            break
    if len(found) == 1:
        # double root, or the second member hides very close by
        found.append(found[0])
    if len(found) != 2:
        raise WrongRootCount(f"located {len(found)} of 2 roots near t={t}")
    z1, z2 = found
    if abs(z1.imag) > 1e-9 * (1.0 + abs(z1)):
        tag = "conjugate"
    elif abs(z1 - z2) < 1e-9 * (1.0 + abs(z1)):
        tag = "real-double"
    else:
        tag = "two-real"
    return (z1, z2), tag


# ---------------------------------------------------------------------------
# the exact exp(n F_n(t)) product


def _range_set(lo, hi):
    return range(lo, hi + 1) if hi >= lo else range(0)


def exact_exp_nFn(ctx, qp):
    """exp(n F_n(t)) as a SignedLog via the four finite lattice products.

    Numerator sets UV^ = {vn+1 .. un-1}, UV_ = {un+rn-n+1 .. vn+sn-n-1};
    denominator sets VU^ = {un .. vn}, VU_ = {vn+sn-n .. un+rn-n}.
    """
    t, n = ctx.t, ctx.n
    un, rn, vn, sn = qp.un, qp.rn, qp.vn, qp.sn
    numer = list(_range_set(vn + 1, un - 1)) + \
        list(_range_set(un + rn - n + 1, vn + sn - n - 1))
    denom = list(_range_set(un, vn)) + list(_range_set(vn + sn - n, un + rn - n))
    sign = 1
    logmag = 0.0
    for j in numer:
        d = t - j / n
        if d == 0.0:
            raise PoleHit(f"t={t} hits lattice point {j}/{n}")
        if d < 0:
            sign = -sign
        logmag += math.log(abs(d))
    for j in denom:
        d = t - j / n
        if d == 0.0:
            raise PoleHit(f"t={t} hits lattice point {j}/{n}")
        if d < 0:
            sign = -sign
        logmag -= math.log(abs(d))
    return SignedLog(sign, logmag)
