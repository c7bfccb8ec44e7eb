"""Shared numerical substrate: signed-log arithmetic, adaptive complex
quadrature, argument-principle root counting, and root refinement.

Every large alternating product or sum in the package is routed through the
(sign, log-magnitude) representation so that magnitudes like exp(+-n log n)
never touch a raw double.  Contour integrals use fixed 15-point Gauss-Legendre
panels with interval bisection; root counts use discrete winding numbers with
phase-aliasing guards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "SignedLog",
    "Tolerance",
    "DepthExceeded",
    "BoundaryZero",
    "NoConvergence",
    "signed_log_sum",
    "signed_logsumexp",
    "integrate_path",
    "count_roots",
    "refine_root",
]

_LN2 = math.log(2.0)


class DepthExceeded(Exception):
    """Adaptive bisection hit max_depth before meeting the tolerance."""


class BoundaryZero(Exception):
    """A (near-)zero of f sits on the contour used for winding sampling."""


class NoConvergence(Exception):
    """Root refinement failed to converge within the iteration budget."""


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance plus a refinement-depth (or iteration) cap."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 24

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol == 0:
            raise ValueError("need abs_tol, rel_tol >= 0 and abs_tol + rel_tol > 0")

    def target(self, scale):
        return max(self.abs_tol, self.rel_tol * abs(scale))


@dataclass(frozen=True)
class SignedLog:
    """A real number x stored as (sign(x), log|x|); sign 0 is exactly zero."""

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign == 0:
            object.__setattr__(self, "logmag", -math.inf)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return SignedLog(0, -math.inf)

    @staticmethod
    def one():
        return SignedLog(1, 0.0)

    @staticmethod
    def from_float(x):
        if x == 0:
            return SignedLog.zero()
        return SignedLog(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def from_int(k):
        """Exact conversion of a (possibly huge) integer."""
        if k == 0:
            return SignedLog.zero()
        return SignedLog(1 if k > 0 else -1, _log_abs_int(k))

    @staticmethod
    def from_fraction(fr):
        fr = Fraction(fr)
        if fr == 0:
            return SignedLog.zero()
        sign = 1 if fr > 0 else -1
        return SignedLog(sign, _log_abs_int(fr.numerator) - _log_abs_int(fr.denominator))

    # -- conversions -------------------------------------------------------

    def to_float(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.logmag)
        except OverflowError:
            return self.sign * math.inf

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return SignedLog(-self.sign, self.logmag)

    def __abs__(self):
        return SignedLog(abs(self.sign), self.logmag)

    def __mul__(self, other):
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by SignedLog zero")
        if self.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("0 ** nonpositive power")
            return SignedLog.zero()
        return SignedLog(self.sign if k % 2 else abs(self.sign), k * self.logmag)

    def __add__(self, other):
        return signed_log_sum([self, _coerce(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return signed_log_sum([self, -_coerce(other)])


def _coerce(x):
    if isinstance(x, SignedLog):
        return x
    if isinstance(x, int):
        return SignedLog.from_int(x)
    return SignedLog.from_float(x)


def _log_abs_int(k):
    """log|k| for an arbitrarily large integer, overflow-free."""
    k = abs(k)
    if k.bit_length() <= 900:
        return math.log(k)
    shift = k.bit_length() - 64
    return math.log(k >> shift) + shift * _LN2


def signed_log_sum(terms):
    """Sum a list of SignedLog values.

    Compensated (Neumaier) accumulation anchored at the maximal log-magnitude.
    When cancellation leaves fewer than 20 significant bits at double
    precision, the sum is redone at elevated precision so the surviving
    magnitude -- or an exact zero -- is resolved correctly.
    """
    live = [t for t in terms if t.sign != 0]
    if not live:
        return SignedLog.zero()
    anchor = max(t.logmag for t in live)
    if anchor == -math.inf:
        return SignedLog.zero()
    acc = 0.0
    comp = 0.0
    for t in live:
        v = t.sign * math.exp(t.logmag - anchor)
        s = acc + v
        if abs(acc) >= abs(v):
            comp += (acc - s) + v
        else:
            comp += (v - s) + acc
        acc = s
    total = acc + comp
    # fewer than 20 of the 53 double bits survive -> re-resolve at high precision
    if total == 0.0 or abs(total) < 2.0 ** (20 - 53):
        return _signed_log_sum_mp(live, anchor)
    sign = 1 if total > 0 else -1
    return SignedLog(sign, anchor + math.log(abs(total)))


def _signed_log_sum_mp(terms, anchor):
    with mpmath.workdps(60):
        tot = mpmath.mpf(0)
        for t in terms:
            tot += t.sign * mpmath.exp(mpmath.mpf(t.logmag) - anchor)
        if tot == 0:
            return SignedLog.zero()
        sign = 1 if tot > 0 else -1
        return SignedLog(sign, anchor + float(mpmath.log(abs(tot))))


def signed_logsumexp(logs, signs):
    """Vector companion of signed_log_sum for large term arrays.

    Returns (SignedLog, cancellation_bits) where cancellation_bits measures
    how far the result magnitude fell below the largest term.  Callers decide
    whether to escalate the whole computation to wider floats.
    """
    logs = np.asarray(logs, dtype=float)
    signs = np.asarray(signs, dtype=float)
    live = signs != 0
    if not np.any(live):
        return SignedLog.zero(), 0
    logs = logs[live]
    signs = signs[live]
    peak = float(np.max(logs))
    total = float(np.sum(signs * np.exp(logs - peak)))
    if total == 0.0 or not math.isfinite(total) or \
            abs(total) < 2.0 ** (20 - 53):
        terms = [SignedLog(int(s), float(l)) for s, l in zip(signs, logs)]
        out = _signed_log_sum_mp(terms, peak)
        if out.sign == 0:
            return out, 53
        return out, max(0, int(math.ceil((peak - out.logmag) / _LN2)))
    lm = peak + math.log(abs(total))
    bits = max(0, int(math.ceil((peak - lm) / _LN2)))
    return SignedLog(1 if total > 0 else -1, lm), bits


# -- quadrature ------------------------------------------------------------

_GL_X, _GL_W = roots_legendre(15)


def _gl15(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.sum(_GL_W * f(mid + half * _GL_X))


def integrate_path(f, path, tol=Tolerance()):
    """Integrate f along the polyline through the complex nodes of `path`.

    f must accept a numpy array of complex points.  Each segment is covered by
    15-point Gauss-Legendre panels, bisected until the panel estimate agrees
    with its two children to within the (length-proportional) share of the
    tolerance budget.  Raises DepthExceeded when max_depth bisections do not
    suffice.
    """
    nodes = [complex(z) for z in path]
    if len(nodes) < 2:
        raise ValueError("path needs at least two nodes")
    segs = [(a, b) for a, b in zip(nodes[:-1], nodes[1:]) if a != b]
    if not segs:
        return 0.0 + 0.0j
    rough = [_gl15(f, a, b) for a, b in segs]
    scale = sum(abs(r) for r in rough)
    total_len = sum(abs(b - a) for a, b in segs)
    out = 0.0 + 0.0j
    for (a, b), r in zip(segs, rough):
        out += _adapt(f, a, b, r, tol, scale, abs(b - a) / total_len, 0)
    return out


def _adapt(f, a, b, whole, tol, scale, frac, depth):
    mid = 0.5 * (a + b)
    left = _gl15(f, a, mid)
    right = _gl15(f, mid, b)
    err = abs(whole - (left + right))
    if err <= tol.target(scale) * frac:
        return left + right
    if depth >= tol.max_depth:
        raise DepthExceeded(f"panel error {err:.3e} at depth {depth}")
    return (_adapt(f, a, mid, left, tol, scale, 0.5 * frac, depth + 1)
            + _adapt(f, mid, b, right, tol, scale, 0.5 * frac, depth + 1))


# -- root counting and refinement ------------------------------------------

def count_roots(f, rect, tol=Tolerance()):
    """Number of zeros of f (with multiplicity) inside an axis-aligned
    rectangle (re_lo, re_hi, im_lo, im_hi), by the argument principle.

    f must be analytic on the closed rectangle and accept numpy arrays.  The
    boundary is sampled at 8*max(4, ceil(perimeter/step)) points with the step
    halved until all discrete phase increments are below pi/2 (anti-aliasing).
    Raises BoundaryZero when |f| dips to ~0 on the boundary.
    """
    re_lo, re_hi, im_lo, im_hi = map(float, rect)
    if not (re_lo < re_hi and im_lo < im_hi):
        raise ValueError("rectangle must have positive width and height")
    w = re_hi - re_lo
    h = im_hi - im_lo
    perimeter = 2.0 * (w + h)
    step = perimeter / 16.0
    while True:
        n = 8 * max(4, int(math.ceil(perimeter / step)))
        z = _rect_boundary(re_lo, re_hi, im_lo, im_hi, n)
        vals = np.asarray(f(z), dtype=complex)
        mags = np.abs(vals)
        scale = float(np.max(mags))
        if scale == 0.0 or float(np.min(mags)) <= 1e-12 * scale:
            raise BoundaryZero("zero of f detected on the rectangle boundary")
        inc = np.angle(np.roll(vals, -1) / vals)
        if np.all(np.abs(inc) < 0.5 * math.pi):
            return int(round(float(np.sum(inc)) / (2.0 * math.pi)))
        if n > 1 << 18:
            raise BoundaryZero("winding sampling did not stabilise; "
                               "a zero is likely on or near the boundary")
        step *= 0.5


def _rect_boundary(re_lo, re_hi, im_lo, im_hi, n):
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi)]
    lens = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
    total = sum(lens)
    pts = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        m = max(2, int(round(n * lens[i] / total)))
        ts = np.arange(m) / m
        pts.append(a + (b - a) * ts)
    return np.concatenate(pts)


def refine_root(f, df, seed, tol=Tolerance(abs_tol=1e-13, rel_tol=0.0, max_depth=80),
                bracket=None):
    """Newton refinement from `seed`; optional real-bracket bisection fallback.

    Succeeds when |f| <= abs_tol.  `bracket`, when given, is a real pair (a, b)
    with a sign change of f used if Newton stalls.  Raises NoConvergence after
    max_depth iterations of both stages.
    """
    z = complex(seed)
    for _ in range(tol.max_depth):
        fz = complex(f(z))
        if abs(fz) <= tol.abs_tol:
            return z
        dz = complex(df(z))
        if dz == 0:
            break
        step = fz / dz
        z = z - step
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            break
    if bracket is not None:
        a, b = float(bracket[0]), float(bracket[1])
        fa = float(np.real(f(a)))
        fb = float(np.real(f(b)))
        if fa == 0.0:
            return complex(a)
        if fb == 0.0:
            return complex(b)
        if fa * fb < 0:
            for _ in range(200):
                m = 0.5 * (a + b)
                fm = float(np.real(f(m)))
                if abs(fm) <= tol.abs_tol or (b - a) < 1e-16 * (1 + abs(m)):
                    return complex(m)
                if fa * fm < 0:
                    b = m
                else:
                    a, fa = m, fm
            return complex(0.5 * (a + b))
    raise NoConvergence(f"no root found from seed {seed}")
