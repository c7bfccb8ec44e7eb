"""The limit measure, the discrete top row, support decompositions, and the
region classification of real points.

A limit measure is a piecewise-polynomial density on finitely many disjoint
intervals, with values in [0, 1] and total mass 1.  The discrete model data is
the strictly decreasing integer top row x^(n); `discretize` produces it from
the measure by exact rational quantiles.  Regions of the real line are
classified by the sign of the Cauchy transform (off the support) or by
membership in a maximal density-1 interval.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "InvalidDensity",
    "MassNotOne",
    "SupportTooNarrow",
    "OutOfPolygon",
    "RegionTag",
    "LimitMeasure",
    "ParticleConfig",
    "SupportTriple",
    "DiscreteMeasure",
    "make_limit_measure",
    "read_measure_file",
    "discretize",
    "support_sets",
    "classify_t",
    "region_interval",
    "default_eps",
    "make_mu_n",
]


class InvalidDensity(Exception):
    """Density leaves [0, 1], or vanishes identically near a support edge."""


class MassNotOne(Exception):
    """Total mass differs from 1 beyond tolerance."""


class SupportTooNarrow(Exception):
    """Support diameter b - a must exceed 1."""


class OutOfPolygon(Exception):
    """(chi, eta) violates the ordering b >= chi >= chi+eta-1 >= a."""


class RegionTag(enum.Enum):
    MuPlus = "MuPlus"
    LambdaMinusMu = "LambdaMinusMu"
    MuMinus = "MuMinus"
    Unclassifiable = "Unclassifiable"


def _poly_eval(coeffs, x):
    out = 0.0
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _poly_is_const(coeffs, value, tol=1e-12):
    head = coeffs[0] if coeffs else 0.0
    rest = coeffs[1:]
    return abs(head - value) <= tol and all(abs(c) <= tol for c in rest)


def _merge_intervals(ivals, tol=0.0):
    """Merge a sorted list of (lo, hi) when consecutive ones touch."""
    out = []
    for lo, hi in ivals:
        if out and lo <= out[-1][1] + tol:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return [(lo, hi) for lo, hi in out]


@dataclass(frozen=True)
class LimitMeasure:
    """Piecewise-polynomial probability density with values in [0, 1].

    pieces: tuple of (lo, hi, coeffs) with density(x) = sum c_k x^k on [lo, hi].
    """

    pieces: tuple
    a: float
    b: float

    def density(self, x):
        for lo, hi, coeffs in self.pieces:
            if lo <= x <= hi:
                return _poly_eval(coeffs, x)
        return 0.0

    def mass(self, lo=None, hi=None):
        lo = self.a if lo is None else lo
        hi = self.b if hi is None else hi
        total = 0.0
        for plo, phi, coeffs in self.pieces:
            l, h = max(lo, plo), min(hi, phi)
            if l < h:
                total += self._piece_mass(coeffs, l, h)
        return total

    @staticmethod
    def _piece_mass(coeffs, l, h):
        out = 0.0
        for k, c in enumerate(coeffs):
            out += c * (h ** (k + 1) - l ** (k + 1)) / (k + 1)
        return out

    def mass_tail_exact(self, y):
        """mu[[y, b]] as an exact Fraction (float piece data taken verbatim)."""
        y = Fraction(y)
        total = Fraction(0)
        for plo, phi, coeffs in self.pieces:
            l = max(y, Fraction(plo))
            h = Fraction(phi)
            if l >= h:
                continue
            for k, c in enumerate(coeffs):
                total += Fraction(c) * (h ** (k + 1) - l ** (k + 1)) / (k + 1)
        return total

    def first_moment(self):
        out = 0.0
        for lo, hi, coeffs in self.pieces:
            for k, c in enumerate(coeffs):
                out += c * (hi ** (k + 2) - lo ** (k + 2)) / (k + 2)
        return out

    # -- support structure -------------------------------------------------

    def supp_mu_intervals(self):
        """Closure of {density > 0} as a merged interval list."""
        ivals = [(lo, hi) for lo, hi, coeffs in self.pieces
                 if not _poly_is_const(coeffs, 0.0)]
        return _merge_intervals(ivals, tol=1e-12)

    def full_density_intervals(self):
        """Maximal open intervals where the density is identically 1."""
        ivals = [(lo, hi) for lo, hi, coeffs in self.pieces
                 if _poly_is_const(coeffs, 1.0)]
        return _merge_intervals(ivals, tol=1e-12)

    def supp_lambda_minus_mu_intervals(self):
        """Closure of {x in [a, b] : density(x) < 1} as an interval list."""
        out = []
        cursor = self.a
        for lo, hi in self.full_density_intervals():
            if lo > cursor:
                out.append((cursor, lo))
            cursor = max(cursor, hi)
        if cursor < self.b:
            out.append((cursor, self.b))
        # density-1 blocks flush with a or b leave degenerate endpoints out
        return [(lo, hi) for lo, hi in out if hi - lo > 1e-12]

    def covering_pieces(self):
        """Pieces covering all of [a, b], with explicit zero density in gaps."""
        out = []
        cursor = self.a
        for lo, hi, coeffs in self.pieces:
            if lo > cursor + 1e-12:
                out.append((cursor, lo, (0.0,)))
            out.append((lo, hi, coeffs))
            cursor = hi
        if cursor < self.b - 1e-12:
            out.append((cursor, self.b, (0.0,)))
        return out


@dataclass(frozen=True)
class ParticleConfig:
    """Top row x^(n): strictly decreasing integers x_1 > x_2 > ... > x_n."""

    n: int
    x: tuple

    def __post_init__(self):
        if self.n != len(self.x):
            raise ValueError("n must equal len(x)")
        if any(int(v) != v for v in self.x):
            raise ValueError("x entries must be integers")
        if any(self.x[i] <= self.x[i + 1] for i in range(self.n - 1)):
            raise ValueError("x must be strictly decreasing")


@dataclass(frozen=True)
class SupportTriple:
    """S1, S2, S3: interval lists of the support decomposition at (chi, eta)."""

    S1: tuple
    S2: tuple
    S3: tuple

    def sup1(self):
        return self.S1[-1][1] if self.S1 else None

    def inf1(self):
        return self.S1[0][0] if self.S1 else None

    def sup2(self):
        return self.S2[-1][1] if self.S2 else None

    def inf2(self):
        return self.S2[0][0] if self.S2 else None

    def sup3(self):
        return self.S3[-1][1] if self.S3 else None

    def inf3(self):
        return self.S3[0][0] if self.S3 else None

    def all_intervals(self):
        return list(self.S1) + list(self.S2) + list(self.S3)


def make_limit_measure(pieces):
    """Validate a raw piece list and build the LimitMeasure."""
    if not pieces:
        raise ValueError("need at least one piece")
    norm = []
    for p in pieces:
        lo, hi = float(p[0]), float(p[1])
        coeffs = tuple(float(c) for c in p[2])
        if not coeffs:
            raise ValueError("piece needs at least one density coefficient")
        if not lo < hi:
            raise ValueError(f"piece ({lo}, {hi}) must have lo < hi")
        norm.append((lo, hi, coeffs))
    norm.sort(key=lambda p: p[0])
    for (l0, h0, _), (l1, h1, _) in zip(norm[:-1], norm[1:]):
        if l1 < h0 - 1e-12:
            raise ValueError("pieces must be disjoint")
    for lo, hi, coeffs in norm:
        xs = np.linspace(lo, hi, 257)
        vals = np.array([_poly_eval(coeffs, x) for x in xs])
        if vals.min() < -1e-9 or vals.max() > 1 + 1e-9:
            raise InvalidDensity(f"density leaves [0,1] on piece ({lo}, {hi})")
    a = norm[0][0]
    b = norm[-1][1]
    mu = LimitMeasure(tuple(norm), a, b)
    total = mu.mass_tail_exact(Fraction(a) - 1)
    if abs(float(total) - 1.0) > 1e-12:
        raise MassNotOne(f"total mass {float(total)} != 1")
    if not b - a > 1:
        raise SupportTooNarrow(f"b - a = {b - a} must exceed 1")
    if _poly_is_const(norm[0][2], 0.0) or _poly_is_const(norm[-1][2], 0.0):
        raise InvalidDensity("density vanishes identically near a or b")
    return mu


def read_measure_file(path):
    """Parse a measure file: one piece per line, `lo hi c0 [c1 c2 ...]`;
    `#` starts a comment.  Errors carry the 1-based line number."""
    pieces = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ValueError(f"{path}: line {lineno}: need `lo hi c0 [c1 ...]`")
            try:
                vals = [float(tok) for tok in parts]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric token") from None
            pieces.append((vals[0], vals[1], vals[2:]))
    if not pieces:
        raise ValueError(f"{path}: no measure pieces found")
    return make_limit_measure(pieces)


def discretize(mu, n):
    """Top row x^(n) by exact rational quantiles.

    x_i is the largest integer m with mu[[m/n, b]] >= (i - 1/2)/n, then pushed
    down minimally so the row is strictly decreasing.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    lo_int = math.floor(mu.a * n) - 1
    hi_int = math.ceil(mu.b * n) + 1
    xs = []
    for i in range(1, n + 1):
        need = Fraction(2 * i - 1, 2 * n)
        lo, hi = lo_int, hi_int
        # tail(lo/n) = 1 >= need always; tail(hi/n) = 0 < need always
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if mu.mass_tail_exact(Fraction(mid, n)) >= need:
                lo = mid
            else:
                hi = mid
        xs.append(lo)
    for i in range(1, n):
        if xs[i] >= xs[i - 1]:
            xs[i] = xs[i - 1] - 1
    return ParticleConfig(n, tuple(xs))


def _intersect(ivals, lo, hi):
    out = []
    for l, h in ivals:
        a, b = max(l, lo), min(h, hi)
        if a <= b:
            out.append((a, b))
    return out


def support_sets(mu, chi, eta):
    """The decomposition S1 = supp(mu)|[chi,b], S2 = supp(lambda-mu)|[chi+eta-1,chi],
    S3 = supp(mu)|[a,chi+eta-1]."""
    lower = chi + eta - 1
    if not (mu.b >= chi >= lower >= mu.a):
        raise OutOfPolygon(f"need b >= chi >= chi+eta-1 >= a, got chi={chi}, eta={eta}")
    supp = mu.supp_mu_intervals()
    holes = mu.supp_lambda_minus_mu_intervals()
    return SupportTriple(
        S1=tuple(_intersect(supp, chi, mu.b)),
        S2=tuple(_intersect(holes, lower, chi)),
        S3=tuple(_intersect(supp, mu.a, lower)),
    )


def _in_open_intervals(ivals, t):
    return any(lo < t < hi for lo, hi in ivals)


def _in_closed_intervals(ivals, t):
    return any(lo <= t <= hi for lo, hi in ivals)


def classify_t(mu, t):
    """Region of a real point: MuPlus / MuMinus by the sign of C(t) off the
    support, LambdaMinusMu strictly inside a density-1 interval, otherwise
    Unclassifiable."""
    t = float(t)
    if _in_open_intervals(mu.full_density_intervals(), t):
        return RegionTag.LambdaMinusMu
    if _in_closed_intervals(mu.supp_mu_intervals(), t):
        return RegionTag.Unclassifiable
    from .cauchy_edge import cauchy

    c = cauchy(mu, t).real
    if c > 0:
        return RegionTag.MuPlus
    if c < 0:
        return RegionTag.MuMinus
    return RegionTag.Unclassifiable


def region_interval(mu, t):
    """The maximal open interval of t's region containing t.

    For MuPlus/MuMinus this is the part of the support gap on t's side of the
    (unique, C is strictly decreasing) sign change of C; for LambdaMinusMu the
    containing density-1 interval.
    """
    tag = classify_t(mu, t)
    if tag is RegionTag.LambdaMinusMu:
        for lo, hi in mu.full_density_intervals():
            if lo < t < hi:
                return tag, (lo, hi)
    if tag in (RegionTag.MuPlus, RegionTag.MuMinus):
        supp = mu.supp_mu_intervals()
        gap_lo, gap_hi = -math.inf, math.inf
        for lo, hi in supp:
            if hi <= t:
                gap_lo = max(gap_lo, hi)
            if lo >= t:
                gap_hi = min(gap_hi, lo)
        if math.isinf(gap_lo) or math.isinf(gap_hi):
            return tag, (gap_lo, gap_hi)
        from .cauchy_edge import cauchy

        f_lo = cauchy(mu, gap_lo + 1e-13 * (1 + abs(gap_lo))).real
        f_hi = cauchy(mu, gap_hi - 1e-13 * (1 + abs(gap_hi))).real
        if f_lo > 0 and f_hi > 0:
            return tag, (gap_lo, gap_hi)
        if f_lo < 0 and f_hi < 0:
            return tag, (gap_lo, gap_hi)
        # C crosses zero inside the gap: bisect for the crossing
        lo, hi = gap_lo + 1e-13, gap_hi - 1e-13
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if cauchy(mu, mid).real > 0:
                lo = mid
            else:
                hi = mid
        crossing = 0.5 * (lo + hi)
        if tag is RegionTag.MuPlus:
            return tag, (gap_lo, crossing)
        return tag, (crossing, gap_hi)
    raise ValueError(f"t={t} is not inside a classified open region")


def default_eps(mu, t):
    """Half the distance from t to the boundary of its open region, capped at 0.1."""
    _, (lo, hi) = region_interval(mu, t)
    dist = min(t - lo, hi - t)
    if not math.isfinite(dist):
        dist = t - lo if math.isfinite(lo) else hi - t
        if not math.isfinite(dist):
            dist = 0.2
    return min(0.1, 0.5 * dist)


@dataclass(frozen=True)
class DiscreteMeasure:
    """The comparison measure mu_n: atoms (1/n)*delta at particles outside the
    eps-shrunken density-1 blocks, plus Lebesgue measure on those blocks."""

    mu: LimitMeasure
    config: ParticleConfig
    eps: float
    atoms: tuple        # particle positions x_i/n kept as atoms
    blocks: tuple       # eps-shrunken density-1 intervals carrying Lebesgue mass
    atoms_excluded: tuple = field(default=())

    @property
    def n(self):
        return self.config.n

    def total_mass(self):
        return len(self.atoms) / self.n + sum(hi - lo for lo, hi in self.blocks)


def make_mu_n(x, mu, eps):
    """Build mu_n from the particle row and the eps-shrunken density-1 region."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    blocks = []
    for lo, hi in mu.full_density_intervals():
        if lo + eps < hi - eps:
            blocks.append((lo + eps, hi - eps))
    atoms, dropped = [], []
    for xi in x.x:
        pos = xi / x.n
        if _in_open_intervals(blocks, pos):
            dropped.append(pos)
        else:
            atoms.append(pos)
    return DiscreteMeasure(mu=mu, config=x, eps=float(eps),
                           atoms=tuple(atoms), blocks=tuple(blocks),
                           atoms_excluded=tuple(dropped))
