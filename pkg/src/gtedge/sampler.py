"""Ground-truth sampling of uniform interlacing (Gelfand-Tsetlin) patterns:
exhaustive enumeration for tiny rows, Glauber dynamics for moderate n, and
empirical correlation estimators with binomial errors.

A pattern stores rows 1..n, row r strictly decreasing of length r, row n equal
to the fixed top row; interlacing means y_i^(r+1) >= y_i^(r) > y_(i+1)^(r+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import ParticleConfig

__all__ = [
    "BudgetExceeded",
    "GTPattern",
    "pattern_count",
    "minimal_pattern",
    "maximal_pattern",
    "enumerate_patterns",
    "glauber_sample",
    "glauber_chain",
    "sample_patterns",
    "empirical_correlations",
]

BURN_IN_SWEEPS = lambda n: 20 * n * n          # noqa: E731
THINNING_SWEEPS = lambda n: n * n              # noqa: E731


class BudgetExceeded(Exception):
    """Enumeration request beyond n <= 6, x_1 - x_n <= 12."""


@dataclass(frozen=True)
class GTPattern:
    """rows[r-1] is row r (strictly decreasing integers, length r)."""

    rows: tuple

    @property
    def n(self):
        return len(self.rows)

    def top(self):
        return self.rows[-1]

    def occupied(self):
        """Set of (position, row) pairs."""
        return {(pos, r + 1) for r, row in enumerate(self.rows) for pos in row}

    def is_interlaced(self):
        for r in range(self.n - 1):
            lower, upper = self.rows[r], self.rows[r + 1]
            for i, y in enumerate(lower):
                if not (upper[i] >= y > upper[i + 1]):
                    return False
        return True


def pattern_count(x):
    """Number of interlacing completions: prod (x_i-x_j) / prod (j-i)."""
    num, den = 1, 1
    for i in range(x.n):
        for j in range(i + 1, x.n):
            num *= x.x[i] - x.x[j]
            den *= j - i
    return num // den


def minimal_pattern(x):
    """Every particle pushed maximally down-left."""
    n = x.n
    rows = []
    for r in range(1, n + 1):
        rows.append(tuple(x.x[i + n - r] + (n - r) for i in range(r)))
    return GTPattern(tuple(rows))


def maximal_pattern(x):
    """Every particle pushed maximally up-right."""
    n = x.n
    rows = [tuple(x.x[i] for i in range(r)) for r in range(1, n + 1)]
    return GTPattern(tuple(rows))


def enumerate_patterns(x):
    """Yield every interlacing completion of the top row exactly once."""
    if x.n > 6 or x.x[0] - x.x[-1] > 12:
        raise BudgetExceeded(f"enumeration limited to n <= 6, span <= 12; "
                             f"got n={x.n}, span={x.x[0] - x.x[-1]}")

    def complete(upper, acc):
        r = len(upper) - 1
        if r == 0:
            yield GTPattern(tuple(reversed(acc)) + (tuple(x.x),))
            return
        # row r entries: y_i in (upper[i+1], upper[i]], independently
        def rec(i, cur):
            if i == r:
                yield tuple(cur)
                return
            for val in range(upper[i + 1] + 1, upper[i] + 1):
                cur.append(val)
                yield from rec(i + 1, cur)
                cur.pop()

        for row in rec(0, []):
            yield from complete(row, acc + [row])

    top = tuple(x.x)
    if x.n == 1:
        yield GTPattern((top,))
        return
    yield from complete(top, [])


def _run_sweeps(rows, sweeps, rng):
    """In-place random-scan Glauber: rows is a list of lists (rows 1..n-1
    mutable, row n fixed)."""
    n = len(rows)
    sites = [(r, i) for r in range(n - 1) for i in range(r + 1)]
    n_sites = len(sites)
    steps = sweeps * n_sites
    block = 1 << 14
    done = 0
    while done < steps:
        m = min(block, steps - done)
        picks = rng.integers(0, n_sites, size=m)
        deltas = rng.integers(0, 2, size=m) * 2 - 1
        for p, d in zip(picks, deltas):
            r, i = sites[p]
            row = rows[r]
            val = row[i] + d
            above = rows[r + 1]
            if not (above[i] >= val > above[i + 1]):
                continue
            if r > 0:
                below = rows[r - 1]
                if i <= r - 1 and not val >= below[i]:
                    continue
                if i >= 1 and not below[i - 1] > val:
                    continue
            row[i] = val
        done += m
    return rows


def _as_pattern(rows):
    return GTPattern(tuple(tuple(row) for row in rows))


def glauber_sample(x, sweeps, seed):
    """One pattern after `sweeps` sweeps from the minimal packed start.

    One sweep is n(n-1)/2 proposals; each proposal moves a uniformly chosen
    interior particle by +-1 if interlacing survives, which leaves the uniform
    distribution invariant.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    rows = [list(row) for row in minimal_pattern(x).rows]
    _run_sweeps(rows, sweeps, rng)
    return _as_pattern(rows)


def glauber_chain(x, n_samples, seed, burn_in=None, thinning=None):
    """n_samples patterns from one chain (burn-in then thinned reads)."""
    n = x.n
    if burn_in is None:
        burn_in = BURN_IN_SWEEPS(n)
    if thinning is None:
        thinning = THINNING_SWEEPS(n)
    rng = np.random.Generator(np.random.Philox(key=seed))
    rows = [list(row) for row in minimal_pattern(x).rows]
    _run_sweeps(rows, burn_in, rng)
    out = []
    for _ in range(n_samples):
        _run_sweeps(rows, thinning, rng)
        out.append(_as_pattern(rows))
    return out


def _chain_job(args):
    x_tuple, n_samples, seed, burn_in, thinning = args
    x = ParticleConfig(len(x_tuple), x_tuple)
    return glauber_chain(x, n_samples, seed, burn_in, thinning)


def sample_patterns(x, n_samples, seed, chains=8, burn_in=None, thinning=None,
                    parallel=True):
    """n_samples patterns split over independent chains with derived seeds
    seed+0, seed+1, ...; chains run in separate processes when parallel."""
    chains = max(1, min(chains, n_samples))
    per = [n_samples // chains + (1 if c < n_samples % chains else 0)
           for c in range(chains)]
    jobs = [(tuple(x.x), per[c], seed + c, burn_in, thinning)
            for c in range(chains) if per[c] > 0]
    if parallel and len(jobs) > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(processes=len(jobs)) as pool:
            chunks = pool.map(_chain_job, jobs)
    else:
        chunks = [_chain_job(job) for job in jobs]
    return [p for chunk in chunks for p in chunk]


def empirical_correlations(samples, queries):
    """For each query subset (list of (position, row) pairs): the fraction of
    samples containing particles at all listed points, with binomial stderr."""
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    occ = [p.occupied() for p in samples]
    m = len(samples)
    out = []
    for subset in queries:
        subset = [(int(pos), int(row)) for pos, row in subset]
        hits = sum(1 for o in occ if all(pt in o for pt in subset))
        p_hat = hits / m
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / m)
        out.append((p_hat, stderr))
    return out
