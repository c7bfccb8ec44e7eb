"""Tests for pattern enumeration, extreme patterns, Glauber sampling, and
empirical correlation estimates."""

import math

import pytest

from gtedge import (
    BudgetExceeded,
    GTPattern,
    ParticleConfig,
    empirical_correlations,
    enumerate_patterns,
    glauber_chain,
    glauber_sample,
    hexagon_top_row,
    kernel_Kn,
    maximal_pattern,
    minimal_pattern,
    pattern_count,
    sample_patterns,
)


def test_pattern_count_anchors():
    assert pattern_count(ParticleConfig(2, (2, 0))) == 2
    assert pattern_count(hexagon_top_row(1, 1, 1)) == 2
    assert pattern_count(ParticleConfig(4, (6, 4, 2, 0))) == 64
    assert pattern_count(ParticleConfig(3, (2, 1, 0))) == 1


def test_enumeration_matches_count_and_is_unique():
    for top in ((2, 0), (4, 2, 0), (3, 1, 0), (6, 4, 2, 0)):
        x = ParticleConfig(len(top), top)
        pats = list(enumerate_patterns(x))
        assert len(pats) == pattern_count(x)
        assert len(set(pats)) == len(pats)
        for p in pats:
            assert p.top() == top
            assert p.is_interlaced()


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_patterns(ParticleConfig(7, (12, 10, 8, 6, 4, 2, 0))))
    with pytest.raises(BudgetExceeded):
        list(enumerate_patterns(ParticleConfig(2, (13, 0))))


def test_two_particle_patterns_explicit():
    pats = sorted(enumerate_patterns(ParticleConfig(2, (2, 0))),
                  key=lambda p: p.rows[0])
    assert pats[0].rows == ((1,), (2, 0))
    assert pats[1].rows == ((2,), (2, 0))
    assert pats[1].occupied() == {(2, 1), (2, 2), (0, 2)}


def test_interlacing_detects_violation():
    bad = GTPattern(((0,), (2, 0)))  # row-1 particle not above the gap
    assert not bad.is_interlaced()
    ok = GTPattern(((1,), (2, 0)))
    assert ok.is_interlaced()


def test_extreme_patterns():
    x = ParticleConfig(4, (7, 4, 2, 0))
    lo, hi = minimal_pattern(x), maximal_pattern(x)
    assert lo.is_interlaced() and hi.is_interlaced()
    assert lo.top() == hi.top() == (7, 4, 2, 0)
    for r in range(x.n):
        for a, b in zip(lo.rows[r], hi.rows[r]):
            assert a <= b
    assert lo.rows[0] == (3,)   # bottom particle packed down-left
    assert hi.rows[0] == (7,)


def test_extremes_bracket_enumeration():
    x = ParticleConfig(3, (4, 2, 0))
    lo, hi = minimal_pattern(x), maximal_pattern(x)
    for p in enumerate_patterns(x):
        for r in range(x.n):
            for a, v, b in zip(lo.rows[r], p.rows[r], hi.rows[r]):
                assert a <= v <= b


def test_glauber_deterministic_by_seed():
    x = ParticleConfig(3, (4, 2, 0))
    a = glauber_sample(x, sweeps=50, seed=7)
    b = glauber_sample(x, sweeps=50, seed=7)
    c = glauber_sample(x, sweeps=51, seed=7)
    assert a == b
    assert a.is_interlaced() and c.is_interlaced()
    assert a.top() == (4, 2, 0)
    with pytest.raises(ValueError):
        glauber_sample(x, sweeps=0, seed=1)


def test_glauber_moves_off_the_start():
    x = ParticleConfig(3, (4, 2, 0))
    seen = {glauber_sample(x, sweeps=40, seed=s) for s in range(12)}
    assert len(seen) > 1


def test_glauber_chain_shape():
    x = ParticleConfig(3, (4, 2, 0))
    out = glauber_chain(x, 5, seed=3, burn_in=30, thinning=5)
    assert len(out) == 5
    assert all(p.is_interlaced() for p in out)


def test_sample_patterns_split_and_parallel_agreement():
    x = ParticleConfig(3, (4, 2, 0))
    kw = dict(n_samples=10, seed=5, chains=4, burn_in=30, thinning=5)
    seq = sample_patterns(x, parallel=False, **kw)
    par = sample_patterns(x, parallel=True, **kw)
    assert len(seq) == 10
    assert seq == par


def test_empirical_correlations_counting():
    p1 = GTPattern(((1,), (2, 0)))
    p2 = GTPattern(((2,), (2, 0)))
    samples = [p1, p1, p2, p2, p2]
    est = empirical_correlations(samples, [[(1, 1)], [(2, 1)], [(2, 2)],
                                           [(2, 1), (2, 2)]])
    assert est[0][0] == pytest.approx(0.4)
    assert est[1][0] == pytest.approx(0.6)
    assert est[2][0] == pytest.approx(1.0)
    assert est[3][0] == pytest.approx(0.6)
    assert est[0][1] == pytest.approx(math.sqrt(0.4 * 0.6 / 5))
    assert est[2][1] == 0.0
    with pytest.raises(ValueError):
        empirical_correlations([p1], [[(1, 1)]])


def test_glauber_matches_kernel_one_point():
    x = ParticleConfig(4, (6, 4, 2, 0))
    samples = glauber_chain(x, 400, seed=21)
    sites = [(4, 2), (4, 1), (5, 3), (3, 2)]
    est = empirical_correlations(samples, [[pt] for pt in sites])
    for (pos, row), (p_hat, stderr) in zip(sites, est):
        want = float(kernel_Kn(x, pos, row, pos, row, mode="rational").exact)
        assert abs(p_hat - want) <= 4.0 * stderr + 1e-9, (pos, row)
