"""Tests for limit measures, discretization, and region classification."""

import math
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtedge import (
    InvalidDensity,
    MassNotOne,
    OutOfPolygon,
    ParticleConfig,
    RegionTag,
    SupportTooNarrow,
    classify_t,
    default_eps,
    discretize,
    make_limit_measure,
    make_mu_n,
    read_measure_file,
    region_interval,
    support_sets,
)

SYMMETRIC = [(-1.0, 1.0, (0.5,))]
TWO_BLOCK = [(0.0, 0.5, (1.0,)), (1.0, 1.5, (1.0,))]


def symmetric():
    return make_limit_measure(SYMMETRIC)


def two_block():
    return make_limit_measure(TWO_BLOCK)


# ---------------------------------------------------------------------------
# construction and validation


def test_symmetric_measure_basic():
    mu = symmetric()
    assert mu.a == -1.0 and mu.b == 1.0
    assert mu.mass() == pytest.approx(1.0, abs=1e-14)
    assert mu.first_moment() == pytest.approx(0.0, abs=1e-14)
    assert mu.density(0.0) == pytest.approx(0.5)
    assert mu.density(2.0) == 0.0


def test_two_block_structure():
    mu = two_block()
    assert mu.supp_mu_intervals() == [(0.0, 0.5), (1.0, 1.5)]
    assert mu.full_density_intervals() == [(0.0, 0.5), (1.0, 1.5)]
    assert mu.supp_lambda_minus_mu_intervals() == [(0.5, 1.0)]
    assert mu.first_moment() == pytest.approx(0.75)


def test_density_above_one_rejected():
    with pytest.raises(InvalidDensity):
        make_limit_measure([(0.0, 0.5, (2.0,))])


def test_negative_density_rejected():
    with pytest.raises(InvalidDensity):
        make_limit_measure([(0.0, 2.0, (1.0, -0.9))])


def test_mass_not_one_rejected():
    with pytest.raises(MassNotOne):
        make_limit_measure([(0.0, 4.0, (0.5,))])


def test_narrow_support_rejected():
    with pytest.raises(SupportTooNarrow):
        make_limit_measure([(0.0, 1.0, (1.0,))])


def test_zero_density_edge_piece_rejected():
    with pytest.raises(InvalidDensity):
        make_limit_measure([(0.0, 1.0, (0.0,)), (1.0, 3.0, (0.5,))])


def test_overlapping_pieces_rejected():
    with pytest.raises(ValueError):
        make_limit_measure([(0.0, 1.5, (0.5,)), (1.0, 2.5, (0.5,))])


def test_mass_tail_exact_is_rational():
    mu = two_block()
    assert mu.mass_tail_exact(Fraction(1, 4)) == Fraction(3, 4)
    assert mu.mass_tail_exact(Fraction(9, 8)) == Fraction(3, 8)
    assert mu.mass_tail_exact(mu.b + 1) == 0


# ---------------------------------------------------------------------------
# measure files


def test_read_measure_file(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("# a comment\n\n-1 1 0.5  # trailing comment\n")
    mu = read_measure_file(path)
    assert mu.pieces == symmetric().pieces


def test_read_measure_file_bad_token_reports_line(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("# header\n0 0.5 one\n")
    with pytest.raises(ValueError, match="line 2"):
        read_measure_file(path)


def test_read_measure_file_short_line_reports_line(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("0 0.5 1\n1 1.5\n")
    with pytest.raises(ValueError, match="line 2"):
        read_measure_file(path)


def test_read_measure_file_empty(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("# nothing here\n")
    with pytest.raises(ValueError):
        read_measure_file(path)


def test_packaged_measure_files():
    data = resources.files("gtedge") / "data"
    mu_sym = read_measure_file(str(data / "symmetric.txt"))
    mu_two = read_measure_file(str(data / "two_block.txt"))
    assert mu_sym.pieces == symmetric().pieces
    assert mu_two.pieces == two_block().pieces


# ---------------------------------------------------------------------------
# discretization


def test_discretize_symmetric_n4():
    assert discretize(symmetric(), 4).x == (3, 1, -1, -3)


def test_discretize_two_block_n4():
    assert discretize(two_block(), 4).x == (5, 4, 1, 0)


def test_particle_config_validation():
    with pytest.raises(ValueError):
        ParticleConfig(2, (0, 1))
    with pytest.raises(ValueError):
        ParticleConfig(3, (2, 0))
    with pytest.raises(ValueError):
        ParticleConfig(2, (1.5, 0))


def _check_quantile_bracketing(mu, n):
    x = discretize(mu, n)
    assert len(x.x) == n
    assert all(a > b for a, b in zip(x.x[:-1], x.x[1:]))
    for i, xi in enumerate(x.x, start=1):
        need = Fraction(2 * i - 1, 2 * n)
        assert mu.mass_tail_exact(Fraction(xi, n)) >= need
        assert mu.mass_tail_exact(Fraction(xi + 1, n)) < need


def test_discretize_quantile_bracketing():
    for mu in (symmetric(), two_block()):
        for n in (2, 3, 7, 16, 33):
            _check_quantile_bracketing(mu, n)


@settings(max_examples=30, deadline=None)
@given(w=st.floats(0.5, 2.0), g=st.floats(0.3, 3.0), n=st.integers(2, 24))
def test_discretize_two_equal_blocks_property(w, g, n):
    d = 1.0 / (2.0 * w)
    mu = make_limit_measure([(0.0, w, (d,)), (w + g, 2 * w + g, (d,))])
    _check_quantile_bracketing(mu, n)


def test_discretize_empirical_mean_tracks_first_moment():
    mu = two_block()
    x = discretize(mu, 200)
    mean = sum(x.x) / (200 * 200)
    assert mean == pytest.approx(mu.first_moment(), abs=0.01)


# ---------------------------------------------------------------------------
# support decomposition


def test_support_sets_symmetric():
    triple = support_sets(symmetric(), 0.5, 1.0)
    assert triple.S1 == ((0.5, 1.0),)
    assert triple.S3 == ((-1.0, 0.5),)
    assert triple.sup1() == 1.0 and triple.inf3() == -1.0


def test_support_sets_two_block():
    chi, eta = 0.6071428571428571, 0.42857142857142855
    triple = support_sets(two_block(), chi, eta)
    assert triple.S1 == ((1.0, 1.5),)
    assert triple.S2[0][0] == pytest.approx(0.5)
    assert triple.S2[0][1] == pytest.approx(chi)
    assert triple.S3[0] == (0.0, pytest.approx(chi + eta - 1))


def test_support_sets_out_of_polygon():
    with pytest.raises(OutOfPolygon):
        support_sets(symmetric(), 2.0, 0.5)
    with pytest.raises(OutOfPolygon):
        support_sets(symmetric(), 0.0, 3.0)


# ---------------------------------------------------------------------------
# classification


def test_classify_regions():
    mu_s, mu_t = symmetric(), two_block()
    assert classify_t(mu_s, 2.0) is RegionTag.MuPlus
    assert classify_t(mu_s, -2.0) is RegionTag.MuMinus
    assert classify_t(mu_s, 0.3) is RegionTag.Unclassifiable
    assert classify_t(mu_t, 0.25) is RegionTag.LambdaMinusMu
    assert classify_t(mu_t, 1.2) is RegionTag.LambdaMinusMu
    assert classify_t(mu_t, 3.0) is RegionTag.MuPlus
    assert classify_t(mu_t, -1.0) is RegionTag.MuMinus


def test_region_interval_unbounded_gap():
    tag, (lo, hi) = region_interval(symmetric(), 2.0)
    assert tag is RegionTag.MuPlus
    assert lo == 1.0 and math.isinf(hi)


def test_region_interval_density_one_block():
    tag, (lo, hi) = region_interval(two_block(), 0.25)
    assert tag is RegionTag.LambdaMinusMu
    assert (lo, hi) == (0.0, 0.5)


def test_region_interval_split_gap():
    # the bounded gap (0.5, 1) contains one sign change of the transform;
    # the two sides must partition it at the same crossing
    mu = two_block()
    tag_a, (lo_a, hi_a) = region_interval(mu, 0.55)
    tag_b, (lo_b, hi_b) = region_interval(mu, 0.95)
    assert tag_a is RegionTag.MuPlus and tag_b is RegionTag.MuMinus
    assert lo_a == 0.5 and hi_b == 1.0
    assert hi_a == pytest.approx(lo_b, abs=1e-9)
    assert 0.5 < hi_a < 1.0


def test_default_eps():
    assert default_eps(symmetric(), 2.0) == pytest.approx(0.1)
    eps = default_eps(two_block(), 0.02)
    assert eps == pytest.approx(0.01)
    assert 0 < eps <= 0.1


# ---------------------------------------------------------------------------
# comparison measure mu_n


def test_make_mu_n_two_block():
    mu = two_block()
    x = discretize(mu, 16)
    dm = make_mu_n(x, mu, eps=0.05)
    assert dm.blocks == ((0.05, 0.45), (1.05, 1.45))
    for pos in dm.atoms:
        assert not any(lo < pos < hi for lo, hi in dm.blocks)
    assert len(dm.atoms) + len(dm.atoms_excluded) == 16
    assert dm.total_mass() == pytest.approx(1.0, abs=0.1)


def test_make_mu_n_symmetric_keeps_all_atoms():
    mu = symmetric()
    x = discretize(mu, 8)
    dm = make_mu_n(x, mu, eps=0.05)
    assert dm.blocks == ()
    assert len(dm.atoms) == 8
    assert dm.atoms_excluded == ()


def test_make_mu_n_rejects_bad_eps():
    mu = symmetric()
    x = discretize(mu, 4)
    with pytest.raises(ValueError):
        make_mu_n(x, mu, eps=0.0)
