"""Tests for Cauchy transforms, the edge curve, case classification, the
saddle-function derivatives, and the liquid-region membership test."""

import math

import pytest

from gtedge import (
    DegenerateEdge,
    EpsViolation,
    OnSupportS,
    RegionTag,
    TOnSupport,
    cauchy,
    cauchy_derivative,
    cauchy_ext,
    classify_case,
    discrete_cauchy_all,
    discretize,
    edge_nonasymptotic,
    edge_point,
    f_derivatives,
    liquid_region_test,
    locate_Lt,
    make_limit_measure,
    make_mu_n,
)
from gtedge.measures import OutOfPolygon

SQ3 = math.sqrt(3.0)


def symmetric():
    return make_limit_measure([(-1.0, 1.0, (0.5,))])


def two_block():
    return make_limit_measure([(0.0, 0.5, (1.0,)), (1.0, 1.5, (1.0,))])


def three_block():
    return make_limit_measure([(0.0, 0.4, (1.0,)), (0.8, 1.1, (1.0,)),
                               (1.5, 1.8, (1.0,))])


# ---------------------------------------------------------------------------
# Cauchy transform


def test_cauchy_symmetric_closed_form():
    mu = symmetric()
    # (1/2) log((t+1)/(t-1)) off the support
    assert cauchy(mu, 3.0).real == pytest.approx(0.5 * math.log(2.0), abs=1e-14)
    assert cauchy(mu, 2.0).real == pytest.approx(0.5 * math.log(3.0), abs=1e-14)
    w = 0.3 + 0.7j
    got = cauchy(mu, w)
    want = 0.5 * (math.log(abs(w + 1) / abs(w - 1))
                  + 1j * (math.atan2(w.imag, w.real + 1)
                          - math.atan2(w.imag, w.real - 1)))
    assert abs(got - want) < 1e-13


def test_cauchy_conjugate_symmetry_and_decay():
    mu = two_block()
    w = 0.6 + 0.4j
    assert abs(cauchy(mu, w.conjugate()) - cauchy(mu, w).conjugate()) < 1e-14
    big = 1e7
    assert cauchy(mu, big).real * big == pytest.approx(1.0, abs=1e-5)


def test_cauchy_derivative_symmetric():
    mu = symmetric()
    assert cauchy_derivative(mu, 2.0, 1).real == pytest.approx(-1 / 3, abs=1e-13)
    assert cauchy_derivative(mu, 2.0, 2).real == pytest.approx(4 / 9, abs=1e-13)
    # finite-difference crosscheck off the axis
    w, h = 1.4 + 0.9j, 1e-5
    fd = (cauchy(mu, w + h) - cauchy(mu, w - h)) / (2 * h)
    assert abs(fd - cauchy_derivative(mu, w, 1)) < 1e-8


def test_cauchy_ext_matches_plain_transform_off_support():
    mu = symmetric()
    exp_c, c1 = cauchy_ext(mu, 2.0)
    assert exp_c == pytest.approx(SQ3, abs=1e-13)
    assert c1 == pytest.approx(-1 / 3, abs=1e-13)


def test_cauchy_ext_through_density_one_block():
    # inside a density-1 block the extension of e^C continues to negative
    # values: w(w-1)/((w-1/2)(w-3/2)) = -3/5 at w = 1/4
    exp_c, c1 = cauchy_ext(two_block(), 0.25)
    assert exp_c == pytest.approx(-0.6, abs=1e-12)
    assert c1 == pytest.approx(112 / 15, abs=1e-12)


# ---------------------------------------------------------------------------
# edge curve


def test_edge_point_symmetric_anchor():
    ep = edge_point(symmetric(), 2.0)
    assert ep.chi == pytest.approx(SQ3 - 1.0, abs=1e-12)
    assert ep.eta == pytest.approx(7.0 - 4.0 * SQ3, abs=1e-12)
    assert ep.region is RegionTag.MuPlus
    assert ep.case_id == 1
    assert ep.multiplicity == 2
    assert ep.f3 == pytest.approx((2.0 - SQ3) / 9.0, abs=1e-12)
    assert ep.beta == pytest.approx((18.0 * (2.0 + SQ3)) ** (1 / 3) / 3.0,
                                    abs=1e-12)
    assert ep.tangent == (1.0, pytest.approx(SQ3 - 1.0, abs=1e-12))
    assert ep.normal[1] == -1.0


def test_edge_point_two_block_anchor():
    ep = edge_point(two_block(), 0.25)
    assert ep.region is RegionTag.LambdaMinusMu
    assert ep.case_id == 8
    assert ep.chi == pytest.approx(17 / 28, abs=1e-12)
    assert ep.eta == pytest.approx(3 / 7, abs=1e-12)
    assert ep.expC == pytest.approx(-0.6, abs=1e-12)
    assert ep.f3 > 0


def test_edge_point_mirror_cases():
    mu = symmetric()
    assert classify_case(mu, -2.0) == 12
    ep_p, ep_m = edge_point(mu, 2.0), edge_point(mu, -2.0)
    assert ep_m.chi == pytest.approx(1.0 - ep_p.eta - ep_p.chi, abs=1e-12)
    assert ep_m.eta == pytest.approx(ep_p.eta, abs=1e-12)


def test_edge_point_far_field_limit():
    # chi_E(t) -> 1/2 + first moment as t -> infinity; f''' underflows the
    # multiplicity test out there, so the atypical escape hatch is needed
    mu = symmetric()
    ep = edge_point(mu, 1e4, allow_atypical=True)
    assert ep.chi == pytest.approx(0.5, abs=1e-4)
    assert ep.eta < 1e-6
    assert ep.multiplicity == 3 and math.isnan(ep.beta)


def test_edge_point_degenerate_far_parameter():
    with pytest.raises(DegenerateEdge):
        edge_point(symmetric(), 1e7)


def test_edge_point_rejects_support_parameter():
    with pytest.raises(ValueError):
        edge_point(symmetric(), 0.5)


# ---------------------------------------------------------------------------
# interval taxonomy


def test_locate_Lt_unbounded_kinds():
    ep = edge_point(symmetric(), 2.0)
    lt = locate_Lt(symmetric(), ep.chi, ep.eta, 2.0)
    assert lt.kind == "J1" and math.isinf(lt.hi)
    lt = locate_Lt(symmetric(), ep.chi, ep.eta, -5.0)
    assert lt.kind == "J2" and math.isinf(-lt.lo)


def test_locate_Lt_two_block_bounded_kinds():
    mu = two_block()
    ep = edge_point(mu, 0.25)
    assert locate_Lt(mu, ep.chi, ep.eta, 0.25).kind == "J4"
    assert locate_Lt(mu, ep.chi, ep.eta, 0.75).kind == "J3"
    with pytest.raises(TOnSupport):
        locate_Lt(mu, ep.chi, ep.eta, 0.55)


def test_locate_Lt_gap_kinds():
    mu = three_block()
    lt = locate_Lt(mu, 1.6, 0.3, 0.6)
    assert (lt.kind, lt.lo, lt.hi) == ("GapK3", 0.4, 0.8)
    assert locate_Lt(mu, 1.6, 0.3, 1.0).kind == "J4"
    assert locate_Lt(mu, 1.6, 0.3, 1.55).kind == "J3"
    assert locate_Lt(mu, 1.6, 0.3, 2.5).kind == "J1"
    assert locate_Lt(mu, 1.6, 0.3, -1.0).kind == "J2"
    assert locate_Lt(mu, 0.2, 1.0, 0.6).kind == "GapK1"
    assert locate_Lt(mu, 0.2, 1.0, 1.3).kind == "GapK1"
    lt = locate_Lt(mu, 1.2, 0.25, 0.95)
    assert (lt.kind, lt.lo, lt.hi) == ("GapK2", 0.8, 1.1)


# ---------------------------------------------------------------------------
# saddle-function derivatives


def test_f_derivatives_double_root_at_edge_parameter():
    for mu, t in ((symmetric(), 2.0), (two_block(), 0.25)):
        ep = edge_point(mu, t)
        f1 = f_derivatives(mu, ep.chi, ep.eta, t, 1)
        f2 = f_derivatives(mu, ep.chi, ep.eta, t, 2)
        f3 = f_derivatives(mu, ep.chi, ep.eta, t, 3)
        assert abs(f1) < 1e-10
        assert abs(f2) < 1e-10
        assert f3.real == pytest.approx(ep.f3, rel=1e-9)


def test_f_derivatives_consistent_with_finite_differences():
    mu = two_block()
    ep = edge_point(mu, 0.25)
    w, h = 0.3 + 0.6j, 1e-5
    for k in (0, 1, 2, 3):
        fd = (f_derivatives(mu, ep.chi, ep.eta, w + h, k)
              - f_derivatives(mu, ep.chi, ep.eta, w - h, k)) / (2 * h)
        an = f_derivatives(mu, ep.chi, ep.eta, w, k + 1)
        assert abs(fd - an) < 1e-7 * (1.0 + abs(an))


def test_f_derivatives_rejects_w_on_S():
    mu = symmetric()
    ep = edge_point(mu, 2.0)
    with pytest.raises(OnSupportS):
        f_derivatives(mu, ep.chi, ep.eta, 0.9, 1)
    with pytest.raises(OnSupportS):
        f_derivatives(mu, ep.chi, ep.eta, 2.0, 0)  # k=0 needs complex w


# ---------------------------------------------------------------------------
# liquid region


def test_liquid_region_symmetric():
    mu = symmetric()
    assert liquid_region_test(mu, 0.0, 0.5)
    assert liquid_region_test(mu, 0.0, 0.9)
    assert not liquid_region_test(mu, 0.9, 0.05)
    ep = edge_point(mu, 2.0)
    assert liquid_region_test(mu, ep.chi, ep.eta + 0.2)
    assert not liquid_region_test(mu, ep.chi + 0.05, ep.eta)


def test_liquid_region_two_block_edge_sides():
    mu = two_block()
    ep = edge_point(mu, 0.25)
    assert liquid_region_test(mu, ep.chi, ep.eta + 0.02)
    assert not liquid_region_test(mu, ep.chi, ep.eta - 0.02)


def test_liquid_region_polygon_guard():
    with pytest.raises(OutOfPolygon):
        liquid_region_test(two_block(), 0.25, 0.2)


# ---------------------------------------------------------------------------
# discrete counterpart


def test_discrete_cauchy_edge_identity():
    mu = two_block()
    x = discretize(mu, 64)
    mu_n = make_mu_n(x, mu, eps=0.05)
    t = 0.25
    exp_c, (c1,) = discrete_cauchy_all(mu_n, t, kmax=1)
    chi_n, eta_n = edge_nonasymptotic(mu_n, t)
    # by construction t - chi_n - eta_n + 1 = (t - chi_n) e^{C_n(t)}
    lhs = t - chi_n - eta_n + 1.0
    rhs = (t - chi_n) * exp_c
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_discrete_edge_approaches_asymptotic():
    mu = two_block()
    ep = edge_point(mu, 0.25)
    prev = None
    for n in (50, 200, 800):
        x = discretize(mu, n)
        mu_n = make_mu_n(x, mu, eps=0.05)
        chi_n, eta_n = edge_nonasymptotic(mu_n, 0.25)
        err = abs(chi_n - ep.chi) + abs(eta_n - ep.eta)
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 5e-3


def test_discrete_cauchy_derivatives_match_finite_differences():
    mu = two_block()
    x = discretize(mu, 32)
    mu_n = make_mu_n(x, mu, eps=0.05)
    t, h = 0.25, 1e-6
    _, derivs = discrete_cauchy_all(mu_n, t, kmax=3)
    ep, _ = discrete_cauchy_all(mu_n, t + h, kmax=1)
    em, _ = discrete_cauchy_all(mu_n, t - h, kmax=1)
    fd_c1 = (math.log(abs(ep)) - math.log(abs(em))) / (2 * h)
    assert fd_c1 == pytest.approx(derivs[0], rel=1e-5)
    _, dp = discrete_cauchy_all(mu_n, t + h, kmax=2)
    _, dm = discrete_cauchy_all(mu_n, t - h, kmax=2)
    assert (dp[0] - dm[0]) / (2 * h) == pytest.approx(derivs[1], rel=1e-4)
    assert (dp[1] - dm[1]) / (2 * h) == pytest.approx(derivs[2], rel=1e-4)


def test_eps_violation_near_region_boundary():
    mu = two_block()
    x = discretize(mu, 16)
    mu_n = make_mu_n(x, mu, eps=0.1)
    with pytest.raises(EpsViolation):
        edge_nonasymptotic(mu_n, 0.45)  # within eps of the block edge at 0.5
