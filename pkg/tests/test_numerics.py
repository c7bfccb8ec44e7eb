import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtedge.numerics import (
    BoundaryZero,
    NoConvergence,
    SignedLog,
    Tolerance,
    count_roots,
    integrate_path,
    refine_root,
    signed_log_sum,
    signed_logsumexp,
)


# ---------------------------------------------------------------------------
# SignedLog


def test_signed_log_roundtrip():
    # log representation carries rel error ~ |logmag| * eps, hence the 1e-12
    for x in (3.5, -2.0, 1e-300, -1e280, 0.0):
        sl = SignedLog.from_float(x)
        assert sl.to_float() == pytest.approx(x, rel=1e-12, abs=1e-310)


def test_signed_log_from_int_exact():
    sl = SignedLog.from_int(-(10 ** 40))
    assert sl.sign == -1
    assert sl.logmag == pytest.approx(40 * math.log(10), rel=1e-15)
    assert SignedLog.from_int(0).sign == 0


def test_signed_log_from_fraction():
    fr = Fraction(-3, 7)
    sl = SignedLog.from_fraction(fr)
    assert sl.to_float() == pytest.approx(float(fr), rel=1e-15)


def test_signed_log_mul_div_pow():
    a = SignedLog.from_float(-3.0)
    b = SignedLog.from_float(0.5)
    assert (a * b).to_float() == pytest.approx(-1.5)
    assert (a / b).to_float() == pytest.approx(-6.0)
    assert (a ** 3).to_float() == pytest.approx(-27.0)
    assert (a ** 0).to_float() == 1.0
    assert (SignedLog.zero() * a).sign == 0
    assert abs(-a).to_float() == pytest.approx(3.0)


def test_signed_log_huge_products_no_overflow():
    big = SignedLog.from_float(1e300)
    prod = big * big * big
    assert prod.sign == 1
    assert prod.logmag == pytest.approx(3 * math.log(1e300))


def test_signed_log_sum_adjacent_magnitudes():
    # exp(700) - exp(699) = exp(699) (e - 1); verified against mpmath
    total = signed_log_sum([SignedLog(1, 700.0), SignedLog(-1, 699.0)])
    with mpmath.workdps(40):
        want = float(mpmath.log(mpmath.exp(700) - mpmath.exp(699)))
    assert total.sign == 1
    assert total.logmag == pytest.approx(want, abs=1e-12)


def test_signed_log_sum_exact_cancellation():
    total = signed_log_sum([SignedLog(1, 5.0), SignedLog(-1, 5.0)])
    assert total.sign == 0


def test_signed_log_sum_permutation_invariance():
    rng = np.random.Generator(np.random.Philox(key=7))
    logs = rng.uniform(-300.0, 300.0, size=1000)
    signs = rng.choice([-1, 1], size=1000)
    terms = [SignedLog(int(s), float(l)) for s, l in zip(signs, logs)]
    ref = signed_log_sum(terms)
    for seed in range(3):
        perm = np.random.Generator(np.random.Philox(key=seed)).permutation(1000)
        got = signed_log_sum([terms[i] for i in perm])
        assert got.sign == ref.sign
        assert got.logmag == pytest.approx(ref.logmag, abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([-1, 1]), st.floats(-50, 50)),
                min_size=1, max_size=20))
def test_signed_log_sum_matches_floats(pairs):
    terms = [SignedLog(s, l) for s, l in pairs]
    want = math.fsum(s * math.exp(l) for s, l in pairs)
    got = signed_log_sum(terms).to_float()
    assert got == pytest.approx(want, rel=1e-10, abs=1e-280)


def test_signed_logsumexp_matches_and_reports_bits():
    logs = [0.0, 0.0, -1.0]
    signs = [1, -1, 1]
    total, bits = signed_logsumexp(logs, signs)
    assert total.to_float() == pytest.approx(math.exp(-1.0))
    assert bits >= 1
    total2, bits2 = signed_logsumexp([2.0, 1.0], [1, 1])
    assert bits2 == 0
    assert total2.to_float() == pytest.approx(math.exp(2) + math.exp(1))


# ---------------------------------------------------------------------------
# path integration


def _square_path(n_per_side=16, radius=1.0):
    corners = [radius * (1 + 1j), radius * (-1 + 1j),
               radius * (-1 - 1j), radius * (1 - 1j)]
    nodes = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        for i in range(n_per_side):
            nodes.append(a + (b - a) * i / n_per_side)
    nodes.append(corners[0])
    return nodes


def test_integrate_path_winding_one_over_z():
    val = integrate_path(lambda z: 1.0 / z, _square_path(16))
    assert abs(val - 2j * math.pi) < 1e-10


def test_integrate_path_constant_segment():
    val = integrate_path(lambda z: np.ones_like(z), [0.0, 1.0 + 2.0j])
    assert abs(val - (1.0 + 2.0j)) < 1e-14


def test_integrate_path_entire_function_on_ray():
    # int of exp(w^3/3) along a short rotated ray, against a refined reference
    path = [0.0, 2.0 * np.exp(1j * math.pi / 3)]
    f = lambda z: np.exp(z ** 3 / 3.0)
    val = integrate_path(f, path)
    fine = [path[0] + (path[1] - path[0]) * i / 64 for i in range(65)]
    ref = integrate_path(f, fine, tol=Tolerance(abs_tol=1e-13))
    assert abs(val - ref) < 1e-9


def test_integrate_path_closed_contour_of_analytic_is_zero():
    val = integrate_path(lambda z: np.exp(z), _square_path(8))
    assert abs(val) < 1e-12


# ---------------------------------------------------------------------------
# root counting


def test_count_roots_simple_pole_free_cases():
    assert count_roots(lambda z: z ** 2 + 1.0,
                       (-0.5, 0.5, 0.5, 1.5)) == 1
    assert count_roots(lambda z: (z - 0.2) * (z + 0.3 - 0.1j),
                       (-1.0, 1.0, -1.0, 1.0)) == 2
    assert count_roots(np.sin, (3.0, 3.3, -0.2, 0.2)) == 1


def test_count_roots_analytic_no_zero():
    assert count_roots(lambda z: np.exp(z), (-1.0, 1.0, -1.0, 1.0)) == 0


def test_count_roots_multiplicity():
    assert count_roots(lambda z: (z - 0.1j) ** 3,
                       (-0.5, 0.5, -0.4, 0.6)) == 3


def test_count_roots_additive_over_split():
    f = lambda z: (z - 0.5) * (z + 0.5)
    whole = count_roots(f, (-1.0, 1.0, -0.25, 0.25))
    left = count_roots(f, (-1.0, 0.0 + 1e-3, -0.25, 0.25))
    right = count_roots(f, (0.0 + 1e-3, 1.0, -0.25, 0.25))
    assert whole == left + right == 2


def test_count_roots_boundary_zero_detected():
    with pytest.raises(BoundaryZero):
        count_roots(lambda z: z, (0.0, 1.0, -0.5, 0.5))


# ---------------------------------------------------------------------------
# root refinement


def test_refine_root_sqrt2():
    root = refine_root(lambda z: z * z - 2.0, lambda z: 2.0 * z, 1.3)
    assert abs(root - math.sqrt(2)) < 1e-12


def test_refine_root_pi_with_bracket():
    root = refine_root(np.sin, np.cos, 3.0, bracket=(2.5, 3.5))
    assert abs(root - math.pi) < 1e-12


def test_refine_root_double_root():
    root = refine_root(lambda z: (z - 1.0) ** 2, lambda z: 2.0 * (z - 1.0),
                       1.4)
    assert abs(root - 1.0) < 1e-6


def test_refine_root_no_convergence():
    with pytest.raises(NoConvergence):
        refine_root(lambda z: z * z + 1.0, lambda z: 2.0 * z, 50.0,
                    tol=Tolerance(abs_tol=1e-15, rel_tol=0.0, max_depth=5))


def test_tolerance_target():
    tol = Tolerance(abs_tol=1e-9, rel_tol=1e-6)
    assert tol.target(1000.0) == pytest.approx(1e-3)
    assert tol.target(0.0) == pytest.approx(1e-9)
