import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from s3decomp import laplace as L
from s3decomp import moments

P0 = (1 / 9, 1 / 3)


def _f_product_form(a, b):
    # exp(f) written as a single power product, then logged
    def xx(x):
        return x * math.log(x) if x > 0 else 0.0
    return (b * math.log(3) + xx(2 - 3 * a - 2 * b) + xx(3 * a + 2 * b) - (2 / 3 + a + b) * math.log(4)
            - xx(a) - xx(b) - 2 * xx(2 / 3 - a - b) - xx(a + b - 1 / 3))


def _interior_points(rng, k):
    out = []
    while len(out) < k:
        a, b = rng.uniform(0.01, 0.65, 2)
        if 1 / 3 + 0.01 < a + b < 2 / 3 - 0.01:
            out.append((float(a), float(b)))
    return out


def test_f_reference_values():
    assert L.f(P0) == pytest.approx(2 * math.log(3) - 4 / 3 * math.log(4), abs=1e-15)
    assert L.f(P0) == pytest.approx(0.348832, abs=1e-6)
    assert L.f((2 / 3, 0)) == pytest.approx(0.174416, abs=1e-6)
    assert L.f((2 / 3, 0)) == pytest.approx(L.f(P0) / 2, abs=1e-14)
    assert L.f((0, 1 / 3)) == pytest.approx(2 / 3 * math.log(4 / 3), abs=1e-14)
    assert L.f((0, 1 / 3)) == pytest.approx(0.191788, abs=1e-6)
    assert L.f((0, 2 / 3)) == pytest.approx(-math.log(3) / 3, abs=1e-14)
    assert L.f((0, 2 / 3)) == pytest.approx(-0.366204, abs=1e-6)


def test_f_rejects_outside():
    with pytest.raises(ValueError):
        L.f((0.1, 0.1))
    with pytest.raises(ValueError):
        L.f((0.7, 0.0))


def test_f_transcription_and_asymmetry():
    rng = np.random.default_rng(5)
    pts = _interior_points(rng, 5)
    for a, b in pts:
        assert L.f((a, b)) == pytest.approx(_f_product_form(a, b), abs=1e-13)
        if L.in_region(b, a, tol=0):
            assert abs(L.f((a, b)) - L.f((b, a))) > 1e-6


def test_grad_zero_at_p0():
    fa, fb = L.grad_f(P0)
    assert abs(fa) < 1e-12 and abs(fb) < 1e-12
    assert abs(L.stationarity_residual(*P0)) < 1e-12


def test_grad_rejects_boundary():
    with pytest.raises(ValueError):
        L.grad_f((0.0, 0.5))


def test_grad_finite_differences():
    eps = 1e-6
    for a, b in _interior_points(np.random.default_rng(1), 100):
        fa, fb = L.grad_f((a, b))
        da = (L.f((a + eps, b)) - L.f((a - eps, b))) / (2 * eps)
        db = (L.f((a, b + eps)) - L.f((a, b - eps))) / (2 * eps)
        assert abs(fa - da) < 1e-6 and abs(fb - db) < 1e-6


def test_hessian_exact_at_p0():
    hm = L.hessian_f(L.P0_EXACT)
    assert (hm.faa, hm.fab, hm.fbb) == (-9, -6, -13)
    assert hm.det == 81
    lo, hi = hm.eigenvalues()
    assert lo == pytest.approx(-11 - 2 * math.sqrt(10), abs=1e-9)
    assert hi == pytest.approx(-11 + 2 * math.sqrt(10), abs=1e-9)
    assert hi < 0


def test_hessian_finite_differences():
    eps = 1e-6
    for a, b in _interior_points(np.random.default_rng(2), 20):
        hm = L.hessian_f((a, b))
        ga = [(x - y) / (2 * eps) for x, y in zip(L.grad_f((a + eps, b)), L.grad_f((a - eps, b)))]
        gb = [(x - y) / (2 * eps) for x, y in zip(L.grad_f((a, b + eps)), L.grad_f((a, b - eps)))]
        for exact, fd in ((hm.faa, ga[0]), (hm.fab, ga[1]), (hm.fab, gb[0]), (hm.fbb, gb[1])):
            assert abs(exact - fd) <= 1e-5 * max(1.0, abs(exact))


def test_b_star():
    assert L.b_star(1 / 9) == pytest.approx(1 / 3, abs=1e-15)
    assert L.b_star(0) == 0
    for a in np.linspace(0, 2 / 3, 37):
        b = L.b_star(a)
        assert abs(L.stationarity_residual(a, b)) < 1e-12


def test_h_roots():
    roots = L.h_roots()
    assert len(roots) == 3
    for r, want in zip(roots, (0, 1 / 9, 2 / 3)):
        assert r == pytest.approx(want, abs=1e-9)


def test_stationary_report():
    rep = L.find_stationary_points()
    pts = sorted((p.a, p.b) for p, _ in rep.points)
    assert len(pts) == 2
    assert pts[0] == pytest.approx((1 / 9, 1 / 3), abs=1e-9)
    assert pts[1] == pytest.approx((2 / 3, 0), abs=1e-9)
    assert rep.global_max.a == pytest.approx(1 / 9, abs=1e-9)
    assert rep.global_max.b == pytest.approx(1 / 3, abs=1e-9)
    candidates = [v for _, v in rep.points] + [v for _, _, v in rep.boundary_maxima] + [v for _, v in rep.corners]
    assert rep.global_max_value == max(candidates)


def test_boundary_maxima():
    bm = {s: (p, v) for s, p, v in L.boundary_maxima()}
    p, v = bm["a=0"]
    assert p.b == pytest.approx(0.393226, abs=1e-5) and v == pytest.approx(0.253396, abs=1e-5)
    p, v = bm["a+b=1/3"]
    assert p.b == pytest.approx(0.280776, abs=1e-5) and v == pytest.approx(0.245950, abs=1e-5)


def test_boundary_concavity_and_monotonicity():
    tiny = 1e-6
    for b in np.linspace(1 / 3 + tiny, 2 / 3 - tiny, 50):
        assert L.d2_segment_a0(b) < 0
    for b in np.linspace(tiny, 1 / 3 - tiny, 50):
        assert L.d2_segment_low_diag(b) < 0
    for b in np.linspace(tiny, 2 / 3 - tiny, 50):
        assert L.d_segment_high_diag(b) < 0
    for a in np.linspace(1 / 3 + tiny, 2 / 3 - tiny, 50):
        assert L.d_segment_b0(a) > 0


def test_segment_derivatives_match_f():
    eps = 1e-6
    for b in (0.4, 0.5, 0.6):
        fd = (L.f((0, b + eps)) - L.f((0, b - eps))) / (2 * eps)
        assert L.d_segment_a0(b) == pytest.approx(fd, abs=1e-6)
    for b in (0.1, 0.2, 0.3):
        fd = (L.f((1 / 3 - b - eps, b + eps)) - L.f((1 / 3 - b + eps, b - eps))) / (2 * eps)
        assert L.d_segment_low_diag(b) == pytest.approx(fd, abs=1e-6)
        fd = (L.f((2 / 3 - b - eps, b + eps)) - L.f((2 / 3 - b + eps, b - eps))) / (2 * eps)
        assert L.d_segment_high_diag(b) == pytest.approx(fd, abs=1e-6)
    for a in (0.4, 0.5, 0.6):
        fd = (L.f((a + eps, 0)) - L.f((a - eps, 0))) / (2 * eps)
        assert L.d_segment_b0(a) == pytest.approx(fd, abs=1e-6)


def test_grid_maximum_unique():
    vals, aa, bb, best, vmax = L.grid_maximum(2000)
    assert vmax == pytest.approx(L.F_P0, abs=1e-6)
    near = vals >= vmax - 1e-6
    assert np.all(np.hypot(aa[near] - 1 / 9, bb[near] - 1 / 3) < 1e-2)


def test_g_values():
    assert L.g_limit(P0) == pytest.approx(81 / (4 * math.pi) * math.sqrt(1.5), rel=1e-14)
    assert L.g_limit(P0) == pytest.approx(7.894, abs=1e-3)
    for n in (10**3, 10**6):
        assert abs(L.g_n(P0, n) - L.g_limit(P0)) < 50 / n
    assert math.isfinite(L.g_n((1 / 3, 0), 30))
    with pytest.raises(ValueError):
        L.g_limit((1 / 3, 0))


def test_laplace_identity():
    for n in range(3, 301, 3):
        want = math.log(math.sqrt(1.5) * 4.5) + (2 * n / 3) * math.log(27 / 16)
        assert abs(L.log_laplace_approximation(n) - want) < 1e-12
        assert L.laplace_approximation(n) == pytest.approx(math.exp(want), rel=1e-12)
    assert math.exp(L.log_laplace_approximation(0)) == pytest.approx(2 * math.pi / 9 * L.g_limit(P0), rel=1e-12)
    assert math.exp(L.log_laplace_approximation(0)) == pytest.approx(5.511, abs=1e-3)


def test_laplace_convergence():
    errs = [abs(moments.log_fraction(moments.expected_Y2_exact(n)) - L.log_laplace_approximation(n))
            for n in (30, 60, 120, 240)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


# peak (A, B) of the exact summands; frozen from the first run
PEAKS = {30: (3, 10), 60: (6, 20), 120: (13, 40), 240: (26, 80)}


@pytest.mark.parametrize("n", sorted(PEAKS))
def test_summand_peak(n):
    prof = L.summand_profile(n)
    assert prof["peak"] == PEAKS[n]
    A, B = prof["peak"]
    assert abs(A - n / 9) <= 1 and abs(B - n / 3) <= 1
    assert all(r.log_exact > -math.inf for r in prof["rows"])


def test_summand_peak_error_is_order_one_over_n():
    errs = {n: abs(L.summand_profile(n)["peak_ratio"] - 1) for n in (30, 60, 120, 240)}
    for n, e in errs.items():
        assert e * n < 0.3
    assert all(errs[2 * n] < errs[n] for n in (30, 60, 120))


def test_gosper_factorial():
    assert L.log_gosper_factorial(0) == pytest.approx(0.5 * math.log(math.pi / 3), abs=1e-15)
    errs = [abs(L.log_gosper_factorial(s) - math.lgamma(s + 1)) for s in (1, 2, 5, 20)]
    assert max(errs) < 0.01
    assert all(b < a for a, b in zip(errs, errs[1:]))
    with pytest.raises(ValueError):
        L.summand_profile(603)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0, 2 / 3), b=st.floats(0, 2 / 3))
def test_f_finite_on_closed_region(a, b):
    if L.in_region(a, b, tol=0):
        assert math.isfinite(L.f((a, b)))
        assert L.f((a, b)) <= L.F_P0 + 1e-12
