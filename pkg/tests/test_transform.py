import math
import threading

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ncs.errors import NonConvergentError
from ncs.hyper import HypergeometricModel
from ncs.states import StateFamily
from ncs.thermal import ThermalParams, husimi_q, p_quasi
from ncs.transform import (
    RadialFunction,
    clear_moment_cache,
    function_moments,
    gaussian_integral_check,
    geometric_decomposition,
    gft,
    gft_inverse,
    kernel_series,
    mehta_anti_diagonal,
    mehta_formula_check,
    normal_ordered_moment_check,
    optical_equivalence_check,
    thermal_p_function,
    thermal_q_function,
)

CANON = StateFamily(HypergeometricModel.canonical())
GRID = np.array([0.1, 0.5, 1.0, 2.0, 5.0, 10.0])


def bg(k):
    return StateFamily(HypergeometricModel.pho(k), "bg")


def kp(k):
    return StateFamily(HypergeometricModel.pho(k), "kp")


class TestForward:
    def test_identity_fixed_point(self):
        one = RadialFunction.constant(1.0)
        for fam in (CANON, bg(1.0), bg(2.5), kp(1.0)):
            assert_allclose(gft(fam, one, GRID), 1.0, rtol=1e-10)

    def test_examples(self):
        t = ThermalParams(1.0)
        assert gft(CANON, thermal_p_function(CANON, t), 2.0) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-10)
        fam = bg(1.0)
        assert gft(fam, thermal_p_function(fam, t), 2.0) == pytest.approx(1.0 / (math.e + 1.0), rel=1e-10)

    def test_zero_argument(self):
        t = ThermalParams(1.0)
        assert gft(bg(1.0), thermal_p_function(bg(1.0), t), 0.0) == pytest.approx(0.5, rel=1e-12)

    def test_kernel_series_canonical(self):
        for u in (0.5, 3.0):
            assert kernel_series(CANON, u) == pytest.approx(float(mp.besseli(0, 2 * math.sqrt(u))), rel=1e-13)

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=3),
           st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=3),
           st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
    def test_linearity(self, p1, p2, c1, c2):
        f1 = RadialFunction(lambda x, c=tuple(p1): np.polyval(c, x))
        f2 = RadialFunction(lambda x, c=tuple(p2): np.polyval(c, x))
        combo = RadialFunction(lambda x: c1 * f1(x) + c2 * f2(x))
        fam = bg(1.0)
        lhs = gft(fam, combo, GRID[:4])
        rhs = c1 * gft(fam, f1, GRID[:4]) + c2 * gft(fam, f2, GRID[:4])
        scale = abs(c1) * np.abs(gft(fam, f1, GRID[:4])) + abs(c2) * np.abs(gft(fam, f2, GRID[:4])) + 1e-300
        assert np.all(np.abs(lhs - rhs) <= 1e-10 * np.maximum(scale, 1.0))

    def test_moment_cache_is_thread_safe(self):
        clear_moment_cache()
        fam = bg(2.5)
        f = thermal_p_function(fam, ThermalParams(1.0))
        results = []

        def work():
            results.append(function_moments(fam, f, 20).copy())

        threads = [threading.Thread(target=work) for _ in range(4)]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        for r in results[1:]:
            assert np.array_equal(r[:21], results[0][:21])


@pytest.mark.parametrize("nbar", [0.5, 1.0, 2.0])
def test_canonical_round_trip(nbar):
    t = ThermalParams(nbar)
    assert_allclose(gft(CANON, thermal_p_function(CANON, t), GRID), husimi_q(CANON, t, GRID), rtol=1e-8)
    assert_allclose(gft_inverse(CANON, thermal_q_function(CANON, t), GRID), p_quasi(CANON, t, GRID), rtol=1e-8)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.5])
def test_pho_bg_round_trip(k):
    fam = bg(k)
    for nbar in (0.5, 2.0):
        t = ThermalParams(nbar)
        assert_allclose(gft(fam, thermal_p_function(fam, t), GRID), husimi_q(fam, t, GRID), rtol=1e-8)
        assert_allclose(gft_inverse(fam, thermal_q_function(fam, t), GRID), p_quasi(fam, t, GRID), rtol=1e-8)


def test_pho_kp_round_trip_single():
    fam = kp(1.0)
    t = ThermalParams(1.0)
    assert_allclose(gft(fam, thermal_p_function(fam, t), GRID), husimi_q(fam, t, GRID), rtol=1e-5)
    back = gft_inverse(fam, thermal_q_function(fam, t), 1.0)
    assert back == pytest.approx(p_quasi(fam, t, 1.0), rel=1e-5)


class TestInverse:
    def test_constant(self):
        for fam in (CANON, bg(1.0), kp(1.0)):
            assert gft_inverse(fam, RadialFunction.constant(1.0), 1.3) == pytest.approx(1.0, rel=1e-10)

    def test_canonical_example(self):
        t = ThermalParams(1.0)
        assert gft_inverse(CANON, thermal_q_function(CANON, t), 1.0) == pytest.approx(math.exp(-1.0), rel=1e-10)

    def test_thermal_mixture_recovers_single_ratio(self):
        t = ThermalParams(1.5)
        mix = geometric_decomposition(bg(1.0), thermal_q_function(bg(1.0), t))
        assert mix.taus == pytest.approx((t.ratio,), rel=1e-10)
        assert mix.coeffs[0] == pytest.approx(1.0 / (t.nbar + 1.0), rel=1e-10)

    def test_two_temperature_mixture(self):
        fam = bg(1.0)
        t1, t2 = ThermalParams(0.5), ThermalParams(3.0)
        q = RadialFunction(lambda x: 0.3 * husimi_q(fam, t1, x) + 0.7 * husimi_q(fam, t2, x))
        want = 0.3 * p_quasi(fam, t1, GRID) + 0.7 * p_quasi(fam, t2, GRID)
        assert_allclose(gft_inverse(fam, q, GRID), want, rtol=1e-8)

    def test_rejects_non_geometric_input(self):
        f = RadialFunction(lambda x: 1.0 / (1.0 + x) ** 2.5)
        with pytest.raises(NonConvergentError):
            gft_inverse(CANON, f, 1.0)

    def test_rejects_nonpositive_argument(self):
        with pytest.raises(ValueError):
            gft_inverse(CANON, RadialFunction.constant(1.0), 0.0)


def test_forward_kernel_on_q_shifts_temperature():
    # the forward kernel is not its own inverse: applied to Q it produces Q at nbar + 1
    t = ThermalParams(1.0)
    got = gft(CANON, thermal_q_function(CANON, t), GRID)
    assert_allclose(got, husimi_q(CANON, ThermalParams(2.0), GRID), rtol=1e-10)


def test_printed_kp_form_is_not_the_transform():
    fam = kp(1.0)
    t = ThermalParams(1.0)
    forward = gft(fam, thermal_p_function(fam, t), 2.0)
    assert forward == pytest.approx(float(husimi_q(fam, t, 2.0)), rel=1e-5)
    assert abs(forward - husimi_q(fam, t, 2.0, printed_form=True)) > 1e-3


class TestMehta:
    def test_anti_diagonal_examples(self):
        t = ThermalParams(1.0)
        assert mehta_anti_diagonal(t, 0.0) == 0.5
        assert mehta_anti_diagonal(t, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-15)
        vals = mehta_anti_diagonal(t, np.linspace(0, 5, 11))
        assert np.all(np.diff(vals) < 0)

    def test_anti_diagonal_against_series(self):
        # exp(a) <-alpha|rho|alpha> = exp(a) e^{-a} sum p_n (-a)^n / n!
        t, a = ThermalParams(1.3), 2.2
        series = float(mp.nsum(lambda n: t.p(int(n)) * (-a) ** n / mp.factorial(n), [0, mp.inf]))
        assert mehta_anti_diagonal(t, a) == pytest.approx(series, rel=1e-13)

    def test_examples(self):
        c, e, r = mehta_formula_check(ThermalParams(1.0), 0.0)
        assert e == 1.0 and r <= 1e-6
        c, e, r = mehta_formula_check(ThermalParams(1.0), 1.0)
        assert e == pytest.approx(math.exp(-2.0), rel=1e-15) and r <= 1e-6
        c, e, r = mehta_formula_check(ThermalParams(2.0), 4.0)
        assert e == pytest.approx(0.5 * math.exp(-6.0), rel=1e-15) and r <= 1e-6

    def test_adaptive_rule(self):
        from ncs.quadrature import RadialQuadrature
        c, e, r = mehta_formula_check(ThermalParams(1.0), 1.0, RadialQuadrature.adaptive(1e-12))
        assert r <= 1e-8


class TestGaussian:
    def test_examples(self):
        c, e, r = gaussian_integral_check(1.0, 0.0, 0)
        assert e == 1.0 and r <= 1e-12
        c, e, r = gaussian_integral_check(2.0, 1.0, 1)
        assert e == 0.25 and abs(c - 0.25) <= 1e-12
        sigma = math.sqrt(2) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
        c, e, r = gaussian_integral_check(1.0, sigma, 2)
        assert e == pytest.approx(sigma ** 2, rel=1e-15)
        assert r <= 1e-10

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([0.5, 1.0, 2.0]), st.integers(0, 4), st.floats(0.1, 2.0), st.floats(0.0, 2 * math.pi))
    def test_identity(self, a, deg, modulus, phase):
        _, _, r = gaussian_integral_check(a, modulus * complex(math.cos(phase), math.sin(phase)), deg)
        assert r <= 1e-8

    def test_rejects_bad_a(self):
        with pytest.raises(ValueError):
            gaussian_integral_check(0.0, 1.0, 1)


class TestOptical:
    def test_examples(self):
        t = ThermalParams(1.0)
        row = optical_equivalence_check(CANON, t, 0)
        assert row.expected == 0.5 and row.rel_err <= 1e-10
        row = optical_equivalence_check(CANON, t, 1)
        assert row.expected == 0.25 and row.rel_err <= 1e-10
        row = optical_equivalence_check(bg(2.0), ThermalParams(0.5), 3)
        assert row.expected == pytest.approx(60.0 / 1.5 / 27.0, rel=1e-14)
        assert row.rel_err <= 1e-8

    @pytest.mark.parametrize("fam", [CANON, bg(0.5), bg(2.5)], ids=["canonical", "bg0.5", "bg2.5"])
    def test_monomials_to_ten(self, fam):
        t = ThermalParams(1.0)
        assert max(optical_equivalence_check(fam, t, n).rel_err for n in range(11)) <= 1e-8

    def test_normal_ordered_canonical(self):
        t = ThermalParams(1.5)
        for n in range(6):
            row = normal_ordered_moment_check(CANON, t, n)
            assert row.expected == pytest.approx(math.factorial(n) * 1.5 ** n, rel=1e-12)
            assert row.rel_err <= 1e-8

    def test_normal_ordered_pho(self):
        rows = [normal_ordered_moment_check(bg(1.0), ThermalParams(0.5), n) for n in range(6)]
        assert max(r.rel_err for r in rows) <= 1e-8

    def test_normal_ordered_rejects_kp(self):
        with pytest.raises(ValueError):
            normal_ordered_moment_check(kp(1.0), ThermalParams(1.0), 1)
