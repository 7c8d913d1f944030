import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ncs.errors import NonConvergentError, OutsideRadiusError, RepresentationOverflow
from ncs.hyper import (
    HypergeometricModel,
    SeriesBudget,
    gamma_ratio,
    log_rho_table,
    parse_model,
    pfq_eval,
    pochhammer,
    radius_classify,
    series_radius,
    structure_rho,
    structure_rho_dual,
)

params = st.floats(min_value=0.1, max_value=6.0, allow_nan=False)


@st.composite
def models(draw, max_len=3):
    a = draw(st.lists(params, max_size=max_len))
    b = draw(st.lists(params, max_size=max_len))
    return HypergeometricModel(tuple(a), tuple(b))


class TestModel:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            HypergeometricModel((0.0,), ())
        with pytest.raises(ValueError):
            HypergeometricModel((), (-1.5,))
        with pytest.raises(ValueError):
            HypergeometricModel((math.inf,), ())

    def test_canonical_is_empty(self):
        m = HypergeometricModel.canonical()
        assert (m.p, m.q) == (0, 0)
        assert m.is_canonical

    def test_pho_k0_is_canonical_equivalent(self):
        assert HypergeometricModel.pho(0.0).is_canonical
        assert not HypergeometricModel.pho(1.0).is_canonical

    def test_json_round_trip(self):
        m = HypergeometricModel((1.5, 2.0), (3.25,))
        d = json.loads(m.to_json())
        assert d == {"p": 2, "q": 1, "a": [1.5, 2.0], "b": [3.25]}
        assert HypergeometricModel.from_dict(d) == m

    def test_from_dict_checks_counts(self):
        with pytest.raises(ValueError):
            HypergeometricModel.from_dict({"p": 2, "q": 0, "a": [1.0], "b": []})

    def test_swapped(self):
        m = HypergeometricModel((1.0,), (2.0, 3.0))
        assert m.swapped() == HypergeometricModel((2.0, 3.0), (1.0,))


class TestPochhammer:
    def test_examples(self):
        assert pochhammer(5.0, 0) == 1.0
        assert pochhammer(0.0, 3) == 0.0
        assert pochhammer(3.0, 3) == 60.0

    def test_negative_integer_terminates(self):
        assert pochhammer(-2.0, 2) == 2.0
        assert pochhammer(-2.0, 3) == 0.0

    def test_large_n_against_mpmath(self):
        assert_allclose(pochhammer(1.7, 100), float(mp.rf(1.7, 100)), rtol=1e-12)

    def test_overflow(self):
        with pytest.raises(RepresentationOverflow):
            pochhammer(10.0, 400)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            pochhammer(1.0, -1)


class TestGammaRatio:
    def test_examples(self):
        assert gamma_ratio(HypergeometricModel.canonical()) == 1.0
        assert gamma_ratio(HypergeometricModel((1.0,), (3.0,))) == pytest.approx(2.0, rel=1e-15)
        assert gamma_ratio(HypergeometricModel((1.0,), (3.5,))) == pytest.approx(float(mp.gamma(3.5)), rel=1e-14)

    def test_overflow(self):
        with pytest.raises(RepresentationOverflow):
            gamma_ratio(HypergeometricModel((), (200.0,)))


class TestStructureFunction:
    def test_examples(self):
        assert structure_rho(HypergeometricModel.canonical(), 4) == 24.0
        assert structure_rho(HypergeometricModel.pho(2.0), 3) == pytest.approx(60.0, rel=1e-15)
        assert structure_rho(HypergeometricModel((1.3,), (0.4,)), 0) == 1.0

    def test_dual_examples(self):
        assert structure_rho_dual(HypergeometricModel.canonical(), 5) == pytest.approx(120.0, rel=1e-15)
        # (3!)^2 / (3 * 4 * 5)
        assert structure_rho_dual(HypergeometricModel.pho(2.0), 3) == pytest.approx(0.6, rel=1e-14)
        assert structure_rho_dual(HypergeometricModel.pho(2.0), 0) == 1.0

    def test_exact_and_log_paths_meet(self):
        m = HypergeometricModel((1.3, 2.2), (0.7,))
        oracle = [float(mp.factorial(n) * mp.rf(0.7, n) / (mp.rf(1.3, n) * mp.rf(2.2, n))) for n in (29, 30, 31, 32)]
        got = [structure_rho(m, n) for n in (29, 30, 31, 32)]
        assert_allclose(got, oracle, rtol=1e-12)

    def test_log_scale_avoids_overflow(self):
        m = HypergeometricModel.canonical()
        with pytest.raises(RepresentationOverflow):
            structure_rho(m, 400)
        assert structure_rho(m, 400, log=True) == pytest.approx(float(mp.log(mp.factorial(400))), rel=1e-14)

    def test_table_matches_scalar(self):
        m = HypergeometricModel((2.5,), (1.5, 0.5))
        table = log_rho_table(m, 60)
        assert_allclose(table, [structure_rho(m, n, log=True) for n in range(61)], rtol=1e-13, atol=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(models(), st.integers(min_value=0, max_value=50))
    def test_duality_product_is_factorial_squared(self, m, n):
        lhs = structure_rho(m, n, log=True) + structure_rho_dual(m, n, log=True)
        assert lhs == pytest.approx(2 * math.lgamma(n + 1), abs=1e-12 * max(1.0, 2 * math.lgamma(n + 1)))


class TestPfq:
    def test_examples(self):
        assert pfq_eval(HypergeometricModel.canonical(), 1.0) == pytest.approx(math.e, rel=1e-15)
        assert pfq_eval(HypergeometricModel.pho(1.0), 1.0) == pytest.approx(math.e - 1.0, rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(models())
    def test_zero_argument_is_one(self, m):
        assert pfq_eval(m, 0.0) == 1.0

    def test_canonical_is_exp(self):
        xs = np.linspace(0, 30, 31)
        assert_allclose(pfq_eval(HypergeometricModel.canonical(), xs), np.exp(xs), rtol=1e-12)

    def test_series_path_matches_exp_for_cancelled_parameters(self):
        # a = b makes the series e^x, but it is still summed by recurrence
        m = HypergeometricModel((1.7, 2.0), (2.0, 1.7, 3.0))
        xs = np.array([0.5, 3.0, 20.0])
        ref = [float(mp.hyper([1.7, 2.0], [2.0, 1.7, 3.0], x)) for x in xs]
        assert_allclose(pfq_eval(m, xs), ref, rtol=1e-13)

    @pytest.mark.parametrize("a,b,x", [
        ((1.0,), (3.5,), 12.0),
        ((2.0,), (1.0,), 7.0),
        ((1.5, 0.5), (2.5, 3.0, 0.7), 40.0),
        ((1.0, 1.0), (2.0,), 0.9),
    ])
    def test_against_mpmath(self, a, b, x):
        ref = float(mp.hyper(list(a), list(b), x))
        assert pfq_eval(HypergeometricModel(a, b), x) == pytest.approx(ref, rel=1e-13)

    def test_complex_argument(self):
        m = HypergeometricModel((2.0,), (1.0,))
        w = 3.0 * np.exp(0.7j)
        ref = complex(mp.hyper([2.0], [1.0], w))
        assert abs(pfq_eval(m, w) - ref) <= 1e-13 * abs(ref)

    def test_recurrence_terms_match_structure_function(self):
        m = HypergeometricModel((1.2,), (2.7, 0.8))
        x = 2.5
        term = 1.0
        for n in range(50):
            assert term == pytest.approx(x ** n / structure_rho(m, n), rel=1e-12)
            term *= x * m.step_ratio(n)

    def test_outside_radius(self):
        m = HypergeometricModel((1.0, 1.0), (2.0,))
        with pytest.raises(OutsideRadiusError):
            pfq_eval(m, 1.0)
        with pytest.raises(OutsideRadiusError):
            pfq_eval(HypergeometricModel((1.0, 1.0), ()), 0.1)

    def test_budget_exhaustion(self):
        with pytest.raises(NonConvergentError):
            pfq_eval(HypergeometricModel.pho(1.0), 500.0, SeriesBudget(max_terms=20))

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            SeriesBudget(max_terms=0)
        with pytest.raises(ValueError):
            SeriesBudget(rel_tol=1.5)


class TestRadius:
    def test_examples(self):
        assert radius_classify(HypergeometricModel.canonical()).radius == "infinite"
        assert radius_classify(HypergeometricModel.pho(1.0)).radius == "infinite"
        assert radius_classify(HypergeometricModel((1.0,), ())).radius == "one"

    def test_flavors_mirror(self):
        m = HypergeometricModel((1.0, 2.0, 3.0), (1.5,))
        assert radius_classify(m, "bg").radius == "zero"
        assert radius_classify(m, "kp").radius == "infinite"
        assert radius_classify(m, "bg").reciprocal_radius == "infinite"

    def test_series_radius_value(self):
        assert series_radius(HypergeometricModel((1.0,), ())) == 1.0
        assert math.isinf(series_radius(HypergeometricModel.canonical()))

    @settings(max_examples=20, deadline=None)
    @given(models())
    def test_agrees_with_empirical_ratio_test(self, m):
        n = np.array([100.0, 1000.0])
        log_ratio = [structure_rho(m, int(k) + 1, log=True) - structure_rho(m, int(k), log=True) for k in n]
        slope = (log_ratio[1] - log_ratio[0]) / math.log(10.0)
        cls = radius_classify(m)
        if not m.is_canonical:
            assert round(slope) == cls.exponent
        expected = {1: "infinite", 0: "one", -1: "zero"}
        assert cls.radius == expected[int(np.sign(round(slope)))]


class TestParseModel:
    def test_presets(self, tmp_path):
        assert parse_model("canonical") == HypergeometricModel.canonical()
        assert parse_model("pho:2.5") == HypergeometricModel.pho(2.5)
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"p": 1, "q": 1, "a": [1.0], "b": [2.0]}))
        assert parse_model(str(path)) == HypergeometricModel.pho(1.0)

    def test_bad_sources(self):
        with pytest.raises(ValueError):
            parse_model("nope")
        with pytest.raises(ValueError):
            parse_model("pho:-1")
