"""Symbol classification, polynomial evaluation, dispersive validation, inversion."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from katolab.errors import (ClassificationError, ConvergenceError, DomainError,
                            ValidationError)
from katolab.spectral import FrequencyGrid
from katolab.symbols import (DISSIPATIVE_DISPERSIVE, DISSIPATIVE_DOMINANT,
                             PURELY_DISPERSIVE, DispersiveSymbol,
                             PolynomialSymbol, airy_symbol, classify,
                             dissipative_order, eval_Q, gain_exponent,
                             ginzburg_landau_symbol, heat_symbol,
                             invert_p, kdv_burgers_symbol,
                             monomial_sum_symbol, nonstationary_constants,
                             parabolic_symbol, power_symbol,
                             schrodinger_symbol, validate_dispersive)


class TestClassify:
    def test_airy_is_purely_dispersive(self):
        cls = classify(airy_symbol())
        assert cls.case == PURELY_DISPERSIVE
        assert not cls.dissipative

    def test_kdv_burgers_is_dissipative_dispersive(self):
        cls = classify(kdv_burgers_symbol())
        assert cls.case == DISSIPATIVE_DISPERSIVE
        assert cls.nu_idx == 1

    def test_heat_is_dissipative_dominant(self):
        cls = classify(heat_symbol())
        assert cls.case == DISSIPATIVE_DOMINANT
        assert cls.nu_idx == 1

    def test_parabolic_and_ginzburg_landau(self):
        assert classify(parabolic_symbol(2)).case == DISSIPATIVE_DOMINANT
        assert classify(ginzburg_landau_symbol(0.5, 1.0, m=2)).case == DISSIPATIVE_DOMINANT

    def test_wrong_orientation_reports_mirror_fix(self):
        # u_t = u_xxx has (-1)^1 a_1 = -1 < 0; x -> -x repairs it
        with pytest.raises(ClassificationError) as err:
            classify(PolynomialSymbol(1, (0.0, 1.0)))
        assert err.value.mirror_fixes
        assert "x -> -x" in str(err.value)

    def test_wrong_damping_sign_not_mirror_fixable(self):
        # anti-damped: Re Q = +xi^2 regardless of orientation
        with pytest.raises(ClassificationError) as err:
            classify(PolynomialSymbol(1, (0.0, -1.0), (-1.0,)))
        assert not err.value.mirror_fixes

    @given(scale=st.floats(1e-3, 1e3), which=st.sampled_from(
        ["airy", "kdv_burgers", "heat"]))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_positive_scaling(self, scale, which):
        base = {"airy": airy_symbol, "kdv_burgers": kdv_burgers_symbol,
                "heat": heat_symbol}[which]()
        scaled = PolynomialSymbol(base.omega,
                                  tuple(scale * v for v in base.a),
                                  tuple(scale * v for v in base.b))
        assert classify(scaled) == classify(base)


class TestEvalQ:
    def test_airy_example(self):
        assert eval_Q(airy_symbol(), 2.0) == pytest.approx(8j)

    def test_heat_example(self):
        assert eval_Q(heat_symbol(), 3.0) == pytest.approx(-9.0 + 0j)

    def test_purely_dispersive_has_zero_real_part(self):
        rng = np.random.default_rng(7)
        sym = airy_symbol()
        for xi in rng.uniform(-30, 30, 100):
            assert eval_Q(sym, xi).real == 0.0

    def test_kdv_burgers_decomposition(self):
        sym = kdv_burgers_symbol()
        xi = 1.7
        q = eval_Q(sym, xi)
        assert q.real == pytest.approx(-xi ** 2)
        assert q.imag == pytest.approx(xi ** 3 - xi)


class TestGainExponent:
    def test_airy(self):
        assert gain_exponent(airy_symbol()) == 1.0

    def test_schrodinger(self):
        assert gain_exponent(schrodinger_symbol()) == 0.5

    def test_heat_dissipative_order(self):
        assert dissipative_order(heat_symbol()) == 1

    def test_purely_dispersive_has_no_dissipative_order(self):
        with pytest.raises(ClassificationError):
            dissipative_order(airy_symbol())


class TestValidateDispersive:
    def test_schrodinger_valid(self):
        report = validate_dispersive(schrodinger_symbol(),
                                     FrequencyGrid(0.0, 50.0, 2001))
        assert report.ok

    def test_cubic_derivative_constant(self):
        # independent oracle: minimize 3 xi^2 / (1+xi)^2 over xi > 1
        res = minimize_scalar(lambda x: 3 * x * x / (1 + x) ** 2,
                              bounds=(1.0, 100.0), method="bounded")
        c2_max = res.fun
        assert c2_max == pytest.approx(0.75, rel=1e-4)
        sym = DispersiveSymbol(p=lambda x: np.asarray(x) ** 3,
                               p_prime=lambda x: 3 * np.asarray(x) ** 2,
                               m=3.0, C1=1.0, C2=0.75, R_sym=1.0, N=0.0)
        assert validate_dispersive(sym, FrequencyGrid(0.0, 40.0, 2001)).ok
        too_big = DispersiveSymbol(p=lambda x: np.asarray(x) ** 3,
                                   p_prime=lambda x: 3 * np.asarray(x) ** 2,
                                   m=3.0, C1=1.0, C2=0.80, R_sym=1.0, N=0.0)
        with pytest.raises(ValidationError):
            validate_dispersive(too_big, FrequencyGrid(0.0, 40.0, 2001))

    def test_sine_fails_derivative_bound(self):
        sym = DispersiveSymbol(p=np.sin, p_prime=np.cos, m=2.0,
                               C1=1.0, C2=1.0, R_sym=1.0, N=0.0)
        with pytest.raises(ValidationError):
            validate_dispersive(sym, FrequencyGrid(0.0, 20.0, 2001))


class TestInvertP:
    def test_square(self):
        assert invert_p(schrodinger_symbol(), 4.0) == pytest.approx(2.0, abs=1e-10)

    def test_cubic_plus_linear(self):
        sym = monomial_sum_symbol({1: 1.0, 3: 1.0})
        assert invert_p(sym, 10.0) == pytest.approx(2.0, abs=1e-10)

    def test_cube_and_inverse_derivative(self):
        from katolab.symbols import airy_dispersion_symbol
        sym = airy_dispersion_symbol()
        root = invert_p(sym, 27.0)
        assert root == pytest.approx(3.0, abs=1e-10)
        # nu'(27) = 1 / p'(3) = 1/27 by the inverse function rule
        d = (invert_p(sym, 27.0 + 1e-6) - invert_p(sym, 27.0 - 1e-6)) / 2e-6
        assert d == pytest.approx(1.0 / 27.0, rel=1e-5)

    def test_below_threshold_rejected(self):
        sym = schrodinger_symbol(N=1.0)
        with pytest.raises(DomainError):
            invert_p(sym, 0.5)

    @given(tau=st.floats(1.1, 1e6))
    @settings(max_examples=40, deadline=None)
    def test_roundtrip(self, tau):
        sym = schrodinger_symbol(N=1.0)
        xi = invert_p(sym, tau, tol=1e-11)
        assert abs(xi * xi - tau) <= 1e-10 * max(1.0, tau)

    def test_inverse_is_increasing(self):
        sym = power_symbol(2.5, N=0.5)
        taus = np.linspace(1.0, 50.0, 40)
        roots = [invert_p(sym, t) for t in taus]
        assert np.all(np.diff(roots) > 0)


def test_nonstationary_constants_airy():
    # theta' = 3 xi^2, so theta' T >= C1 xi^2 with C1 = (3/2) T from xi = 0 on
    M, c1 = nonstationary_constants(airy_symbol(), 1.0, xi_max=50.0)
    assert c1 == pytest.approx(1.5)
    assert M == 0.0


def test_nonstationary_constants_kdv():
    # theta = xi^3 - xi dips below (3/2) xi^2 T near the origin: M > 0
    from katolab.symbols import kdv_linear_symbol
    M, c1 = nonstationary_constants(kdv_linear_symbol(), 1.0, xi_max=50.0)
    assert c1 == pytest.approx(1.5)
    assert 0.0 < M < 2.0
    xi = np.linspace(M, 50.0, 5001)
    assert np.all(3 * xi ** 2 - 1 >= c1 * xi ** 2 - 1e-12)


def test_rejects_wrong_coefficient_counts():
    with pytest.raises(ClassificationError):
        PolynomialSymbol(1, (1.0,))
    with pytest.raises(ClassificationError):
        PolynomialSymbol(1, (0.0, -1.0), (1.0, 2.0))
