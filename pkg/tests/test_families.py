"""Data families: profile values, cutoff nesting, decay envelopes, windows."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from katolab.errors import GridError, KatolabError
from katolab.families import (CutoffSpec, bump_data, eta_hat, gaussian_data,
                              make_window, paper_window, phi_n, psi_n,
                              random_bandlimited, resolve_data, smooth_bump)
from katolab.spectral import (FrequencyGrid, bessel_potential, l2_norm,
                              sobolev_norm, synthesize_physical)


class TestEtaHat:
    def test_value_at_zero(self):
        assert eta_hat(0.0) == 1.0

    def test_even(self):
        xs = np.linspace(0.1, 40.0, 200)
        assert np.allclose(eta_hat(xs), eta_hat(-xs), rtol=0, atol=0)

    def test_closed_form_point(self):
        # at xi = sqrt(e - 1): ln(1 + xi^2) = 1, so the value is 1/(4 e^{1/4})
        xi = np.sqrt(np.e - 1.0)
        want = 1.0 / (4.0 * np.e ** 0.25)
        assert eta_hat(xi) == pytest.approx(want, rel=1e-14)
        assert want == pytest.approx(0.19470019576785122)

    def test_decreasing_in_abs_xi(self):
        xs = np.linspace(0.0, 60.0, 500)
        assert np.all(np.diff(eta_hat(xs)) < 0)


class TestCutoffs:
    def test_two_sided_plateau_and_support(self):
        chi = CutoffSpec("two_sided_even", 8)
        assert chi(0.0) == 1.0 and chi(8.0) == 1.0 and chi(-8.0) == 1.0
        assert chi(9.0) == 0.0 and chi(-9.0) == 0.0 and chi(12.0) == 0.0

    def test_one_sided_support(self):
        mu = CutoffSpec("one_sided", 4, N=1.0)
        assert mu(1.0) == 0.0 and mu(0.5) == 0.0
        assert mu(2.0) == 1.0 and mu(5.0) == 1.0
        assert mu(6.0) == 0.0 and mu(7.0) == 0.0

    @given(xi=st.floats(-40.0, 40.0), n=st.sampled_from([1, 2, 4, 8, 16]))
    @settings(max_examples=80, deadline=None)
    def test_two_sided_nested(self, xi, n):
        lo = CutoffSpec("two_sided_even", n)
        hi = CutoffSpec("two_sided_even", 2 * n)
        assert lo(xi) <= hi(xi) + 1e-15

    @given(xi=st.floats(0.0, 40.0), n=st.sampled_from([1, 2, 4, 8, 16]))
    @settings(max_examples=80, deadline=None)
    def test_one_sided_nested(self, xi, n):
        lo = CutoffSpec("one_sided", n, N=1.0)
        hi = CutoffSpec("one_sided", 2 * n, N=1.0)
        assert lo(xi) <= hi(xi) + 1e-15

    def test_transition_shape_is_level_independent(self):
        u = np.linspace(0.0, 1.0, 50)
        a = CutoffSpec("two_sided_even", 3)(3.0 + u)
        b = CutoffSpec("two_sided_even", 17)(17.0 + u)
        assert np.allclose(a, b, rtol=0, atol=1e-13)

    def test_monotone_on_transition(self):
        chi = CutoffSpec("two_sided_even", 5)
        vals = chi(np.linspace(5.0, 6.0, 300))
        assert np.all(np.diff(vals) <= 0)


class TestPhiN:
    def test_hermitian_and_band_limited(self):
        f = phi_n(8)
        assert f.hermitian
        assert f.support == (-9.0, 9.0)
        xis = f.grid.xis
        outside = np.abs(xis) >= 9.0
        assert np.all(f.samples[outside] == 0.0)

    def test_uniform_l2_bound(self):
        # independent oracle: ||phi_n||^2 <= (1/2pi) int eta_hat^2 over the band
        limit, _ = quad(lambda x: eta_hat(x) ** 2, -np.inf, np.inf, limit=400)
        limit = np.sqrt(limit / (2 * np.pi))
        norms = [l2_norm(phi_n(n)) for n in (2, 8, 32, 64)]
        assert all(v <= limit * (1 + 1e-9) for v in norms)
        assert all(b >= a for a, b in zip(norms, norms[1:]))

    def test_concentration_near_minus_fifty(self):
        f = phi_n(8)
        vals, _ = synthesize_physical(f, np.array([-50.0, 10.0]))
        assert abs(vals[0]) > 1e5 * abs(vals[1])

    def test_real_valued_physical(self):
        f = phi_n(8)
        vals, _ = synthesize_physical(f, np.linspace(-55.0, -45.0, 21))
        assert np.max(np.abs(vals.imag)) < 1e-10 * np.max(np.abs(vals))

    def test_algebraic_decay_envelope_uniform_in_n(self):
        # max over |x+50| >= 10 of (|phi_n| + |L^eps phi_n|) (1+|x|)^2,
        # calibrated at n = 8, holds with headroom along the family
        eps = 0.25
        xs = np.concatenate([np.linspace(-110.0, -60.0, 251),
                             np.linspace(-40.0, 30.0, 351)])
        def envelope(n):
            f = phi_n(n)
            base, _ = synthesize_physical(f, xs)
            smooth, _ = synthesize_physical(bessel_potential(f, eps), xs)
            return np.max((np.abs(base) + np.abs(smooth)) * (1.0 + np.abs(xs)) ** 2)
        c8 = envelope(8)
        assert np.isfinite(c8)
        for n in (16, 32):
            assert envelope(n) <= 1.5 * c8

    def test_grid_too_small_rejected(self):
        grid = FrequencyGrid.symmetric_grid(5.0, 0.01)
        with pytest.raises(GridError):
            phi_n(8, grid=grid)


class TestPsiN:
    def test_support(self):
        f = psi_n(4, N=1.0)
        assert f.support == (1.0, 6.0)
        xis = f.grid.xis
        assert np.all(f.samples[xis <= 1.0] == 0.0)
        assert np.all(f.samples[xis >= 6.0] == 0.0)
        assert not f.hermitian

    def test_l2_increasing_and_bounded_by_profile_tail(self):
        # oracle: the limit of ||psi_n||^2 is (1/2pi) int_N^inf eta_hat^2
        N = 1.0
        tail, _ = quad(lambda x: eta_hat(x) ** 2, N, np.inf, limit=400)
        limit = np.sqrt(tail / (2 * np.pi))
        norms = [l2_norm(psi_n(n, N=N)) for n in (1, 4, 16, 64)]
        assert all(b > a for a, b in zip(norms, norms[1:]))
        assert all(v <= limit * (1 + 1e-9) for v in norms)

    def test_fractional_energy_strictly_increasing(self):
        vals = [sobolev_norm(psi_n(n, N=1.0), 0.25) for n in (2, 8, 32, 128)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_insufficient_grid_rejected(self):
        grid = FrequencyGrid.one_sided(1.0, 4.0, 0.01)
        with pytest.raises(GridError):
            psi_n(8, N=1.0, grid=grid)


class TestWindows:
    def test_paper_window_values(self):
        w = paper_window()
        assert w(-50.0) == 1.0
        assert w(0.0) == 0.0
        assert w(-120.0) == 0.0

    def test_scan_bounds(self):
        w = paper_window()
        vals = w(np.linspace(-130.0, 10.0, 10000))
        assert np.all((vals >= 0.0) & (vals <= 1.0))

    def test_make_window_nesting_error(self):
        from katolab.errors import NestingError
        with pytest.raises(NestingError):
            make_window((0.0, 2.0), (1.0, 3.0))


class TestGenericData:
    def test_gaussian_norm(self):
        # (1/2pi) int e^{-xi^2} dxi = 1/(2 sqrt(pi))
        g = gaussian_data()
        want = np.sqrt(1.0 / (2.0 * np.sqrt(np.pi)))
        assert l2_norm(g) == pytest.approx(want, rel=1e-12)

    def test_random_bandlimited_deterministic(self):
        a = random_bandlimited(11, (1.0, 5.0))
        b = random_bandlimited(11, (1.0, 5.0))
        assert np.array_equal(a.samples, b.samples)
        c = random_bandlimited(12, (1.0, 5.0))
        assert not np.array_equal(a.samples, c.samples)

    def test_random_bandlimited_hermitian_flag(self):
        assert random_bandlimited(0, (1.0, 5.0), hermitian=True).hermitian
        assert not random_bandlimited(0, (1.0, 5.0), hermitian=False).hermitian

    def test_bump_support(self):
        f = bump_data(1.0, 2.0)
        xis = f.grid.xis
        assert np.all(np.abs(f.samples[(xis < 1.0) | (xis > 2.0)]) == 0.0)

    def test_smooth_bump_plateau(self):
        bump = smooth_bump(1.0, 2.0, transition=0.25)
        assert bump(1.5) == 1.0
        assert bump(0.99) == 0.0 and bump(2.01) == 0.0

    def test_resolve_data_addresses(self):
        assert resolve_data("phi(4)").hermitian
        assert resolve_data("psi(4)", N=1.0).support == (1.0, 6.0)
        assert resolve_data("gaussian(1.0)").hermitian
        assert resolve_data("random_bandlimited(3, 1, 5)").hermitian
        with pytest.raises(KatolabError):
            resolve_data("unknown(1)")
