"""Flow invariants: identity, semigroup, isometry, contractivity, synthesis."""

import numpy as np
import pytest

from katolab.errors import DomainError, OrientationError, ResolutionError
from katolab.families import (bump_data, gaussian_data, paper_window, phi_n,
                              psi_n, random_bandlimited)
from katolab.propagator import (Evolution, evolve, solution_on_window,
                                time_series)
from katolab.spectral import l2_norm, synthesize_physical
from katolab.symbols import (airy_symbol, ginzburg_landau_symbol, heat_symbol,
                             kdv_burgers_symbol, schrodinger_symbol)
from katolab.functionals import whole_time_point_norm


def band_data(seed=1):
    return random_bandlimited(seed, (1.0, 5.0))


class TestEvolve:
    def test_time_zero_is_identity(self):
        ev = Evolution(airy_symbol(), band_data())
        out = evolve(ev, 0.0)
        assert out is ev.initial

    def test_heat_halves_at_log_two(self):
        f = band_data()
        out = evolve(Evolution(heat_symbol(), f), np.log(2.0))
        xis = f.grid.xis
        k = int(np.argmin(np.abs(xis - 1.0)))
        assert xis[k] == pytest.approx(1.0, abs=1e-9)
        assert out.samples[k] == pytest.approx(0.5 * f.samples[k], rel=1e-9)

    def test_schrodinger_flow_is_isometric(self):
        ev = Evolution(schrodinger_symbol(), bump_data(1.0, 4.0))
        base = l2_norm(ev.initial)
        for t in (-5.0, -0.5, 0.5, 5.0):
            assert l2_norm(evolve(ev, t)) == pytest.approx(base, rel=1e-12)

    def test_airy_flow_is_isometric(self):
        ev = Evolution(airy_symbol(), band_data())
        base = l2_norm(ev.initial)
        for t in (-3.0, 1.0):
            assert l2_norm(evolve(ev, t)) == pytest.approx(base, rel=1e-12)

    @pytest.mark.parametrize("make_sym", [airy_symbol, heat_symbol,
                                          kdv_burgers_symbol])
    def test_semigroup(self, make_sym):
        sym = make_sym()
        ev = Evolution(sym, band_data())
        one = evolve(Evolution(sym, evolve(ev, 0.4)), 0.35)
        two = evolve(ev, 0.75)
        scale = np.max(np.abs(two.samples))
        assert np.max(np.abs(one.samples - two.samples)) < 1e-12 * scale

    def test_dissipative_contractive_and_strictly_decreasing(self):
        ev = Evolution(heat_symbol(), band_data())
        n0 = l2_norm(ev.initial)
        n1 = l2_norm(evolve(ev, 0.1))
        n2 = l2_norm(evolve(ev, 0.5))
        assert n1 < n0 and n2 < n1

    def test_backward_dissipative_rejected(self):
        ev = Evolution(heat_symbol(), band_data())
        with pytest.raises(OrientationError):
            evolve(ev, -0.1)

    def test_hermitian_preserved_for_real_damping(self):
        ev = Evolution(kdv_burgers_symbol(), phi_n(4))
        assert evolve(ev, 0.5).hermitian

    def test_hermitian_cleared_for_complex_damping(self):
        sym = ginzburg_landau_symbol(1.0, 0.7, m=1)
        ev = Evolution(sym, phi_n(4))
        assert not evolve(ev, 0.5).hermitian

    def test_dissipative_truncation_shrinks_support(self):
        ev = Evolution(heat_symbol(), phi_n(32))
        out = evolve(ev, 1.0)
        lo, hi = out.support
        # e^{-xi^2 t} falls below 1e-16 past xi ~ 6.07
        assert hi < 6.5 and lo > -6.5
        xis = out.grid.xis
        assert np.all(out.samples[(xis < lo) | (xis > hi)] == 0.0)


class TestSolutionOnWindow:
    def test_matches_plain_evaluation_at_time_zero(self):
        f = phi_n(8)
        w = paper_window()
        sol = solution_on_window(Evolution(airy_symbol(), f), 0.0, w,
                                 x_step=0.05)
        direct, _ = synthesize_physical(f, sol.xs)
        assert np.max(np.abs(sol.values - direct)) < 1e-12 * np.max(np.abs(direct))

    def test_cross_backend_agreement(self):
        # the two oscillatory backends agree on an evolved state
        state_ev = Evolution(airy_symbol(), gaussian_data())
        w = paper_window()
        a = solution_on_window(state_ev, 1.0, w, x_step=0.5, backend="oversampled_fft")
        b = solution_on_window(state_ev, 1.0, w, x_step=0.5, backend="filon")
        scale = np.max(np.abs(a.values))
        assert np.max(np.abs(a.values - b.values)) < 1e-6 * scale

    def test_resolution_error_reports_oversampling(self):
        # sampled-only data (no analytic model) cannot be refined
        f = phi_n(8)
        bare = f.with_samples(f.samples, model=None, osc_bound=50.0)
        ev = Evolution(airy_symbol(), bare)
        with pytest.raises(ResolutionError) as err:
            solution_on_window(ev, 1.0, paper_window(), x_step=0.05)
        assert err.value.oversample_factor > 1.0


class TestTimeSeries:
    def test_plancherel_in_time(self):
        # the synthesized energy converges to the frequency-exact value
        sym = schrodinger_symbol(N=1.0)
        data = psi_n(4, N=1.0)
        exact = whole_time_point_norm(sym, data, 0.3)
        ev = Evolution(sym, data)
        totals = []
        for t_max in (5.0, 40.0):
            dt = np.pi / 36.0 * 0.9
            ts = np.arange(-t_max, t_max + dt / 2, dt)
            vals = np.abs(time_series(ev, 0.25, 0.3, ts)) ** 2
            totals.append(np.trapezoid(vals, dx=dt))
        assert abs(totals[1] - exact) < 1e-3 * exact
        assert abs(totals[1] - exact) < abs(totals[0] - exact)

    def test_fractional_smoothing_increases_time_energy(self):
        sym = schrodinger_symbol(N=1.0)
        ev = Evolution(sym, psi_n(4, N=1.0))
        dt = np.pi / 36.0 * 0.9
        ts = np.arange(-30.0, 30.0 + dt / 2, dt)
        e0 = np.trapezoid(np.abs(time_series(ev, 0.0, 0.0, ts)) ** 2, dx=dt)
        e1 = np.trapezoid(np.abs(time_series(ev, 0.0, 0.25, ts)) ** 2, dx=dt)
        assert e1 >= e0

    def test_narrow_bump_has_flat_envelope(self):
        # near-monochromatic data: |F| is nearly constant over moderate times
        sym = schrodinger_symbol(N=0.5)
        data = bump_data(2.0, 2.2, transition=0.05, dxi=0.002)
        ev = Evolution(sym, data)
        ts = np.linspace(-2.0, 2.0, 301)
        vals = np.abs(time_series(ev, 0.0, 0.0, ts))
        assert np.max(vals) < 1.6 * np.min(vals)

    def test_support_below_threshold_rejected(self):
        sym = schrodinger_symbol(N=2.0)
        with pytest.raises(DomainError):
            time_series(Evolution(sym, psi_n(4, N=1.0)), 0.0, 0.0,
                        np.linspace(-1.0, 1.0, 101))

    def test_nyquist_violation_rejected(self):
        sym = schrodinger_symbol(N=1.0)
        ev = Evolution(sym, psi_n(4, N=1.0))
        coarse = np.linspace(-10.0, 10.0, 21)   # dt = 1 >> pi/36
        with pytest.raises(ResolutionError):
            time_series(ev, 0.0, 0.0, coarse)
