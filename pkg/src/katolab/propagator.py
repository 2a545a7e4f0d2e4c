"""Exact-in-frequency evolution by multiplier flows, and time-series synthesis.

Polynomial symbols act through e^{Q(i xi) t}; dispersive symbols through
e^{-i p(xi) t}.  Time marching is never discretized: every state is the
initial spectrum times a closed-form multiplier.
"""

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import quadrature
from .errors import (DomainError, OrientationError, PhaseMonotonicityError,
                     ResolutionError)
from .spectral import (PhaseBudget, FlowPhase, SmoothWindow, SpectralFunction,
                       SpectrumModel, bessel_potential, synthesize_physical)
from .symbols import (Classification, DispersiveSymbol, PolynomialSymbol,
                      classify)

# flow factors below this size are treated as identically zero
DISSIPATION_FLOOR = 1e-16

ORIENT_ALL = "all_t"
ORIENT_FORWARD = "forward"


@dataclass(frozen=True)
class Evolution:
    """A symbol paired with initial data and its admissible time domain."""

    symbol: Union[PolynomialSymbol, DispersiveSymbol]
    initial: SpectralFunction

    @property
    def classification(self) -> Optional[Classification]:
        if isinstance(self.symbol, PolynomialSymbol):
            return classify(self.symbol)
        return None

    @property
    def orientation(self) -> str:
        cls = self.classification
        if cls is not None and cls.dissipative:
            return ORIENT_FORWARD
        return ORIENT_ALL


def _poly_flow(sym: PolynomialSymbol, t: float, dissipative: bool) -> FlowPhase:
    return FlowPhase(
        theta=lambda xi: sym.theta(xi),
        dtheta=lambda xi: sym.theta(xi, order=1),
        d2theta=lambda xi: sym.theta(xi, order=2),
        d3theta_bound=lambda xi: float(np.max(np.abs(np.atleast_1d(sym.theta(xi, order=3))))),
        t=t,
        decay=(lambda xi: sym.re_q(xi)) if dissipative else None,
        origin=sym,
    )


def _dispersive_flow(sym: DispersiveSymbol, t: float) -> FlowPhase:
    return FlowPhase(
        theta=lambda xi: -np.asarray(sym.p(xi), dtype=float),
        dtheta=lambda xi: -np.asarray(sym.p_prime(xi), dtype=float),
        d2theta=None,
        d3theta_bound=None,
        t=t,
        origin=sym,
    )


def _dissipative_support(sym: PolynomialSymbol, t: float, support):
    """Shrink the support to where the decaying multiplier is above floor."""
    lo, hi = support
    xi = np.linspace(lo, hi, 4001)
    alive = sym.re_q(xi) * t >= np.log(DISSIPATION_FLOOR)
    if not np.any(alive):
        return None
    return (float(xi[alive][0]), float(xi[alive][-1]))


def evolve(ev: Evolution, t: float) -> SpectralFunction:
    """Flow the initial spectrum to time t (exact multiplier in frequency)."""
    if t == 0.0:
        return ev.initial
    dissipative = ev.orientation == ORIENT_FORWARD
    if dissipative and t < 0:
        raise OrientationError(
            "backward time on a dissipative flow (the multiplier overflows)")
    f = ev.initial
    xis = f.grid.xis
    sym = ev.symbol
    if isinstance(sym, PolynomialSymbol):
        phase = sym.theta(xis) * t
        mult = np.exp(1j * phase)
        if dissipative:
            mult = mult * np.exp(sym.re_q(xis) * t)
        hermitian = f.hermitian and all(b == 0.0 for b in sym.betas)
        flow = _poly_flow(sym, t, dissipative)
    else:
        mult = np.exp(-1j * np.asarray(sym.p(xis), dtype=float) * t)
        hermitian = False
        flow = _dispersive_flow(sym, t)

    samples = f.samples * mult
    support = f.support
    model = f.model
    if model is not None and model.flow is not None:
        # compose only a repeat application of the same symbol's flow
        if model.flow.origin is sym:
            flow = replace(flow, t=model.flow.t + t)
        else:
            model = None
    if model is not None:
        model = replace(model, flow=flow)
    osc_bound = f.osc_bound
    if model is None:
        # plain sampled data: track the flow's phase rate explicitly
        probe = np.linspace(support[0], support[1], 2001)
        osc_bound += abs(t) * float(np.max(np.abs(flow.dtheta(probe))))
    if dissipative and isinstance(sym, PolynomialSymbol):
        shrunk = _dissipative_support(sym, t, support)
        if shrunk is None:
            samples = np.zeros_like(samples)
        else:
            support = shrunk
            dead = (xis < shrunk[0]) | (xis > shrunk[1])
            samples = samples.copy()
            samples[dead] = 0.0
            if model is not None:
                segs = tuple(
                    (max(lo, shrunk[0]), min(hi, shrunk[1]))
                    for lo, hi in model.segments
                    if hi > shrunk[0] and lo < shrunk[1]
                )
                model = replace(model, segments=segs or ((shrunk[0], shrunk[1]),))
    return replace(f, samples=samples, hermitian=hermitian, model=model,
                   support=support, osc_bound=osc_bound)


@dataclass(frozen=True)
class WindowSolution:
    xs: np.ndarray
    values: np.ndarray
    backend: str
    guard_margin: float
    nodes: int


def solution_on_window(ev: Evolution, t: float, w: SmoothWindow,
                       x_step: float = 0.05, sigma: float = 0.0,
                       backend: str = "auto",
                       max_nodes: int = 1 << 28) -> WindowSolution:
    """Physical samples of Lambda^sigma u(., t) on a uniform grid over the window."""
    f = bessel_potential(evolve(ev, t), sigma)
    xs = w.xs(x_step)
    values, diag = synthesize_physical(f, xs, backend=backend, max_nodes=max_nodes)
    return WindowSolution(xs=xs, values=values, backend=diag["backend"],
                          guard_margin=diag["guard_margin"], nodes=diag["nodes"])


# ---------------------------------------------------------------------------
# time series through the monotone-phase change of variables
# ---------------------------------------------------------------------------

def monotone_phase_series(xi_knots, g_knots, tau_knots, t_grid,
                          dtau_max: float, oscillation_rate: float = 0.0):
    """Synthesize F(t) = (1/2pi) int g(xi) e^{i theta(xi) t} dxi on t_grid.

    ``tau_knots = theta(xi_knots)`` must be strictly monotone; the integrand
    is resampled in the tau variable by shape-preserving (monotone) cubic
    interpolation onto a uniform grid and synthesized with one fast
    transform.  ``dtau_max`` caps the tau spacing (alias control);
    ``oscillation_rate`` bounds |d(arg g)/dtau| for the knot-density check.
    """
    tau = np.asarray(tau_knots, dtype=float)
    h = np.asarray(g_knots, dtype=complex)
    if tau[0] > tau[-1]:
        tau = tau[::-1]
        h = h[::-1]
    dtau_knots = np.diff(tau)
    if np.any(dtau_knots <= 0):
        raise PhaseMonotonicityError("flow phase is not monotone across the knots")
    # keep >= 4 knots per oscillation of the resampled integrand
    if oscillation_rate > 0:
        worst = float(np.max(dtau_knots)) * oscillation_rate
        if worst > np.pi / 2.0:
            raise ResolutionError(
                "knot density below 4 per oscillation in the tau variable",
                oversample_factor=worst / (np.pi / 2.0))
    dtau = min(dtau_max, float(np.max(dtau_knots)))
    count = int(np.ceil((tau[-1] - tau[0]) / dtau)) + 1
    taus = np.linspace(tau[0], tau[-1], count)
    interp_re = PchipInterpolator(tau, h.real)
    interp_im = PchipInterpolator(tau, h.imag)
    resampled = interp_re(taus) + 1j * interp_im(taus)
    return quadrature.inverse_transform_samples(resampled, taus, np.asarray(t_grid, dtype=float))


def time_series(ev: Evolution, x: float, sigma: float, t_grid,
                guard: PhaseBudget = None) -> np.ndarray:
    """F(t) = (Lambda^sigma u)(x, t) on a uniform t grid (dispersive flows).

    Requires data supported above the invertibility threshold N and a t
    spacing below the time-Nyquist limit pi / max|p| on the support.
    """
    sym = ev.symbol
    if not isinstance(sym, DispersiveSymbol):
        raise DomainError("time series synthesis requires a dispersive symbol")
    f = ev.initial
    lo, hi = f.support
    if lo < sym.N - 1e-9:
        raise DomainError(f"data support starts at {lo}, below the threshold N = {sym.N}")
    t_grid = np.asarray(t_grid, dtype=float)
    dt = abs(t_grid[1] - t_grid[0]) if len(t_grid) > 1 else 0.0
    p_top = float(np.max(np.abs(np.atleast_1d(sym.p(np.array([lo, hi]))))))
    if dt > 0 and dt > np.pi / p_top:
        raise ResolutionError(
            f"t spacing {dt:.3g} violates time-Nyquist pi/p_max = {np.pi / p_top:.3g}",
            oversample_factor=dt * p_top / np.pi)
    guard = guard or PhaseBudget()
    guard.check(f.grid.spacing, abs(x))

    xis = f.grid.xis
    mask = (xis >= lo - 1e-12) & (xis <= hi + 1e-12)
    xi = xis[mask]
    weight = (1.0 + xi * xi) ** (sigma / 2.0)
    g = weight * np.exp(1j * x * xi) * f.samples[mask]
    dxi = f.grid.spacing
    pprime = np.asarray(sym.p_prime(xi), dtype=float)
    if np.any(pprime <= 0):
        raise PhaseMonotonicityError("p' must be positive on the data support")
    h = g / pprime
    tau = -np.asarray(sym.p(xi), dtype=float)
    t_span = float(np.max(np.abs(t_grid))) if len(t_grid) else 1.0
    dtau_max = np.pi / max(t_span, 1e-12)
    osc = abs(x) / float(np.min(pprime))
    return monotone_phase_series(xi, h, tau, t_grid, dtau_max, oscillation_rate=osc)
