"""Smoothing functionals: local norms, windowed energies, whole-time norms,
tail decompositions, trace norms, and the dissipative global norm.

Whole-line time integrals are always evaluated by the frequency-exact change
of variables (the time variable never appears); time-domain synthesis is used
only for finite windows and as a cross-check.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DivisionError, DomainError, OrientationError,
                     PhaseMonotonicityError)
from .families import paper_window, phi_n
from .propagator import Evolution, evolve, monotone_phase_series, time_series
from .spectral import (SmoothWindow, SpectralFunction, bessel_potential,
                       l2_norm, sobolev_norm, synthesize_physical,
                       windowed_energy_detailed)
from .symbols import (DispersiveSymbol, PolynomialSymbol, classify,
                      dissipative_order)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Step sizes, windows, and truncations shared by the functionals."""

    x_step: float = 0.05
    t_step: Optional[float] = None      # None: auto from the time-Nyquist limit
    T: float = 1.0                      # half-width of the finite time window
    T_max: float = 40.0                 # synthesis truncation for whole-line integrals
    R: float = 1.0                      # spatial half-width
    rel_tol_freq: float = 1e-3
    rel_tol_time: float = 0.02
    backend: str = "auto"
    max_nodes: int = 1 << 28

    def __post_init__(self):
        if min(self.x_step, self.T, self.T_max, self.R) <= 0:
            raise DomainError("quadrature parameters must be positive")
        if self.T_max <= self.T:
            raise DomainError("T_max must exceed T")


@dataclass
class SharpnessReport:
    """One experiment row: all functionals evaluated at a single level n."""

    n: int
    norm_data: float = math.nan
    norm_eps_data: float = math.nan
    A_n: Optional[float] = None
    B_n: Optional[float] = None
    I_n: Optional[float] = None
    I_n_quad: Optional[float] = None
    finite_window: Optional[float] = None
    J_n: Optional[float] = None
    backend: str = ""
    guard_margin: float = math.nan
    runtime_ms: Optional[int] = None
    extras: dict = field(default_factory=dict)


def alias_free_x_step(x_step: float, band_max: float, margin: float = 20.0) -> float:
    """Cap the physical step so |u|^2 of band-limited u is sampled alias-free."""
    return min(x_step, np.pi / (2.0 * band_max + margin))


def frequency_integral(f: SpectralFunction, weight) -> float:
    """(1/2pi) int weight(xi) |f_hat(xi)|^2 dxi over the stored grid."""
    xis = f.grid.xis
    w = np.asarray(weight(xis), dtype=float)
    return float(np.trapezoid(w * np.abs(f.samples) ** 2, dx=f.grid.spacing) / TWO_PI)


# ---------------------------------------------------------------------------
# local smoothing norm over a space-time box
# ---------------------------------------------------------------------------

def local_kato_norm(ev: Evolution, sigma: float, q: QuadratureSpec) -> float:
    """int int_{|x|<=R} |Lambda^sigma u(x,t)|^2 dx dt by tensor trapezoid.

    The time interval is [0, T] for polynomial flows and [-T, T] for
    dispersive flows.
    """
    sym = ev.symbol
    poly = isinstance(sym, PolynomialSymbol)
    lo, hi = ev.initial.support
    probe = np.linspace(lo, hi, 2001)
    if poly:
        rate = float(np.max(np.abs(sym.theta(probe))))
    else:
        rate = float(np.max(np.abs(np.asarray(sym.p(probe), dtype=float))))
    dt_auto = np.pi / (8.0 * max(rate, 1e-12))
    dt = min(q.t_step, dt_auto) if q.t_step else dt_auto
    t_lo = 0.0 if poly else -q.T
    nt = max(3, int(np.ceil((q.T - t_lo) / dt)) + 1)
    ts = np.linspace(t_lo, q.T, nt)

    band = max(abs(lo), abs(hi))
    dx = alias_free_x_step(q.x_step, band)
    nx = max(3, int(np.ceil(2.0 * q.R / dx)) + 1)
    xs = np.linspace(-q.R, q.R, nx)

    slices = np.empty(nt)
    for i, t in enumerate(ts):
        g = bessel_potential(evolve(ev, t), sigma)
        vals, _ = synthesize_physical(g, xs, backend=q.backend, max_nodes=q.max_nodes)
        slices[i] = np.trapezoid(np.abs(vals) ** 2, dx=xs[1] - xs[0])
    return float(np.trapezoid(slices, dx=ts[1] - ts[0]))


# ---------------------------------------------------------------------------
# windowed energies of the two-sided family
# ---------------------------------------------------------------------------

def windowed_data_energy(n: int, epsilon: float, q: QuadratureSpec = None,
                         window: SmoothWindow = None):
    """A_n: plateau-window energy of Lambda^epsilon applied to the data."""
    q = q or QuadratureSpec()
    w = window or paper_window()
    data = phi_n(n)
    dx = alias_free_x_step(q.x_step, n + 1.0)
    value, diag = windowed_energy_detailed(data, w, sigma=epsilon, x_step=dx,
                                           backend=q.backend, max_nodes=q.max_nodes)
    return value, diag


def windowed_evolved_energy(sym: PolynomialSymbol, n: int, epsilon: float,
                            T: float, q: QuadratureSpec = None,
                            window: SmoothWindow = None):
    """B_n: plateau-window energy of Lambda^epsilon u_n(., T)."""
    q = q or QuadratureSpec()
    w = window or paper_window()
    ev = Evolution(sym, phi_n(n))
    state = evolve(ev, T)
    dx = alias_free_x_step(q.x_step, n + 1.0)
    value, diag = windowed_energy_detailed(state, w, sigma=epsilon, x_step=dx,
                                           backend=q.backend, max_nodes=q.max_nodes)
    return value, diag


# ---------------------------------------------------------------------------
# dissipative bounds and norms
# ---------------------------------------------------------------------------

def dissipative_pointwise_bound(sym: PolynomialSymbol, epsilon: float, T: float,
                                l2_of_data: float) -> float:
    """Closed bound on sup_x |Lambda^epsilon u(x, T)| for damped flows.

    Equals (2 pi)^{-1/2} (int e^{2 Re Q(i xi) T} (1+xi^2)^eps dxi)^{1/2}
    times the L2 norm of the data; the constant matches this package's
    transform convention so the inequality holds without slack.
    """
    cls = classify(sym)
    if not cls.dissipative:
        raise OrientationError(
            "the pointwise bound is vacuous for undamped flows "
            "(use the non-stationary-phase regime instead)")
    if T <= 0:
        raise DomainError("T must be positive")
    # truncate where the damping factor is below 1e-18
    cut = 1.0
    while float(sym.re_q(cut)) * 2.0 * T > np.log(1e-18):
        cut *= 2.0
        if cut > 1e9:
            raise DomainError("damping too weak to truncate the bound integral")
    xi = np.linspace(-cut, cut, 400001)
    integrand = np.exp(2.0 * T * sym.re_q(xi)) * (1.0 + xi * xi) ** epsilon
    integral = float(np.trapezoid(integrand, dx=xi[1] - xi[0]))
    return math.sqrt(integral / TWO_PI) * l2_of_data


def dissipative_global_norm(sym: PolynomialSymbol, phi: SpectralFunction,
                            s: float, T: float) -> float:
    """||u||_{L^2(0,T; H^{s+m})} for damped flows, exact in frequency.

    m is the damping order; the time integral of e^{2 Re Q t} is the closed
    factor G = (e^{2 Re Q T} - 1) / (2 Re Q), with the removable value T
    where Re Q vanishes.
    """
    m = dissipative_order(sym)
    xis = phi.grid.xis
    z = 2.0 * sym.re_q(xis) * T
    small = np.abs(z) < 1e-8
    zsafe = np.where(small, 1.0, z)
    G = np.where(small, T * (1.0 + z / 2.0 + z * z / 6.0),
                 T * np.expm1(zsafe) / zsafe)
    weight = (1.0 + xis * xis) ** (s + m) * G
    val = float(np.trapezoid(weight * np.abs(phi.samples) ** 2,
                             dx=phi.grid.spacing) / TWO_PI)
    return math.sqrt(val)


# ---------------------------------------------------------------------------
# whole-time local norms of the one-sided family
# ---------------------------------------------------------------------------

def whole_time_point_norm(sym: DispersiveSymbol, psi: SpectralFunction,
                          sigma: float) -> float:
    """int_R |Lambda^sigma v(x, t)|^2 dt, independent of x, exact in frequency.

    By the change of variables tau = p(xi) and Plancherel in time the value
    is (1/2pi) int (1+xi^2)^sigma |psi_hat|^2 / p'(xi) dxi.
    """
    lo, hi = psi.support
    if lo < sym.N - 1e-9:
        raise DomainError("data support must stay above the threshold N")
    xis = psi.grid.xis
    mask = np.abs(psi.samples) > 0
    dp = np.asarray(sym.p_prime(xis), dtype=float)
    if np.any(dp[mask] <= 0):
        raise DivisionError("p' vanishes on the data support")
    integrand = np.zeros_like(dp)
    integrand[mask] = ((1.0 + xis[mask] ** 2) ** sigma
                       * np.abs(psi.samples[mask]) ** 2 / dp[mask])
    return float(np.trapezoid(integrand, dx=psi.grid.spacing) / TWO_PI)


def _tail_fit(ts, vals2, t_edge):
    """Extrapolated integral beyond t_edge from a c/t^2 envelope fit."""
    sel = (ts >= 0.7 * t_edge) & (ts <= 0.98 * t_edge)
    if not np.any(sel):
        return 0.0
    c = float(np.median(vals2[sel] * ts[sel] ** 2))
    return c / t_edge


@dataclass(frozen=True)
class TailDecomposition:
    I_n: float
    finite_window: float
    J_n: float
    I_n_quad: float
    tail_estimate: float
    point_norm: float

    @property
    def tail_fraction(self):
        return self.tail_estimate / self.J_n if self.J_n > 0 else math.inf


def tail_decomposition(sym: DispersiveSymbol, psi: SpectralFunction,
                       sigma: float, q: QuadratureSpec) -> TailDecomposition:
    """Split the whole-time local norm I_n into the finite window and tail.

    I_n is frequency-exact (2R times the point norm); the finite-window part
    integrates synthesized time series over [-T, T] x [-R, R]; J_n is their
    difference.  The mass beyond the synthesis truncation T_max is estimated
    by the c/t^2 envelope model and reported as a diagnostic.
    """
    point = whole_time_point_norm(sym, psi, sigma)
    I_n = 2.0 * q.R * point

    lo, hi = psi.support
    p_top = float(np.max(np.abs(np.asarray(sym.p(np.array([lo, hi])), dtype=float))))
    dt = np.pi / p_top * 0.999
    if q.t_step:
        dt = min(dt, q.t_step)
    dt = q.T / np.ceil(q.T / dt)            # land nodes exactly on +-T
    t_syn = dt * np.ceil(q.T_max / dt)
    nt = int(round(2.0 * t_syn / dt)) + 1
    ts = np.linspace(-t_syn, t_syn, nt)
    inner = np.abs(ts) <= q.T + 1e-12

    nx = max(3, int(np.ceil(2.0 * q.R / q.x_step)) + 1)
    xs = np.linspace(-q.R, q.R, nx)
    ev = Evolution(sym, psi)

    finite_slices = np.empty(nx)
    full_slices = np.empty(nx)
    tail_slices = np.empty(nx)
    for i, x in enumerate(xs):
        F = time_series(ev, float(x), sigma, ts)
        v2 = np.abs(F) ** 2
        finite_slices[i] = np.trapezoid(v2[inner], dx=dt)
        full_slices[i] = np.trapezoid(v2, dx=dt)
        pos = ts > 0
        neg = ts < 0
        tail_slices[i] = (_tail_fit(ts[pos], v2[pos], t_syn)
                          + _tail_fit(-ts[neg][::-1], v2[neg][::-1], t_syn))
    dx = xs[1] - xs[0]
    finite_window = float(np.trapezoid(finite_slices, dx=dx))
    I_quad = float(np.trapezoid(full_slices + tail_slices, dx=dx))
    tail_estimate = float(np.trapezoid(tail_slices, dx=dx))
    return TailDecomposition(I_n=I_n, finite_window=finite_window,
                             J_n=I_n - finite_window, I_n_quad=I_quad,
                             tail_estimate=tail_estimate, point_norm=point)


# ---------------------------------------------------------------------------
# sharp trace norms (whole-line time integral at a point, sup over x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceResult:
    value: float
    max_rel_deviation: float
    sample_values: tuple = ()


def _trace_weight(order: float, bessel: bool):
    if bessel:
        return lambda xi: (1.0 + xi * xi) ** order
    return lambda xi: np.abs(xi) ** (2.0 * order)


def sharp_trace_norm(ev: Evolution, order: float, sample_xs=None,
                     bessel: bool = False, q: QuadratureSpec = None) -> TraceResult:
    """int_R |d_x^order u(x, t)|^2 dt, exact in frequency, with x-certificate.

    The fractional derivative is the homogeneous multiplier |xi|^order (the
    inhomogeneous variant behind ``bessel``).  Requires the flow phase to be
    strictly monotone across the data support, so the time change of
    variables has a single branch and the value is exactly x-independent.
    The certificate re-computes the integral by time-domain synthesis at the
    sample points and reports the worst relative deviation.
    """
    q = q or QuadratureSpec()
    sym = ev.symbol
    f = ev.initial
    xis = f.grid.xis
    weight = _trace_weight(order, bessel)

    if isinstance(sym, PolynomialSymbol):
        cls = classify(sym)
        if cls.dissipative:
            raise OrientationError("trace norms require an undamped flow")
        dtheta = sym.theta(xis, order=1)
        active = np.abs(f.samples) > 0
        if np.any(dtheta[active] > 0) and np.any(dtheta[active] < 0):
            raise PhaseMonotonicityError(
                "flow phase rate changes sign across the data support")
        theta_fn = lambda xi: sym.theta(xi)
        dtheta_fn = lambda xi: sym.theta(xi, order=1)
    else:
        lo, _ = f.support
        if lo < sym.N - 1e-9:
            raise DomainError("data support must stay above the threshold N")
        dtheta = -np.asarray(sym.p_prime(xis), dtype=float)
        active = np.abs(f.samples) > 0
        theta_fn = lambda xi: -np.asarray(sym.p(xi), dtype=float)
        dtheta_fn = lambda xi: -np.asarray(sym.p_prime(xi), dtype=float)

    ratio = np.zeros_like(xis)
    wv = np.asarray(weight(xis), dtype=float)
    degenerate = active & (dtheta == 0.0)
    fine = active & (dtheta != 0.0)
    ratio[fine] = wv[fine] / np.abs(dtheta[fine])
    if np.any(degenerate):
        delta = f.grid.spacing * 1e-3
        probe = xis[degenerate] + delta
        ratio[degenerate] = (np.asarray(weight(probe), dtype=float)
                             / np.abs(np.asarray(dtheta_fn(probe), dtype=float)))
    integrand = ratio * np.abs(f.samples) ** 2
    value = float(np.trapezoid(integrand, dx=f.grid.spacing) / TWO_PI)

    if not np.any(active):
        return TraceResult(value=0.0, max_rel_deviation=0.0)

    if sample_xs is None:
        sample_xs = np.linspace(-2.0, 2.0, 5)
    sample_xs = np.asarray(sample_xs, dtype=float)

    # time-domain certificate per contiguous support segment
    rate = float(np.max(np.abs(np.asarray(theta_fn(xis[active]), dtype=float))))
    dt = np.pi / max(rate, 1e-12) * 0.98
    t_syn = dt * np.ceil(q.T_max / dt)
    nt = int(round(2.0 * t_syn / dt)) + 1
    ts = np.linspace(-t_syn, t_syn, nt)
    dtau_max = np.pi / t_syn

    dmin_active = float(np.min(np.abs(dtheta[active])))
    if dmin_active == 0.0:
        raise PhaseMonotonicityError(
            "certificate requires data supported away from stationary phase rate")

    deviations = []
    sample_values = []
    for x in sample_xs:
        F = np.zeros(nt, dtype=complex)
        for lo_s, hi_s in f.segments:
            seg = (xis >= lo_s - 1e-12) & (xis <= hi_s + 1e-12)
            if not np.any(seg):
                continue
            xi_seg = xis[seg]
            g = (np.sqrt(np.asarray(weight(xi_seg), dtype=float))
                 * f.samples[seg] * np.exp(1j * x * xi_seg))
            tau = np.asarray(theta_fn(xi_seg), dtype=float)
            h = g / np.abs(np.asarray(dtheta_fn(xi_seg), dtype=float))
            osc = abs(x) / dmin_active
            F += monotone_phase_series(xi_seg, h, tau, ts, dtau_max,
                                       oscillation_rate=osc)
        v2 = np.abs(F) ** 2
        td = float(np.trapezoid(v2, dx=dt))
        td += _tail_fit(ts[ts > 0], v2[ts > 0], t_syn)
        td += _tail_fit(-ts[ts < 0][::-1], v2[ts < 0][::-1], t_syn)
        sample_values.append(td)
        deviations.append(abs(td - value) / value if value > 0 else 0.0)
    return TraceResult(value=value,
                       max_rel_deviation=float(np.max(deviations)) if deviations else 0.0,
                       sample_values=tuple(sample_values))
