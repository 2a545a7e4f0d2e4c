"""Frequency-grid representation, Fourier conventions, Bessel potentials, norms.

Functions are stored by complex samples of their Fourier transform on a
uniform frequency grid.  All data handled here is band-limited, so the
representation is exact up to quadrature.  Physical-space values are
synthesized on demand through the backends in :mod:`katolab.quadrature`.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, GridError, NestingError, ResolutionError
from . import quadrature

TWO_PI = 2.0 * np.pi

# phase-resolution budget: dxi * max|d(phase)/dxi| must stay below this
PHASE_BUDGET_THETA = np.pi / 4.0


@dataclass(frozen=True)
class FourierConventions:
    """The single transform convention used by every module.

    forward:    u_hat(xi) = int u(x) e^{-i xi x} dx
    inverse:    u(x) = inverse_scale * int u_hat(xi) e^{+i xi x} dxi
    plancherel: int |u|^2 dx = plancherel_scale * int |u_hat|^2 dxi
    """

    forward_sign: int = -1
    inverse_scale: float = 1.0 / TWO_PI
    plancherel_scale: float = 1.0 / TWO_PI


FOURIER_CONVENTIONS = FourierConventions()


def fourier_conventions():
    return FOURIER_CONVENTIONS


@dataclass(frozen=True)
class PhaseBudget:
    theta: float = PHASE_BUDGET_THETA

    def required_spacing(self, phase_derivative_max):
        if phase_derivative_max <= 0:
            return np.inf
        return self.theta / phase_derivative_max

    def margin(self, spacing, phase_derivative_max):
        if phase_derivative_max <= 0:
            return np.inf
        return self.theta / (spacing * phase_derivative_max)

    def check(self, spacing, phase_derivative_max):
        m = self.margin(spacing, phase_derivative_max)
        if m < 1.0:
            raise ResolutionError(
                f"grid spacing {spacing:.3g} violates the phase budget "
                f"(needs oversampling by {1.0 / m:.3g})",
                oversample_factor=1.0 / m,
            )
        return m


@dataclass(frozen=True)
class FrequencyGrid:
    xi_min: float
    xi_max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise GridError("grid needs at least two nodes")
        if not self.xi_max > self.xi_min:
            raise GridError("xi_max must exceed xi_min")

    @property
    def spacing(self):
        return (self.xi_max - self.xi_min) / (self.count - 1)

    @property
    def xis(self):
        return np.linspace(self.xi_min, self.xi_max, self.count)

    @property
    def symmetric(self):
        tol = 1e-12 * max(abs(self.xi_max), 1.0)
        return abs(self.xi_min + self.xi_max) <= tol and self.count % 2 == 1

    @classmethod
    def symmetric_grid(cls, xi_max, dxi_max):
        half = max(1, int(np.ceil(xi_max / dxi_max)))
        return cls(-xi_max, xi_max, 2 * half + 1)

    @classmethod
    def one_sided(cls, xi_lo, xi_hi, dxi_max):
        count = max(2, int(np.ceil((xi_hi - xi_lo) / dxi_max)) + 1)
        return cls(xi_lo, xi_hi, count)


@dataclass(frozen=True)
class FlowPhase:
    """Multiplier exp(t * decay(xi)) * exp(i t * theta(xi)) attached by a flow."""

    theta: Callable
    dtheta: Callable
    d2theta: Callable
    d3theta_bound: Callable
    t: float
    decay: Optional[Callable] = None
    origin: object = None


@dataclass(frozen=True)
class SpectrumModel:
    """Analytic description of a spectrum: smooth amplitude times known phases.

    The full spectrum is amplitude(xi) * e^{i shift xi} * flow factor.  The
    split lets evaluation refine the frequency grid arbitrarily and lets the
    Filon backend treat the oscillation exactly.
    """

    amplitude: Callable
    shift: float = 0.0
    flow: Optional[FlowPhase] = None
    segments: tuple = ()

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        vals = np.asarray(self.amplitude(xi), dtype=complex)
        if self.shift != 0.0:
            vals = vals * np.exp(1j * self.shift * xi)
        if self.flow is not None:
            t = self.flow.t
            vals = vals * np.exp(1j * t * np.asarray(self.flow.theta(xi), dtype=float))
            if self.flow.decay is not None:
                vals = vals * np.exp(t * np.asarray(self.flow.decay(xi), dtype=float))
        return vals

    def oscillation_bound(self, probe_count=4001):
        """Bound on |d/dxi| of the non-amplitude phase over the segments."""
        bound = abs(self.shift)
        if self.flow is not None and self.flow.t != 0.0:
            worst = 0.0
            for lo, hi in self.segments:
                xi = np.linspace(lo, hi, probe_count)
                worst = max(worst, np.max(np.abs(self.flow.dtheta(xi))))
            bound += abs(self.flow.t) * worst
        return bound


@dataclass(frozen=True)
class SpectralFunction:
    grid: FrequencyGrid
    samples: np.ndarray
    hermitian: bool = False
    model: Optional[SpectrumModel] = None
    support: tuple = None
    osc_bound: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if samples.shape != (self.grid.count,):
            raise GridError("sample count does not match the grid")
        if not np.all(np.isfinite(samples.view(float))):
            raise GridError("samples must be finite")
        if self.support is None:
            object.__setattr__(self, "support", (self.grid.xi_min, self.grid.xi_max))
        lo, hi = self.support
        eps = 1e-9 * max(abs(self.grid.xi_min), abs(self.grid.xi_max), 1.0)
        if lo < self.grid.xi_min - eps or hi > self.grid.xi_max + eps:
            raise GridError("declared support exceeds the grid")
        if self.hermitian:
            if not self.grid.symmetric:
                raise GridError("hermitian data requires a symmetric grid")
            peak = np.max(np.abs(samples)) or 1.0
            if np.max(np.abs(samples - np.conj(samples[::-1]))) > 1e-9 * peak:
                raise GridError("samples violate hermitian symmetry")

    @property
    def segments(self):
        if self.model is not None and self.model.segments:
            return self.model.segments
        return (self.support,)

    def phase_derivative_bound(self):
        if self.model is not None:
            return self.model.oscillation_bound()
        return self.osc_bound

    def with_samples(self, samples, **overrides):
        return replace(self, samples=samples, **overrides)


def bessel_potential(f: SpectralFunction, sigma: float) -> SpectralFunction:
    """Apply the multiplier (1 + xi^2)^{sigma/2} (fractional Bessel potential)."""
    if sigma == 0.0:
        return f
    xis = f.grid.xis
    mult = (1.0 + xis * xis) ** (sigma / 2.0)
    model = f.model
    if model is not None:
        old_amp = model.amplitude
        amp = lambda xi, _a=old_amp, _s=sigma: (1.0 + xi * xi) ** (_s / 2.0) * np.asarray(_a(xi), dtype=complex)
        model = replace(model, amplitude=amp)
    return replace(f, samples=f.samples * mult, model=model)


def l2_norm(f: SpectralFunction) -> float:
    """||f|| with ||f||^2 = (1/2pi) int |f_hat|^2 dxi (trapezoid on the grid)."""
    val = np.trapezoid(np.abs(f.samples) ** 2, dx=f.grid.spacing) / TWO_PI
    return float(np.sqrt(val))


def sobolev_norm(f: SpectralFunction, s: float) -> float:
    return l2_norm(bessel_potential(f, s))


def evaluate_physical(f: SpectralFunction, xs, resolution_guard: PhaseBudget = None):
    """Inverse transform of the stored samples at the given x values.

    Strict: raises ResolutionError when the stored grid violates the phase
    budget (the caller must refine the grid or use the Filon backend), and
    DomainError when the declared support is not inside the grid.
    """
    guard = resolution_guard or PhaseBudget()
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lo, hi = f.support
    if lo < f.grid.xi_min - 1e-12 or hi > f.grid.xi_max + 1e-12:
        raise DomainError("data support exceeds the stored grid")
    if not np.any(f.samples):
        return np.zeros(len(xs), dtype=complex)
    phase = f.phase_derivative_bound() + (np.max(np.abs(xs)) if xs.size else 0.0)
    guard.check(f.grid.spacing, phase)
    return quadrature.inverse_transform_samples(f.samples, f.grid.xis, xs)


def synthesize_physical(f: SpectralFunction, xs, guard: PhaseBudget = None,
                        backend: str = "auto", max_nodes: int = 1 << 28,
                        phase_tol: float = 1e-6):
    """Physical values of f at xs, refining the frequency grid as needed.

    Model-backed functions are re-evaluated on a grid satisfying the phase
    budget (chunked fast transform) or handed to the Filon backend; plain
    sampled functions fall back to the strict evaluator.  Returns
    ``(values, diagnostics)`` with the backend used and the guard margin.
    """
    guard = guard or PhaseBudget()
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    xabs = float(np.max(np.abs(xs))) if xs.size else 0.0

    if f.model is None:
        values = evaluate_physical(f, xs, guard)
        margin = guard.margin(f.grid.spacing, f.phase_derivative_bound() + xabs)
        return values, {"backend": "samples", "nodes": f.grid.count,
                        "guard_margin": float(margin)}

    model = f.model
    phase_bound = model.oscillation_bound() + xabs
    dxi_req = guard.required_spacing(phase_bound)
    total_nodes = sum(
        int(np.ceil((hi - lo) / dxi_req)) + 1 for lo, hi in model.segments
    )

    choice = backend
    if backend == "auto":
        choice = "oversampled" if total_nodes <= max_nodes else "filon"
    if choice in ("oversampled", "oversampled_fft"):
        values = np.zeros(len(xs), dtype=complex)
        for lo, hi in model.segments:
            values += quadrature.inverse_transform_callable(model, lo, hi, dxi_req, xs)
        return values, {"backend": "oversampled", "nodes": total_nodes,
                        "guard_margin": 1.0}
    if choice == "filon":
        flow = model.flow
        if flow is not None and flow.t != 0.0:
            t = flow.t
            if flow.decay is not None:
                amp = lambda xi: np.asarray(model.amplitude(xi), dtype=complex) * np.exp(t * np.asarray(flow.decay(xi), dtype=float))
            else:
                amp = model.amplitude
            phase = lambda xi: t * np.asarray(flow.theta(xi), dtype=float)
            dphase = lambda xi: t * np.asarray(flow.dtheta(xi), dtype=float)
            d2phase = lambda xi: t * np.asarray(flow.d2theta(xi), dtype=float)
            d3bound = lambda xi: abs(t) * float(np.max(np.atleast_1d(flow.d3theta_bound(xi))))
        else:
            amp = model.amplitude
            zero = lambda xi: np.zeros_like(np.asarray(xi, dtype=float))
            phase = dphase = d2phase = zero
            d3bound = lambda xi: 0.0
        xs_eff = xs + model.shift
        values = np.zeros(len(xs), dtype=complex)
        for lo, hi in model.segments:
            values += quadrature.filon_inverse_transform(
                amp, phase, dphase, d2phase, d3bound, lo, hi, xs_eff,
                phase_tol=phase_tol)
        return values, {"backend": "filon", "nodes": total_nodes,
                        "guard_margin": 1.0}
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# smooth plateau windows
# ---------------------------------------------------------------------------

def _bump_exp(u):
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def bridge_profile(u):
    """C-infinity bridge rho: 1 for u <= 0, 0 for u >= 1, monotone between.

    rho(u) = E(1-u) / (E(1-u) + E(u)) with E(u) = exp(-1/u); rho(1/2) = 1/2.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    lo = _bump_exp(1.0 - u)
    hi = _bump_exp(u)
    out = np.ones_like(u)
    mid = (u > 0.0) & (u < 1.0)
    out[mid] = lo[mid] / (lo[mid] + hi[mid])
    out[u >= 1.0] = 0.0
    return out[0] if scalar else out


@dataclass(frozen=True)
class SmoothWindow:
    """Plateau window: 1 on [a, b], 0 outside [A, B], C-infinity bridges between."""

    plateau: tuple
    support: tuple
    profile: str = "exp_bridge"

    def __post_init__(self):
        (a, b), (A, B) = self.plateau, self.support
        if not (A < a < b < B):
            raise NestingError(
                f"window intervals must nest: support ({A}, {B}) around plateau ({a}, {b})"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        (a, b), (A, B) = self.plateau, self.support
        out = np.zeros_like(x)
        inside = (x > A) & (x < B)
        out[inside] = 1.0
        left = inside & (x < a)
        out[left] = bridge_profile((a - x[left]) / (a - A))
        right = inside & (x > b)
        out[right] = bridge_profile((x[right] - b) / (B - b))
        return out[0] if scalar else out

    def xs(self, x_step):
        A, B = self.support
        count = max(2, int(np.ceil((B - A) / x_step)) + 1)
        return np.linspace(A, B, count)


def windowed_energy_detailed(f: SpectralFunction, w: SmoothWindow, sigma: float = 0.0,
                             x_step: float = 0.05, backend: str = "auto",
                             max_nodes: int = 1 << 28):
    """int w(x) |Lambda^sigma f(x)|^2 dx plus synthesis diagnostics."""
    g = bessel_potential(f, sigma)
    xs = w.xs(x_step)
    values, diag = synthesize_physical(g, xs, backend=backend, max_nodes=max_nodes)
    integrand = w(xs) * np.abs(values) ** 2
    return float(np.trapezoid(integrand, dx=xs[1] - xs[0])), diag


def windowed_energy(f: SpectralFunction, w: SmoothWindow, sigma: float = 0.0,
                    x_step: float = 0.05, backend: str = "auto",
                    max_nodes: int = 1 << 28) -> float:
    """int w(x) |Lambda^sigma f(x)|^2 dx over the window support (trapezoid)."""
    return windowed_energy_detailed(f, w, sigma, x_step, backend, max_nodes)[0]
