"""Oscillatory inverse-transform backends.

All routines approximate (1/2pi) * int A(xi) e^{i x xi} dxi on a finite
frequency interval, for many x at once.  Two exact-trapezoid paths (direct
summation and a chirp-z fast transform for uniform x grids, memory-chunked
so arbitrarily fine frequency grids stay cheap) plus a Filon-type path with
local quadratic phase interpolation for integrands whose oscillation would
make the trapezoid grid astronomically fine.
"""

from functools import lru_cache

import numpy as np
from scipy.signal import CZT
from scipy.special import fresnel

TWO_PI = 2.0 * np.pi

# frequency nodes processed per chunk on the fast-transform path
CHUNK_NODES = 1 << 22

# direct summation is used below this work estimate (nodes * targets)
DIRECT_WORK_LIMIT = 1 << 21


@lru_cache(maxsize=16)
def _czt_plan(n, m, w):
    return CZT(n, m=m, w=w, a=1.0 + 0.0j)


def trapezoid_weights(count):
    w = np.ones(count)
    w[0] = 0.5
    w[-1] = 0.5
    return w


def is_uniform(xs, rtol=1e-9):
    xs = np.asarray(xs, dtype=float)
    if xs.size < 3:
        return True
    d = np.diff(xs)
    return np.max(np.abs(d - d[0])) <= rtol * max(np.max(np.abs(d)), 1e-300)


def _direct_sum(weighted_samples, xis, xs):
    out = np.zeros(len(xs), dtype=complex)
    xs = np.asarray(xs, dtype=float)
    step = max(1, DIRECT_WORK_LIMIT // max(len(xs), 1))
    for start in range(0, len(xis), step):
        sl = slice(start, start + step)
        out += np.exp(1j * np.outer(xs, xis[sl])) @ weighted_samples[sl]
    return out


def _czt_sum(weighted_samples_eval, xi0, dxi, count, x0, dx, m):
    """sum_j g_j exp(i x_k xi_j) for x_k = x0 + k*dx, chunked over j.

    ``weighted_samples_eval(j0, j1)`` returns the trapezoid-weighted samples
    for global node indices [j0, j1).
    """
    k = np.arange(m)
    xk = x0 + k * dx
    w = complex(np.exp(1j * dx * dxi))
    out = np.zeros(m, dtype=complex)
    for start in range(0, count, CHUNK_NODES):
        stop = min(start + CHUNK_NODES, count)
        n = stop - start
        g = weighted_samples_eval(start, stop)
        j = np.arange(n)
        g = g * np.exp(1j * x0 * j * dxi)
        chunk = _czt_plan(n, m, w)(g)
        xi_base = xi0 + start * dxi
        out += np.exp(1j * xk * xi_base) * chunk
    return out


def inverse_transform_samples(samples, xis, xs):
    """(1/2pi) * trapezoid of samples * e^{i x xi} over the given xi nodes."""
    samples = np.asarray(samples, dtype=complex)
    xis = np.asarray(xis, dtype=float)
    xs = np.asarray(xs, dtype=float)
    dxi = xis[1] - xis[0]
    weighted = samples * trapezoid_weights(len(xis))
    big = len(xis) * max(len(xs), 1) > DIRECT_WORK_LIMIT
    if big and len(xs) >= 2 and is_uniform(xs):
        acc = _czt_sum(
            lambda a, b: weighted[a:b], xis[0], dxi, len(xis),
            xs[0], xs[1] - xs[0], len(xs),
        )
    else:
        acc = _direct_sum(weighted, xis, xs)
    return acc * (dxi / TWO_PI)


def inverse_transform_callable(spectrum, xi_lo, xi_hi, dxi_max, xs):
    """Trapezoid inverse transform of a spectrum callable on [xi_lo, xi_hi].

    The grid spacing is chosen <= dxi_max with nodes at both endpoints; the
    callable is evaluated chunk by chunk so the fine grid is never
    materialized at once.
    """
    xs = np.asarray(xs, dtype=float)
    span = xi_hi - xi_lo
    count = int(np.ceil(span / dxi_max)) + 1
    count = max(count, 2)
    dxi = span / (count - 1)

    def weighted_eval(a, b):
        xi = xi_lo + np.arange(a, b) * dxi
        g = np.asarray(spectrum(xi), dtype=complex)
        if a == 0:
            g[0] *= 0.5
        if b == count:
            g[-1] *= 0.5
        return g

    if len(xs) >= 2 and is_uniform(xs) and count * len(xs) > DIRECT_WORK_LIMIT:
        acc = _czt_sum(weighted_eval, xi_lo, dxi, count, xs[0], xs[1] - xs[0], len(xs))
    else:
        acc = np.zeros(len(xs), dtype=complex)
        for start in range(0, count, CHUNK_NODES):
            stop = min(start + CHUNK_NODES, count)
            xi = xi_lo + np.arange(start, stop) * dxi
            acc += _direct_sum(weighted_eval(start, stop), xi, xs)
    return acc * (dxi / TWO_PI)


# ---------------------------------------------------------------------------
# Filon-type quadrature with local quadratic phase interpolation
# ---------------------------------------------------------------------------

_SERIES_CUT = 0.05


def linear_phase_moments(b, h):
    """m_l = int_{-h}^{h} u^l e^{i b u} du for l = 0, 1, 2 (b may be an array)."""
    b = np.asarray(b, dtype=float)
    th = b * h
    small = np.abs(th) < _SERIES_CUT
    ths = np.where(small, 1.0, th)

    s, c = np.sin(th), np.cos(th)
    m0_e = 2.0 * h * s / ths
    m1_e = 2.0j * h * h * (s - th * c) / ths**2
    m2_e = 2.0 * h**3 * ((th**2 - 2.0) * s + 2.0 * th * c) / ths**3

    t2 = th * th
    m0_s = 2.0 * h * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2**3 / 5040.0)
    m1_s = 2.0j * h * h * th * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0)
    m2_s = 2.0 * h**3 * (1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0)

    m0 = np.where(small, m0_s, m0_e)
    m1 = np.where(small, m1_s, m1_e)
    m2 = np.where(small, m2_s, m2_e)
    return m0, m1, m2


def fresnel_primitive(a, v):
    """int_0^v e^{i a w^2} dw for scalar real a != 0 and array v."""
    sign = 1.0 if a > 0 else -1.0
    scale = np.sqrt(2.0 * abs(a) / np.pi)
    s, c = fresnel(v * scale)
    return np.sqrt(np.pi / (2.0 * abs(a))) * (c + 1j * sign * s)


def quadratic_phase_moments(a, b, h):
    """G_l = int_{-h}^{h} u^l e^{i(a u^2 + b u)} du, scalar a, array b."""
    b = np.asarray(b, dtype=float)
    beta = b / (2.0 * a)
    g0 = np.exp(-1j * a * beta**2) * (
        fresnel_primitive(a, beta + h) - fresnel_primitive(a, beta - h)
    )
    e_hi = np.exp(1j * (a * h * h + b * h))
    e_lo = np.exp(1j * (a * h * h - b * h))
    g1 = (e_hi - e_lo) / (2j * a) - beta * g0
    g2 = (h * (e_hi + e_lo) - g0 - 1j * b * g1) / (2j * a)
    return g0, g1, g2


def build_panels(lo, hi, d3bound, phase_tol, max_halfwidth):
    """Panel centers/half-widths so cubic phase remainder stays under phase_tol."""
    centers, halves = [], []
    xi = lo
    while xi < hi - 1e-14 * max(abs(hi), 1.0):
        d3 = max(d3bound(xi), d3bound(min(xi + 2 * max_halfwidth, hi)))
        h = max_halfwidth if d3 <= 0 else min(
            max_halfwidth, (6.0 * phase_tol / d3) ** (1.0 / 3.0)
        )
        h = min(h, (hi - xi) / 2.0)
        h = max(h, 1e-9)
        centers.append(xi + h)
        halves.append(h)
        xi += 2 * h
    return np.array(centers), np.array(halves)


def filon_inverse_transform(amplitude, phase, dphase, d2phase, d3bound,
                            lo, hi, xs, phase_tol=1e-5, max_halfwidth=0.05,
                            x_block=4096):
    """(1/2pi) int_lo^hi A(xi) e^{i(phase(xi) + x xi)} dxi for each x.

    The amplitude is interpolated quadratically and the phase quadratically
    on each panel; panel widths are set from ``d3bound`` (a pointwise bound
    on |phase'''|) so the neglected cubic phase term stays below phase_tol.
    """
    xs = np.asarray(xs, dtype=float)
    centers, halves = build_panels(lo, hi, d3bound, phase_tol, max_halfwidth)
    amp_c = np.asarray(amplitude(centers), dtype=complex)
    amp_m = np.asarray(amplitude(centers - halves), dtype=complex)
    amp_p = np.asarray(amplitude(centers + halves), dtype=complex)
    ph_c = np.asarray(phase(centers), dtype=float)
    dph_c = np.asarray(dphase(centers), dtype=float)
    d2ph_c = np.asarray(d2phase(centers), dtype=float)

    out = np.zeros(len(xs), dtype=complex)
    for xstart in range(0, len(xs), x_block):
        xb = xs[xstart:xstart + x_block]
        acc = np.zeros(len(xb), dtype=complex)
        for i in range(len(centers)):
            c, h = centers[i], halves[i]
            a = 0.5 * d2ph_c[i]
            b = dph_c[i] + xb
            carrier = np.exp(1j * (ph_c[i] + xb * c))
            if abs(a) * h * h <= 0.125:
                # quadratic phase factor varies slowly: fold into amplitude
                rot = np.exp(1j * a * h * h)
                am, a0, ap = amp_m[i] * rot, amp_c[i], amp_p[i] * rot
                q0 = a0
                q1 = (ap - am) / (2.0 * h)
                q2 = (ap - 2.0 * a0 + am) / (2.0 * h * h)
                g0, g1, g2 = linear_phase_moments(b, h)
            else:
                q0 = amp_c[i]
                q1 = (amp_p[i] - amp_m[i]) / (2.0 * h)
                q2 = (amp_p[i] - 2.0 * amp_c[i] + amp_m[i]) / (2.0 * h * h)
                g0, g1, g2 = quadratic_phase_moments(a, b, h)
            acc += carrier * (q0 * g0 + q1 * g1 + q2 * g2)
        out[xstart:xstart + x_block] = acc
    return out / TWO_PI
