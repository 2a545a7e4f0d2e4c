"""Evolution operators: odd-order polynomial symbols and real dispersive symbols.

A polynomial symbol describes Q(d/dx) = sum_j a_j d^{2j+1} + sum_k b_k d^{2k}
acting diagonally in frequency through Q(i xi).  A dispersive symbol is a real
function p(xi) of order m > 1 with a strictly monotone branch above a
threshold N, so tau = p(xi) is invertible there.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (ClassificationError, ConvergenceError, DomainError,
                     ValidationError)

PURELY_DISPERSIVE = "purely_dispersive"
DISSIPATIVE_DISPERSIVE = "dissipative_dispersive"
DISSIPATIVE_DOMINANT = "dissipative_dominant"


@dataclass(frozen=True)
class Classification:
    case: str
    nu_idx: Optional[int] = None

    @property
    def dissipative(self):
        return self.case != PURELY_DISPERSIVE


@dataclass(frozen=True)
class PolynomialSymbol:
    """Coefficients of Q = Q1 + Q2 of order 2*omega + 1.

    ``a[j]`` multiplies d^{2j+1} for j = 0..omega; ``b[k-1] = alpha_k + i beta_k``
    multiplies d^{2k} for k = 1..omega.
    """

    omega: int
    a: tuple
    b: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.omega < 0:
            raise ClassificationError("omega must be nonnegative")
        a = tuple(float(v) for v in self.a)
        b = tuple(complex(v) for v in self.b)
        if len(a) != self.omega + 1:
            raise ClassificationError("need a_0..a_omega")
        if len(b) not in (0, self.omega):
            raise ClassificationError("need b_1..b_omega (or none)")
        if len(b) == 0:
            b = (0j,) * self.omega
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def alphas(self):
        return tuple(v.real for v in self.b)

    @property
    def betas(self):
        return tuple(v.imag for v in self.b)

    def _theta_coeffs(self):
        # Im Q(i xi) as a plain polynomial in xi
        c = np.zeros(2 * self.omega + 2)
        for j, aj in enumerate(self.a):
            c[2 * j + 1] += (-1.0) ** j * aj
        for k, bk in enumerate(self.b, start=1):
            c[2 * k] += (-1.0) ** k * bk.imag
        return c

    def _re_coeffs(self):
        # Re Q(i xi) as a plain polynomial in xi
        c = np.zeros(2 * self.omega + 1)
        for k, bk in enumerate(self.b, start=1):
            c[2 * k] += (-1.0) ** k * bk.real
        return c

    def re_q(self, xi):
        return np.polynomial.polynomial.polyval(np.asarray(xi, dtype=float),
                                                self._re_coeffs())

    def theta(self, xi, order=0):
        """Im Q(i xi) and its xi-derivatives (the oscillatory flow phase rate)."""
        c = self._theta_coeffs()
        for _ in range(order):
            c = np.polynomial.polynomial.polyder(c)
        return np.polynomial.polynomial.polyval(np.asarray(xi, dtype=float), c)


def eval_Q(sym: PolynomialSymbol, xi):
    """Q(i xi) = sum_j a_j (i xi)^{2j+1} + sum_k b_k (i xi)^{2k}, exactly."""
    return sym.re_q(xi) + 1j * sym.theta(xi)


def classify(sym: PolynomialSymbol) -> Classification:
    """Admissibility cases for the polynomial symbol.

    Either the odd part dominates with nonpositive-definite high-frequency
    damping (leading odd coefficient oriented so (-1)^omega a_omega > 0, all
    damping coefficients above some index nu vanish and (-1)^nu alpha_nu < 0,
    or no damping at all), or the damping dominates (a_omega = 0 with
    (-1)^omega alpha_omega < 0).  The error for inadmissible symbols reports
    whether mirroring x -> -x would fix the orientation.
    """
    result = _classify_or_none(sym)
    if result is not None:
        return result
    mirrored = PolynomialSymbol(sym.omega, tuple(-v for v in sym.a), sym.b)
    fixes = _classify_or_none(mirrored) is not None
    hint = ("; the mirror substitution x -> -x would make it admissible"
            if fixes else "")
    raise ClassificationError(
        f"symbol {sym.name or sym.a, sym.b} satisfies neither admissibility "
        f"condition{hint}", mirror_fixes=fixes)


def _classify_or_none(sym: PolynomialSymbol):
    omega = sym.omega
    alphas = sym.alphas
    a_lead = sym.a[omega]
    sign_lead = (-1.0) ** omega * a_lead
    nonzero = [k for k in range(1, omega + 1) if alphas[k - 1] != 0.0]
    if not nonzero:
        if sign_lead > 0:
            return Classification(PURELY_DISPERSIVE)
        return None
    nu = max(nonzero)
    damping_ok = (-1.0) ** nu * alphas[nu - 1] < 0
    if sign_lead > 0 and damping_ok:
        return Classification(DISSIPATIVE_DISPERSIVE, nu_idx=nu)
    if a_lead == 0.0 and nu == omega and damping_ok:
        return Classification(DISSIPATIVE_DOMINANT, nu_idx=omega)
    return None


def gain_exponent(sym) -> float:
    """The derivative gain asserted by the local smoothing estimate."""
    if isinstance(sym, PolynomialSymbol):
        return float(sym.omega)
    if isinstance(sym, DispersiveSymbol):
        return (sym.m - 1.0) / 2.0
    raise TypeError(f"not a symbol: {sym!r}")


def dissipative_order(sym: PolynomialSymbol) -> int:
    """Order nu of the high-frequency damping Re Q(i xi) ~ -|xi|^{2 nu}.

    This is the gain of the global dissipative smoothing estimate.
    """
    cls = classify(sym)
    if not cls.dissipative:
        raise ClassificationError("symbol has no dissipative part")
    return cls.nu_idx


def nonstationary_constants(sym: PolynomialSymbol, T: float, xi_max: float,
                            probe_count: int = 20001):
    """Numerical (M, C1) with theta'(xi) * T >= C1 * xi^{2 omega} for |xi| > M.

    C1 is half the asymptotic coefficient of theta' * T; M is the smallest
    probe node beyond which the sampled inequality holds.
    """
    omega = sym.omega
    lead = (-1.0) ** omega * sym.a[omega]
    if lead <= 0:
        raise ClassificationError("leading odd coefficient must be oriented positive")
    c1 = 0.5 * (2 * omega + 1) * lead * T
    xi = np.linspace(0.0, xi_max, probe_count)
    ok_pos = sym.theta(xi, order=1) * T >= c1 * xi ** (2 * omega)
    ok_neg = sym.theta(-xi, order=1) * T >= c1 * xi ** (2 * omega)
    ok = ok_pos & ok_neg
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return 0.0, c1
    if bad[-1] == probe_count - 1:
        raise ConvergenceError("no non-stationary threshold below the probe limit")
    return float(xi[bad[-1] + 1]), c1


# ---------------------------------------------------------------------------
# real dispersive symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersiveSymbol:
    """Real symbol p(xi) of order m > 1, invertible on (N, infinity)."""

    p: Callable
    p_prime: Callable
    m: float
    C1: float = 1.0
    C2: float = 1.0
    R_sym: float = 1.0
    N: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not self.m > 1:
            raise ValidationError("order m must exceed 1")
        if self.C1 <= 0 or self.C2 <= 0:
            raise ValidationError("C1 and C2 must be positive")

    def with_threshold(self, N):
        from dataclasses import replace
        return replace(self, N=float(N))


@dataclass(frozen=True)
class ValidationReport:
    nodes: np.ndarray
    bound_margin: np.ndarray
    derivative_margin: np.ndarray
    monotone_ok: bool

    @property
    def ok(self):
        return (bool(np.all(self.bound_margin >= 0))
                and bool(np.all(self.derivative_margin >= 0))
                and self.monotone_ok)


def validate_dispersive(sym: DispersiveSymbol, probe_grid) -> ValidationReport:
    """Check the growth bounds and monotonicity of p on the probe nodes."""
    xi = np.asarray(getattr(probe_grid, "xis", probe_grid), dtype=float)
    pvals = np.asarray(sym.p(xi), dtype=float)
    dvals = np.asarray(sym.p_prime(xi), dtype=float)
    bound_margin = sym.C1 * (1.0 + np.abs(xi)) ** sym.m - np.abs(pvals)
    outside = np.abs(xi) > sym.R_sym
    derivative_margin = np.where(
        outside,
        np.abs(dvals) - sym.C2 * (1.0 + np.abs(xi)) ** (sym.m - 1.0),
        np.inf,
    )
    past_n = xi > sym.N
    mono = True
    if np.count_nonzero(past_n) >= 2:
        mono = bool(np.all(np.diff(pvals[past_n]) > 0))
    report = ValidationReport(xi, bound_margin, derivative_margin, mono)
    if not report.ok:
        if not np.all(bound_margin >= 0):
            k = int(np.argmax(bound_margin < 0))
            raise ValidationError(
                f"|p| exceeds C1 (1+|xi|)^m first at xi = {xi[k]:.6g}")
        if not np.all(derivative_margin >= 0):
            k = int(np.argmax(derivative_margin < 0))
            raise ValidationError(
                f"|p'| falls below C2 (1+|xi|)^(m-1) first at xi = {xi[k]:.6g}")
        raise ValidationError("p is not strictly increasing beyond N")
    return report


def invert_p(sym: DispersiveSymbol, tau: float, tol: float = 1e-12,
             max_iter: int = 200) -> float:
    """The inverse branch nu(tau) of p on (N, infinity).

    Bracketed bisection seeded with the asymptotic guess tau^{1/m}, refined
    by Newton steps safeguarded to stay inside the bracket.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    # tol below the representation granularity of tau is unreachable
    tol = max(tol, 8.0 * np.finfo(float).eps * max(1.0, abs(tau)))
    p, dp, N = sym.p, sym.p_prime, sym.N
    p_at_n = float(p(N))
    if tau < p_at_n - tol:
        raise DomainError(f"tau = {tau:.6g} below p(N) = {p_at_n:.6g}")
    lo = N
    hi = max(N + 1.0, abs(tau) ** (1.0 / sym.m) if tau > 0 else N + 1.0)
    grow = 0
    while float(p(hi)) < tau:
        hi = 2.0 * hi + 1.0
        grow += 1
        if grow > 200:
            raise ConvergenceError("could not bracket the inverse")
    xi = min(max(abs(tau) ** (1.0 / sym.m) if tau > 0 else lo + 0.5 * (hi - lo),
                 lo), hi)
    for _ in range(max_iter):
        f = float(p(xi)) - tau
        if abs(f) <= tol:
            return float(xi)
        if f > 0:
            hi = xi
        else:
            lo = xi
        d = float(dp(xi))
        nxt = xi - f / d if d != 0.0 else np.nan
        xi = nxt if lo < nxt < hi else 0.5 * (lo + hi)
    raise ConvergenceError(f"inverse of p did not converge for tau = {tau}")


# ---------------------------------------------------------------------------
# registries
# ---------------------------------------------------------------------------

def _poly(omega, a, b=(), name=""):
    return PolynomialSymbol(omega, a, b, name=name)


def airy_symbol():
    return _poly(1, (0.0, -1.0), name="airy")


def kdv_linear_symbol():
    return _poly(1, (-1.0, -1.0), name="kdv_linear")


def kdv_burgers_symbol():
    return _poly(1, (-1.0, -1.0), (1.0,), name="kdv_burgers")


def heat_symbol():
    return _poly(1, (0.0, 0.0), (1.0,), name="heat")


def parabolic_symbol(m: int):
    b = [0j] * m
    b[m - 1] = complex((-1.0) ** (m + 1))
    return _poly(m, (0.0,) * (m + 1), tuple(b), name=f"parabolic_{m}")


def ginzburg_landau_symbol(alpha: float, beta: float, m: int = 1):
    if alpha <= 0:
        raise ClassificationError("Ginzburg-Landau damping needs alpha > 0")
    b = [0j] * m
    b[m - 1] = (alpha + 1j * beta) * (-1.0) ** (m + 1)
    return _poly(m, (0.0,) * (m + 1), tuple(b), name="ginzburg_landau")


POLYNOMIAL_REGISTRY = {
    "airy": airy_symbol,
    "kdv_linear": kdv_linear_symbol,
    "kdv_burgers": kdv_burgers_symbol,
    "heat": heat_symbol,
}


def schrodinger_symbol(N: float = 0.0):
    return DispersiveSymbol(
        p=lambda xi: np.asarray(xi, dtype=float) ** 2,
        p_prime=lambda xi: 2.0 * np.asarray(xi, dtype=float),
        m=2.0, C1=1.0, C2=1.0, R_sym=1.0, N=N, name="schrodinger")


def airy_dispersion_symbol(N: float = 0.0):
    return DispersiveSymbol(
        p=lambda xi: np.asarray(xi, dtype=float) ** 3,
        p_prime=lambda xi: 3.0 * np.asarray(xi, dtype=float) ** 2,
        m=3.0, C1=1.0, C2=0.75, R_sym=1.0, N=N, name="airy_dispersion")


def power_symbol(m: float, N: float = 0.0):
    if not m > 1:
        raise ValidationError("order m must exceed 1")
    return DispersiveSymbol(
        p=lambda xi: np.abs(xi) ** (m - 1.0) * np.asarray(xi, dtype=float),
        p_prime=lambda xi: m * np.abs(xi) ** (m - 1.0),
        m=m, C1=1.0, C2=m / 2.0 ** (m - 1.0), R_sym=1.0, N=N,
        name=f"power_{m:g}")


def monomial_sum_symbol(coeffs: dict, N: float = 0.0, R_sym: float = 1.0,
                        name: str = "monomial_sum"):
    """p(xi) = sum_k c_k xi^k from {power: coefficient} with analytic derivative."""
    powers = sorted(int(k) for k in coeffs)
    cs = {int(k): float(v) for k, v in coeffs.items()}
    m = float(max(powers))
    if not m > 1:
        raise ValidationError("order m must exceed 1")

    def p(xi):
        xi = np.asarray(xi, dtype=float)
        return sum(cs[k] * xi ** k for k in powers)

    def p_prime(xi):
        xi = np.asarray(xi, dtype=float)
        return sum(k * cs[k] * xi ** (k - 1) for k in powers if k >= 1)

    c1 = max(sum(abs(v) for v in cs.values()), 1e-12)
    probe = np.linspace(R_sym + 1e-9, max(10.0 * R_sym, 100.0), 4001)
    c2 = float(np.min(np.abs(p_prime(probe)) / (1.0 + probe) ** (m - 1.0)))
    c2 = max(c2 * 0.9, 1e-12)
    return DispersiveSymbol(p=p, p_prime=p_prime, m=m, C1=c1, C2=c2,
                            R_sym=R_sym, N=N, name=name)


DISPERSIVE_REGISTRY = {
    "schrodinger": schrodinger_symbol,
    "airy_dispersion": airy_dispersion_symbol,
}
