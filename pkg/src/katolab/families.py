"""Explicit band-limited data families and plateau windows.

The families are built from a single logarithmically damped spectrum profile
multiplied by nested C-infinity cutoffs whose transition shape never changes
with the truncation level, so the whole sequence is reproducible bit for bit.
Two-sided even cutoffs give real data concentrated (via a linear phase
factor) deep inside the analysis window; one-sided cutoffs give complex data
supported above an invertibility threshold.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import GridError, KatolabError
from .spectral import (PHASE_BUDGET_THETA, FrequencyGrid, SmoothWindow,
                       SpectralFunction, SpectrumModel, bridge_profile)

# linear phase e^{i SHIFT xi} concentrating the two-sided family near x = -SHIFT
DATA_SHIFT = 50.0

# analysis window: plateau and support of the default plateau window
WINDOW_PLATEAU = (-99.0, -5.0)
WINDOW_SUPPORT = (-110.0, -1.0)

# default grid spacing: resolves the data's linear phase plus any |x| up to
# the window edge at the phase budget, i.e. theta / (SHIFT + max|x|)
DEFAULT_SPACING = min(0.01, PHASE_BUDGET_THETA / (DATA_SHIFT + 110.0))


def eta_hat(xi):
    """Logarithmically damped spectrum 1 / ((1+xi^2)^{1/4} (1+ln(1+xi^2))^2).

    Positive, even, decreasing in |xi|; square-integrable, but every
    fractional smoothing of it of positive order has divergent L2 mass.
    """
    xi = np.asarray(xi, dtype=float)
    return 1.0 / ((1.0 + xi * xi) ** 0.25 * (1.0 + np.log1p(xi * xi)) ** 2)


@dataclass(frozen=True)
class CutoffSpec:
    """C-infinity cutoff with unit transition bands of fixed bridge shape.

    ``two_sided_even``: 1 on [-n, n], bridges down to 0 on n <= |xi| <= n+1.
    ``one_sided``: supported on [N, N+n+1], rising bridge on [N, N+1],
    flat on [N+1, N+n], falling bridge on [N+n, N+n+1].
    """

    kind: str
    n: int
    N: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("two_sided_even", "one_sided"):
            raise KatolabError(f"unknown cutoff kind {self.kind!r}")
        if self.n < 1:
            raise KatolabError("cutoff level n must be >= 1")

    @property
    def support(self):
        if self.kind == "two_sided_even":
            return (-(self.n + self.width), self.n + self.width)
        return (self.N, self.N + self.n + self.width)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "two_sided_even":
            return bridge_profile((np.abs(xi) - self.n) / self.width)
        rise = bridge_profile((self.N + self.width - xi) / self.width)
        fall = bridge_profile((xi - (self.N + self.n)) / self.width)
        return rise * fall


def phi_n(n: int, grid: FrequencyGrid = None, dxi: float = DEFAULT_SPACING,
          shift: float = DATA_SHIFT) -> SpectralFunction:
    """Two-sided family member: e^{i shift xi} * chi_n(xi) * eta_hat(xi).

    Hermitian (the physical function is real), band-limited to
    [-(n+1), n+1], concentrated near x = -shift.
    """
    cut = CutoffSpec("two_sided_even", n)
    band = n + 1.0
    if grid is None:
        grid = FrequencyGrid.symmetric_grid(band, dxi)
    if grid.xi_max < band or not grid.symmetric:
        raise GridError(f"grid must be symmetric with xi_max >= {band}")
    amp = lambda xi, _c=cut: _c(xi) * eta_hat(xi)
    xis = grid.xis
    samples = amp(xis) * np.exp(1j * shift * xis)
    model = SpectrumModel(amplitude=amp, shift=shift, segments=((-band, band),))
    return SpectralFunction(grid, samples, hermitian=True, model=model,
                            support=(-band, band))


def psi_n(n: int, N: float, grid: FrequencyGrid = None,
          dxi: float = DEFAULT_SPACING) -> SpectralFunction:
    """One-sided family member: mu_n(xi) * eta_hat(xi), supported in [N, N+n+1]."""
    cut = CutoffSpec("one_sided", n, N=N)
    hi = N + n + 1.0
    if grid is None:
        grid = FrequencyGrid.one_sided(N, hi, dxi)
    if grid.xi_max < hi or grid.xi_min > N:
        raise GridError(f"grid must cover [{N}, {hi}]")
    amp = lambda xi, _c=cut: _c(xi) * eta_hat(xi)
    samples = amp(grid.xis).astype(complex)
    model = SpectrumModel(amplitude=amp, segments=((N, hi),))
    return SpectralFunction(grid, samples, model=model, support=(N, hi))


def paper_window() -> SmoothWindow:
    """The canonical plateau window: 1 on [-99, -5], 0 outside [-110, -1]."""
    return SmoothWindow(WINDOW_PLATEAU, WINDOW_SUPPORT)


def make_window(plateau, support) -> SmoothWindow:
    return SmoothWindow(tuple(plateau), tuple(support))


# ---------------------------------------------------------------------------
# generic data for baselines and cross-checks
# ---------------------------------------------------------------------------

def smooth_bump(lo: float, hi: float, transition: float = None):
    """C-infinity bump: 0 outside (lo, hi), 1 on the inner plateau."""
    if transition is None:
        transition = 0.25 * (hi - lo)
    if not (transition > 0 and 2 * transition <= (hi - lo) + 1e-12):
        raise KatolabError("transition bands must fit inside the bump")

    def bump(xi):
        xi = np.asarray(xi, dtype=float)
        rise = bridge_profile((lo + transition - xi) / transition)
        fall = bridge_profile((xi - (hi - transition)) / transition)
        return rise * fall

    return bump


def gaussian_data(width: float = 1.0, xi_max: float = 12.0,
                  dxi: float = 0.05) -> SpectralFunction:
    """Data with spectrum e^{-xi^2 / (2 width^2)}, truncated far in the tail."""
    grid = FrequencyGrid.symmetric_grid(xi_max, dxi)
    amp = lambda xi, _w=width: np.exp(-np.asarray(xi, dtype=float) ** 2 / (2.0 * _w * _w))
    model = SpectrumModel(amplitude=amp, segments=((-xi_max, xi_max),))
    return SpectralFunction(grid, amp(grid.xis).astype(complex), hermitian=True,
                            model=model)


def bump_data(lo: float, hi: float, transition: float = None,
              dxi: float = 0.01) -> SpectralFunction:
    """One-sided data with a smooth plateau spectrum on [lo, hi]."""
    bump = smooth_bump(lo, hi, transition)
    grid = FrequencyGrid.one_sided(lo, hi, dxi)
    model = SpectrumModel(amplitude=bump, segments=((lo, hi),))
    return SpectralFunction(grid, bump(grid.xis).astype(complex), model=model,
                            support=(lo, hi))


def random_bandlimited(seed: int, band=(1.0, 5.0), hermitian: bool = True,
                       modes: int = 8, dxi: float = 0.01,
                       shift: float = 0.0) -> SpectralFunction:
    """Seeded random band-limited data with a smooth envelope.

    With ``hermitian`` the spectrum lives on +/-[lo, hi] with conjugate
    symmetry (real physical data); otherwise it is one-sided on [lo, hi].
    A nonzero ``shift`` applies the linear phase e^{i shift xi}, translating
    the physical data to be centered near x = -shift (each of the ``modes``
    random components is offset by at most modes*pi/(hi-lo) from there).
    """
    lo, hi = float(band[0]), float(band[1])
    if not 0.0 < lo < hi:
        raise KatolabError("band must satisfy 0 < lo < hi")
    rng = np.random.default_rng(seed)
    ca = rng.standard_normal(modes + 1)
    cb = rng.standard_normal(modes + 1)
    env = smooth_bump(lo, hi, 0.2 * (hi - lo))
    omega = np.pi / (hi - lo)

    def positive_part(xi):
        xi = np.asarray(xi, dtype=float)
        u = (xi - lo) * omega
        acc = np.zeros(xi.shape, dtype=complex)
        for k in range(modes + 1):
            acc += ca[k] * np.cos(k * u) + 1j * cb[k] * np.sin(k * u)
        return env(xi) * acc

    if not hermitian:
        grid = FrequencyGrid.one_sided(lo, hi, dxi)
        model = SpectrumModel(amplitude=positive_part, shift=shift,
                              segments=((lo, hi),))
        samples = positive_part(grid.xis) * np.exp(1j * shift * grid.xis)
        return SpectralFunction(grid, samples, model=model, support=(lo, hi))

    def amp(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape, dtype=complex)
        pos = xi > 0
        neg = xi < 0
        out[pos] = positive_part(xi[pos])
        out[neg] = np.conj(positive_part(-xi[neg]))
        return out

    grid = FrequencyGrid.symmetric_grid(hi, dxi)
    model = SpectrumModel(amplitude=amp, shift=shift,
                          segments=((-hi, -lo), (lo, hi)))
    samples = amp(grid.xis) * np.exp(1j * shift * grid.xis)
    return SpectralFunction(grid, samples, hermitian=True, model=model,
                            support=(-hi, hi))


_DATA_PATTERN = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")


def resolve_data(spec: str, N: float = 1.0, dxi: float = DEFAULT_SPACING,
                 hermitian_random: bool = True) -> SpectralFunction:
    """Construct data from a registry address like ``phi(8)`` or ``psi(16)``.

    Recognized forms: ``phi(n)``, ``psi(n)``, ``gaussian(width)``,
    ``random_bandlimited(seed, lo, hi)``, ``bump(lo, hi)``.
    """
    match = _DATA_PATTERN.match(spec)
    if not match:
        raise KatolabError(f"cannot parse data address {spec!r}")
    name, raw = match.group(1), match.group(2)
    args = [a.strip() for a in raw.split(",") if a.strip()]
    if name == "phi":
        return phi_n(int(args[0]), dxi=dxi)
    if name == "psi":
        return psi_n(int(args[0]), N=N, dxi=dxi)
    if name == "gaussian":
        width = float(args[0]) if args else 1.0
        return gaussian_data(width=width)
    if name == "random_bandlimited":
        seed = int(args[0])
        band = (float(args[1]), float(args[2])) if len(args) >= 3 else (1.0, 5.0)
        return random_bandlimited(seed, band=band, hermitian=hermitian_random)
    if name == "bump":
        return bump_data(float(args[0]), float(args[1]))
    raise KatolabError(f"unknown data family {name!r}")
