"""Config-driven experiment runners, verdicts, and CSV emission.

Each runner maps a config to a table of per-level rows plus a verdict line.
Rows are emitted in a frozen CSV schema; identical config and seed give
byte-identical output (wall-clock timing is opt-in for that reason).
"""

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .errors import KatolabError, ValidationError
from .families import (DEFAULT_SPACING, paper_window, phi_n, psi_n,
                       random_bandlimited, resolve_data)
from .functionals import (QuadratureSpec, SharpnessReport, alias_free_x_step,
                          dissipative_global_norm, dissipative_pointwise_bound,
                          local_kato_norm, sharp_trace_norm, tail_decomposition,
                          whole_time_point_norm, windowed_data_energy,
                          windowed_evolved_energy)
from .propagator import Evolution, evolve, solution_on_window
from .spectral import FrequencyGrid, l2_norm, sobolev_norm, synthesize_physical
from .symbols import (DISPERSIVE_REGISTRY, POLYNOMIAL_REGISTRY,
                      DispersiveSymbol, PolynomialSymbol, classify,
                      gain_exponent, monomial_sum_symbol, power_symbol,
                      validate_dispersive)

CSV_COLUMNS = ("experiment", "symbol", "n", "eps", "T", "R", "norm_data",
               "norm_eps_data", "A_n", "B_n", "I_n", "FiniteWindow_n", "J_n",
               "backend", "guard_margin", "runtime_ms")

VERDICT_CONFIRMED = "SHARPNESS CONFIRMED"
VERDICT_NO_DIVERGENCE = "NO-DIVERGENCE"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"
VERDICT_CONSISTENT = "ESTIMATE CONSISTENT"


@dataclass
class ExperimentResult:
    kind: str
    rows: list
    verdict: str
    reasons: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        if self.verdict in (VERDICT_CONFIRMED, VERDICT_NO_DIVERGENCE,
                            VERDICT_CONSISTENT):
            return 0
        return 2


def resolve_polynomial(spec: str) -> PolynomialSymbol:
    if spec in POLYNOMIAL_REGISTRY:
        return POLYNOMIAL_REGISTRY[spec]()
    if spec.startswith("poly:"):
        a, b = (), ()
        for part in spec[len("poly:"):].split(";"):
            part = part.strip()
            if part.startswith("a="):
                a = tuple(float(v) for v in part[2:].split(",") if v.strip())
            elif part.startswith("b="):
                b = tuple(complex(v) for v in part[2:].split(",") if v.strip())
        if not a:
            raise KatolabError("poly: spec needs a = a_0,...,a_omega")
        return PolynomialSymbol(len(a) - 1, a, b, name=spec)
    raise KatolabError(f"unknown polynomial symbol {spec!r}")


def resolve_dispersive(spec: str, N: float) -> DispersiveSymbol:
    if spec in DISPERSIVE_REGISTRY:
        return DISPERSIVE_REGISTRY[spec](N=N)
    if spec.startswith("power:"):
        return power_symbol(float(spec[len("power:"):]), N=N)
    if spec.startswith("monomials:"):
        coeffs = {}
        for part in spec[len("monomials:"):].split(","):
            k, v = part.split("=")
            coeffs[int(k)] = float(v)
        return monomial_sum_symbol(coeffs, N=N, name=spec)
    raise KatolabError(f"unknown dispersive symbol {spec!r}")


def _quadrature(cfg: ExperimentConfig, T: float = None) -> QuadratureSpec:
    return QuadratureSpec(x_step=cfg.x_step, t_step=cfg.t_step,
                          T=T if T is not None else cfg.T, T_max=cfg.T_max,
                          R=cfg.R, backend=cfg.backend, max_nodes=cfg.max_nodes)


def _bounded(values, factor):
    med = statistics.median(values)
    return max(values) <= factor * med, med


def _map_schedule(cfg, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# sharpness of the forward polynomial flows
# ---------------------------------------------------------------------------

def run_thm1(cfg: ExperimentConfig) -> ExperimentResult:
    sym = resolve_polynomial(cfg.symbol)
    cls = classify(sym)
    sweep = cfg.sweep_T or (cfg.T,)
    rows, reasons = [], []
    verdicts = []
    for T in sweep:
        q = _quadrature(cfg, T=T)
        window = paper_window()

        def member(n):
            start = time.perf_counter()
            data = phi_n(n)
            norm = l2_norm(data)
            norm_eps = sobolev_norm(data, cfg.epsilon)
            A, diag_a = windowed_data_energy(n, cfg.epsilon, q)
            B, diag_b = windowed_evolved_energy(sym, n, cfg.epsilon, T, q)
            extras = {"T": T}
            if cls.dissipative:
                bound = dissipative_pointwise_bound(sym, cfg.epsilon, T, norm)
                sol = solution_on_window(
                    Evolution(sym, phi_n(n)), T, window,
                    x_step=alias_free_x_step(q.x_step, n + 1.0),
                    sigma=cfg.epsilon, backend=q.backend, max_nodes=q.max_nodes)
                peak = float(np.max(np.abs(sol.values)))
                extras.update(pointwise_bound=bound, max_abs=peak,
                              bound_ok=bool(peak <= bound * (1.0 + 1e-9)))
            runtime = int(1000 * (time.perf_counter() - start))
            return SharpnessReport(
                n=n, norm_data=norm, norm_eps_data=norm_eps, A_n=A, B_n=B,
                backend=diag_b["backend"],
                guard_margin=min(diag_a["guard_margin"], diag_b["guard_margin"]),
                runtime_ms=runtime if cfg.timing else None, extras=extras)

        sweep_rows = _map_schedule(cfg, member, cfg.n_schedule)
        rows.extend(sweep_rows)
        verdict, sweep_reasons = _thm1_verdict(cfg, sweep_rows, cls)
        verdicts.append(verdict)
        reasons.extend(f"T={T:g}: {r}" for r in sweep_reasons)
    final = verdicts[0] if len(set(verdicts)) == 1 else VERDICT_INCONCLUSIVE
    if len(set(verdicts)) != 1:
        reasons.append("verdict unstable across the T sweep")
    return ExperimentResult("thm1", rows, final, reasons,
                            extras={"classification": cls.case})


def _thm1_verdict(cfg, rows, cls):
    A = [r.A_n for r in rows]
    B = [r.B_n for r in rows]
    norms = [r.norm_data for r in rows]
    reasons = []
    if cfg.epsilon == 0.0:
        bounded, med = _bounded(A, cfg.bounded_factor)
        if bounded:
            reasons.append(f"control run: A_n bounded (max {max(A):.6g} <= "
                           f"{cfg.bounded_factor:g} x median {med:.6g})")
            return VERDICT_NO_DIVERGENCE, reasons
        reasons.append("control run failed: A_n not bounded")
        return VERDICT_INCONCLUSIVE, reasons

    ok = True
    if norms[-1] / norms[0] > cfg.norm_uniform_tol:
        ok = False
        reasons.append(f"data norms grow: ratio {norms[-1] / norms[0]:.4g} "
                       f"> {cfg.norm_uniform_tol:g}")
    if not all(b > a for a, b in zip(A, A[1:])):
        ok = False
        reasons.append("A_n is not strictly increasing")
    growth = A[-1] / A[0]
    if growth < cfg.growth_factor:
        ok = False
        reasons.append(f"A growth factor {growth:.6g} below the "
                       f"configured {cfg.growth_factor:g}")
    b_bounded, med = _bounded(B, cfg.bounded_factor)
    if not b_bounded:
        ok = False
        reasons.append(f"B_n unbounded: max {max(B):.6g} > "
                       f"{cfg.bounded_factor:g} x median {med:.6g}")
    if len(B) >= 3 and B[-1] > B[-2] > B[-3] and B[-1] / B[-3] - 1.0 > 1e-6:
        ok = False
        reasons.append("B_n grows monotonically across the last three levels")
    if cls.dissipative and not all(r.extras.get("bound_ok", True) for r in rows):
        ok = False
        reasons.append("an evolved sample exceeded the closed pointwise bound")
    if ok:
        reasons.append(f"A growth factor {growth:.6g}, B max/median "
                       f"{max(B) / med:.4g}")
        return VERDICT_CONFIRMED, reasons
    return VERDICT_INCONCLUSIVE, reasons


# ---------------------------------------------------------------------------
# sharpness of the dispersive flows
# ---------------------------------------------------------------------------

def run_thm2(cfg: ExperimentConfig) -> ExperimentResult:
    sym = resolve_dispersive(cfg.symbol, N=cfg.N)
    xi_top = max(cfg.n_schedule) + cfg.N + 2.0
    validate_dispersive(sym, FrequencyGrid(0.0, xi_top, 4001))
    sigma = cfg.epsilon + gain_exponent(sym)
    q = _quadrature(cfg)

    def member(n):
        start = time.perf_counter()
        data = psi_n(n, N=cfg.N)
        norm = l2_norm(data)
        norm_eps = sobolev_norm(data, cfg.epsilon)
        I_n = 2.0 * q.R * whole_time_point_norm(sym, data, sigma)
        row = SharpnessReport(n=n, norm_data=norm, norm_eps_data=norm_eps,
                              I_n=I_n, backend="frequency-exact",
                              guard_margin=math.inf)
        if n <= cfg.time_domain_max_n:
            decomp = tail_decomposition(sym, data, sigma, q)
            row.finite_window = decomp.finite_window
            row.J_n = decomp.J_n
            row.I_n_quad = decomp.I_n_quad
            row.backend = "series"
            lo, hi = data.support
            p_top = float(np.max(np.abs(np.asarray(sym.p(np.array([lo, hi]))))))
            row.guard_margin = float(np.pi / p_top / (q.t_step or (np.pi / p_top)))
            row.extras["tail_estimate"] = decomp.tail_estimate
            row.extras["tail_fraction"] = decomp.tail_fraction
        row.runtime_ms = int(1000 * (time.perf_counter() - start)) if cfg.timing else None
        return row

    rows = _map_schedule(cfg, member, cfg.n_schedule)
    verdict, reasons = _thm2_verdict(cfg, rows)
    return ExperimentResult("thm2", rows, verdict, reasons)


def _thm2_verdict(cfg, rows):
    I = [r.I_n for r in rows]
    J = [r.J_n for r in rows if r.J_n is not None]
    reasons = []
    if cfg.epsilon == 0.0:
        bounded, med = _bounded(I, cfg.bounded_factor)
        if bounded:
            reasons.append(f"control run: I_n bounded (max {max(I):.6g} <= "
                           f"{cfg.bounded_factor:g} x median {med:.6g})")
            return VERDICT_NO_DIVERGENCE, reasons
        reasons.append("control run failed: I_n not bounded")
        return VERDICT_INCONCLUSIVE, reasons

    ok = True
    if not all(b > a for a, b in zip(I, I[1:])):
        ok = False
        reasons.append("I_n is not strictly increasing")
    growth = I[-1] / I[0]
    if growth < cfg.growth_factor:
        ok = False
        reasons.append(f"I growth factor {growth:.6g} below the "
                       f"configured {cfg.growth_factor:g}")
    if not J:
        ok = False
        reasons.append("no time-domain levels were computed")
    else:
        tol = 1e-3 * statistics.median(I)
        if min(J) < -tol:
            ok = False
            reasons.append(f"negative tail: min J_n = {min(J):.6g}")
        j_bounded, med = _bounded(J, cfg.bounded_factor)
        if not j_bounded:
            ok = False
            reasons.append(f"J_n unbounded: max {max(J):.6g} > "
                           f"{cfg.bounded_factor:g} x median {med:.6g}")
        fractions = [r.extras.get("tail_fraction", 0.0) for r in rows
                     if r.J_n is not None]
        if max(fractions) > 0.01:
            ok = False
            reasons.append(f"extrapolated truncation tail reaches "
                           f"{max(fractions):.3%} of J_n")
    if ok:
        reasons.append(f"I growth factor {growth:.6g}, J max/median "
                       f"{max(J) / statistics.median(J):.4g}")
        return VERDICT_CONFIRMED, reasons
    return VERDICT_INCONCLUSIVE, reasons


# ---------------------------------------------------------------------------
# baselines: the estimates themselves at their natural exponents
# ---------------------------------------------------------------------------

def _baseline_symbol(cfg):
    try:
        return resolve_polynomial(cfg.symbol), True
    except KatolabError:
        return resolve_dispersive(cfg.symbol, N=cfg.N), False


def run_baseline(cfg: ExperimentConfig) -> ExperimentResult:
    sym, poly = _baseline_symbol(cfg)
    sigma = cfg.s + gain_exponent(sym)
    q = _quadrature(cfg)
    rows = []
    ratios = []

    def seed_member(i):
        data = random_bandlimited(cfg.seed + i, band=cfg.band, hermitian=poly)
        value = local_kato_norm(Evolution(sym, data), sigma, q)
        ref = sobolev_norm(data, cfg.s) ** 2
        return data, value, ref

    for i, (data, value, ref) in enumerate(
            _map_schedule(cfg, seed_member, range(cfg.seeds))):
        ratio = value / ref
        ratios.append(ratio)
        rows.append(SharpnessReport(
            n=i, norm_data=math.sqrt(ref), norm_eps_data=sobolev_norm(data, sigma),
            A_n=value, B_n=ratio, backend="tensor-trapezoid",
            guard_margin=math.inf, extras={"kind": "random"}))

    family_ratios = []
    for n in (8, 16, 32):
        data = phi_n(n) if poly else psi_n(n, N=cfg.N)
        value = local_kato_norm(Evolution(sym, data), sigma, q)
        ref = sobolev_norm(data, cfg.s) ** 2
        family_ratios.append(value / ref)
        rows.append(SharpnessReport(
            n=n, norm_data=math.sqrt(ref), norm_eps_data=sobolev_norm(data, sigma),
            A_n=value, B_n=value / ref, backend="tensor-trapezoid",
            guard_margin=math.inf, extras={"kind": "family"}))

    spread = max(ratios) / min(ratios)
    fam_spread = max(family_ratios) / min(family_ratios)
    reasons = [f"random-data ratio spread {spread:.4g} over {cfg.seeds} seeds",
               f"family ratio spread {fam_spread:.4g}"]
    verdict = (VERDICT_CONSISTENT if spread <= cfg.spread_factor
               else VERDICT_INCONCLUSIVE)
    return ExperimentResult("baseline", rows, verdict, reasons,
                            extras={"spread": spread, "max_ratio": max(ratios)})


def run_trace(cfg: ExperimentConfig) -> ExperimentResult:
    sym, poly = _baseline_symbol(cfg)
    order = cfg.trace_order
    if order is None:
        order = cfg.s + gain_exponent(sym)
    data_spec = cfg.data or (f"random_bandlimited({cfg.seed}, 1, 6)" if poly
                             else f"random_bandlimited({cfg.seed}, {cfg.N}, {cfg.N + 5})")
    data = resolve_data(data_spec, N=cfg.N, hermitian_random=poly)
    q = _quadrature(cfg)
    result = sharp_trace_norm(Evolution(sym, data), order, q=q)
    ref = l2_norm(data) ** 2 if cfg.s == 0.0 else sobolev_norm(data, cfg.s) ** 2
    rows = [SharpnessReport(
        n=0, norm_data=math.sqrt(ref), norm_eps_data=math.nan,
        A_n=result.value, B_n=result.value / ref, backend="frequency-exact",
        guard_margin=math.inf,
        extras={"max_rel_deviation": result.max_rel_deviation,
                "sample_values": result.sample_values})]
    reasons = [f"trace/reference ratio {result.value / ref:.8g}",
               f"max x-deviation {result.max_rel_deviation:.3g}"]
    verdict = (VERDICT_CONSISTENT if result.max_rel_deviation <= 0.005
               else VERDICT_INCONCLUSIVE)
    return ExperimentResult("trace", rows, verdict, reasons,
                            extras={"value": result.value, "ratio": result.value / ref,
                                    "deviation": result.max_rel_deviation})


def run_y1(cfg: ExperimentConfig) -> ExperimentResult:
    sym = resolve_polynomial(cfg.symbol)
    rows, ratios, agreements = [], [], []
    for i in range(cfg.seeds):
        data = random_bandlimited(cfg.seed + i, band=cfg.band, hermitian=True)
        exact = dissipative_global_norm(sym, data, cfg.s, cfg.T)
        from .symbols import dissipative_order
        m = dissipative_order(sym)
        ts = np.linspace(0.0, cfg.T, 401)
        ev = Evolution(sym, data)
        vals = np.array([sobolev_norm(evolve(ev, t), cfg.s + m) ** 2 for t in ts])
        quad = math.sqrt(float(np.trapezoid(vals, dx=ts[1] - ts[0])))
        ref = sobolev_norm(data, cfg.s)
        ratios.append((exact / ref) ** 2)
        agreements.append(abs(exact - quad) / exact)
        rows.append(SharpnessReport(
            n=i, norm_data=ref, norm_eps_data=sobolev_norm(data, cfg.s + m),
            A_n=exact, B_n=(exact / ref) ** 2, backend="frequency-exact",
            guard_margin=math.inf,
            extras={"time_quadrature": quad, "agreement": agreements[-1]}))
    spread = max(ratios) / min(ratios)
    reasons = [f"exact-vs-time-quadrature agreement worst {max(agreements):.3%}",
               f"ratio spread {spread:.4g} over {cfg.seeds} seeds"]
    verdict = (VERDICT_CONSISTENT
               if max(agreements) <= 0.01 and spread <= cfg.spread_factor
               else VERDICT_INCONCLUSIVE)
    return ExperimentResult("y1", rows, verdict, reasons,
                            extras={"spread": spread,
                                    "worst_agreement": max(agreements)})


def run_validate_symbol(cfg: ExperimentConfig) -> ExperimentResult:
    try:
        poly = resolve_polynomial(cfg.symbol)
    except KatolabError:
        poly = None
    if poly is not None:
        cls = classify(poly)    # inadmissible symbols raise out of here
        reasons = [f"polynomial symbol: case {cls.case}"
                   + (f", damping index {cls.nu_idx}" if cls.nu_idx else "")]
        return ExperimentResult("validate_symbol", [], VERDICT_CONSISTENT, reasons,
                                extras={"classification": cls.case,
                                        "nu_idx": cls.nu_idx})
    sym = resolve_dispersive(cfg.symbol, N=cfg.N)
    xi_top = max(cfg.n_schedule) + cfg.N + 2.0
    report = validate_dispersive(sym, FrequencyGrid(0.0, xi_top, 4001))
    finite = report.derivative_margin[np.isfinite(report.derivative_margin)]
    reasons = [f"growth bound margin min {np.min(report.bound_margin):.6g}",
               f"derivative bound margin min {np.min(finite):.6g}" if finite.size
               else "derivative bound not probed",
               f"monotone beyond N: {report.monotone_ok}"]
    return ExperimentResult("validate_symbol", [], VERDICT_CONSISTENT, reasons,
                            extras={"ok": report.ok})


def run_evolve(cfg: ExperimentConfig) -> ExperimentResult:
    data_spec = cfg.data or "phi(8)"
    data = resolve_data(data_spec, N=cfg.N)
    try:
        sym = resolve_polynomial(cfg.symbol)
    except KatolabError:
        sym = resolve_dispersive(cfg.symbol, N=cfg.N)
    ev = Evolution(sym, data)
    window = paper_window() if data_spec.startswith("phi") else None
    if window is not None:
        sol = solution_on_window(ev, cfg.T, window, x_step=cfg.x_step,
                                 sigma=0.0, backend=cfg.backend,
                                 max_nodes=cfg.max_nodes)
        xs, values = sol.xs, sol.values
        backend = sol.backend
    else:
        xs = np.arange(-10.0 * cfg.R, 10.0 * cfg.R + cfg.x_step / 2, cfg.x_step)
        state = evolve(ev, cfg.T)
        values, diag = synthesize_physical(state, xs, backend=cfg.backend,
                                           max_nodes=cfg.max_nodes)
        backend = diag["backend"]
    dump = [(float(x), float(v.real), float(v.imag), float(abs(v)))
            for x, v in zip(xs, values)]
    return ExperimentResult("evolve", [], VERDICT_CONSISTENT,
                            [f"field dump at t = {cfg.T:g} over {len(xs)} nodes"],
                            extras={"dump": dump, "backend": backend})


RUNNERS = {
    "thm1": run_thm1,
    "thm2": run_thm2,
    "baseline": run_baseline,
    "trace": run_trace,
    "y1": run_y1,
    "validate_symbol": run_validate_symbol,
    "evolve": run_evolve,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    return RUNNERS[cfg.experiment](cfg)


# ---------------------------------------------------------------------------
# CSV emission (deterministic)
# ---------------------------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def rows_to_csv(cfg: ExperimentConfig, result: ExperimentResult) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in result.rows:
        t_val = row.extras.get("T", cfg.T)
        record = (result.kind, cfg.symbol, row.n, cfg.epsilon, t_val, cfg.R,
                  row.norm_data, row.norm_eps_data, row.A_n, row.B_n, row.I_n,
                  row.finite_window, row.J_n, row.backend, row.guard_margin,
                  row.runtime_ms)
        lines.append(",".join(_fmt(v) for v in record))
    return "\n".join(lines) + "\n"


def write_csv(cfg: ExperimentConfig, result: ExperimentResult, path: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(cfg, result))


def write_evolve_csv(result: ExperimentResult, path: str):
    lines = ["x,re_u,im_u,abs_u"]
    for x, re, im, mag in result.extras["dump"]:
        lines.append(f"{_fmt(x)},{_fmt(re)},{_fmt(im)},{_fmt(mag)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


PLOT_TEMPLATE = '''"""Companion plot script (auto-generated): run with python."""
import csv
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}

rows = list(csv.DictReader(open(CSV_PATH)))
ns = [int(r["n"]) for r in rows]
fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for ax, keys in zip(axes, ({series_a!r}, {series_b!r})):
    for key in keys:
        ys = [(int(r["n"]), float(r[key])) for r in rows if r[key] != ""]
        if ys:
            ax.plot([p[0] for p in ys], [p[1] for p in ys], "o-", label=key)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.legend()
    ax.grid(True, alpha=0.3)
fig.tight_layout()
fig.savefig(CSV_PATH.replace(".csv", ".png"), dpi=150)
print("wrote", CSV_PATH.replace(".csv", ".png"))
'''


def write_plot_script(csv_path: str, out_path: str, kind: str):
    if kind == "thm2":
        series_a, series_b = ("I_n",), ("FiniteWindow_n", "J_n")
    else:
        series_a, series_b = ("A_n",), ("B_n",)
    text = PLOT_TEMPLATE.format(csv_path=csv_path, series_a=series_a,
                                series_b=series_b)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
