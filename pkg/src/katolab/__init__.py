"""katolab: a spectral laboratory for local smoothing of 1D linear evolution
equations.

Exact Fourier-multiplier propagators, fractional smoothing operators,
explicit band-limited data families, local smoothing functionals, and
config-driven sharpness experiments.
"""

from .spectral import (FOURIER_CONVENTIONS, FrequencyGrid, PhaseBudget,
                       SmoothWindow, SpectralFunction, bessel_potential,
                       evaluate_physical, fourier_conventions, l2_norm,
                       sobolev_norm, windowed_energy)
from .symbols import (DispersiveSymbol, PolynomialSymbol, classify, eval_Q,
                      gain_exponent, invert_p, validate_dispersive)
from .families import eta_hat, make_window, paper_window, phi_n, psi_n
from .propagator import Evolution, evolve, solution_on_window, time_series
from .functionals import (QuadratureSpec, SharpnessReport,
                          dissipative_global_norm, dissipative_pointwise_bound,
                          local_kato_norm, sharp_trace_norm, tail_decomposition,
                          whole_time_point_norm, windowed_data_energy,
                          windowed_evolved_energy)
from .config import ExperimentConfig, load_config
from .experiments import run_experiment, write_csv

__all__ = [
    "FOURIER_CONVENTIONS", "FrequencyGrid", "PhaseBudget", "SmoothWindow",
    "SpectralFunction", "bessel_potential", "evaluate_physical",
    "fourier_conventions", "l2_norm", "sobolev_norm", "windowed_energy",
    "DispersiveSymbol", "PolynomialSymbol", "classify", "eval_Q",
    "gain_exponent", "invert_p", "validate_dispersive",
    "eta_hat", "make_window", "paper_window", "phi_n", "psi_n",
    "Evolution", "evolve", "solution_on_window", "time_series",
    "QuadratureSpec", "SharpnessReport", "dissipative_global_norm",
    "dissipative_pointwise_bound", "local_kato_norm", "sharp_trace_norm",
    "tail_decomposition", "whole_time_point_norm", "windowed_data_energy",
    "windowed_evolved_energy",
    "ExperimentConfig", "load_config", "run_experiment", "write_csv",
    "__version__",
]

__version__ = "0.1.0"
