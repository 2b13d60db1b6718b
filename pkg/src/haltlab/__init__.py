"""Halting-time statistics for eigenvalue algorithms and conjugate gradient on random input."""
from .discrete import (
    cg_halting_time,
    compute_spectrum_with_deflation,
    deflation_time,
    deflation_time_k,
    jacobi_step,
    qr_shifted_step,
    qr_step,
)
from .ensembles import EnsembleSpec, SeedPath, sample
from .harness import ExperimentConfig, compare_runs, emit_plot_data, run_experiment
from .linalg import eigen_oracle, qr_factorize, tridiagonalize
from .stats import (
    check_scaling_region,
    gap_statistic,
    histogram,
    ks_distance,
    normalize_times,
    scaled_t1,
)
from .toda import SpectralData, lax_rk4, solve_t1, spectral_data, toda_energy, toda_x11

__version__ = "0.1.0"
