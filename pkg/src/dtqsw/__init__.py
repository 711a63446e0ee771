"""Recurrence of discrete-time quantum stochastic walks on the integer line."""

from .directsim import (
    MonitoredDensityState,
    ReturnSeries,
    initial_state,
    return_series,
    step_monitored,
    weighted_return,
)
from .fitting import FitForm, MinimumEstimate, PowerLawFit, find_minimum, fit_power_law
from .genfun import (
    DEFAULT_Z_SAMPLES,
    StieltjesMatrix,
    SweepPoint,
    fourier_blocks,
    recurrence_estimate,
    resolvent_kernel,
    stieltjes_matrix,
    z_sweep,
)
from .model import (
    Model,
    TranslationKraus,
    TranslationKrausFamily,
    WalkParams,
    coin_matrix,
    general_coin,
    kraus_balanced,
    kraus_correlated,
    kraus_family,
    momentum_kernel,
)
from .oracles import classical_first_return, pi_half_genfun, recurrence_unitary
from .perturbation import (
    monitored_trajectory,
    slope_balanced,
    slope_correlated,
    slope_series,
    theta_star,
)

__version__ = "0.1.0"
