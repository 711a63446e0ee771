"""Direct iteration of the monitored CP map on a truncated lattice.

The density matrix is stored as a (2, P, 2, P) array over
(ket coin, ket position, bra coin, bra position) with P = 2L + 1 and the
origin at index L. The truncation half-width is chosen as L = t_max + 1,
so the light cone can never touch the boundary; any contact is a hard
error, never silent mass loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConsistencyError,
    ParameterError,
    ResourceError,
    TruncationError,
)
from .model import TranslationKrausFamily, WalkParams, kraus_family

__all__ = [
    "MonitoredDensityState",
    "ReturnSeries",
    "initial_state",
    "step_monitored",
    "return_series",
    "weighted_return",
]

DEFAULT_MEMORY_CAP = 4 << 30  # bytes


def _shifted(arr: np.ndarray, axis: int, shift: int) -> np.ndarray:
    """Shift along a position axis with zero fill (no wrap-around)."""
    if shift == 0:
        return arr
    out = np.zeros_like(arr)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if shift > 0:
        src[axis] = slice(None, -shift)
        dst[axis] = slice(shift, None)
    else:
        src[axis] = slice(-shift, None)
        dst[axis] = slice(None, shift)
    out[tuple(dst)] = arr[tuple(src)]
    return out


@dataclass
class MonitoredDensityState:
    half_width: int
    rho: np.ndarray  # (2, P, 2, P) complex
    step_count: int = 0
    absorbed_mass: float = 0.0

    @property
    def origin(self) -> int:
        return self.half_width

    def survival(self) -> float:
        return float(np.trace(self.rho.reshape(2 * (2 * self.half_width + 1), -1)).real)


@dataclass
class ReturnSeries:
    """Survival, return and first-return series of one monitored evolution."""

    survival: np.ndarray  # S_t for t = 0..t_max
    return_prob: np.ndarray  # R_t = 1 - S_t
    first_return: np.ndarray  # q_m = R_m - R_{m-1}, index m-1 for m = 1..t_max

    def __post_init__(self):
        if np.min(self.first_return) < -1e-12:
            raise ConsistencyError(
                f"negative first-return weight {np.min(self.first_return):.3e}"
            )


def _check_density(coin_density: np.ndarray) -> np.ndarray:
    coin_density = np.asarray(coin_density, dtype=complex)
    if coin_density.shape != (2, 2):
        raise ParameterError("coin density must be 2x2")
    if not np.allclose(coin_density, coin_density.conj().T, atol=1e-12):
        raise ParameterError("coin density must be Hermitian")
    if abs(np.trace(coin_density) - 1.0) > 1e-12:
        raise ParameterError("coin density must have unit trace")
    if np.min(np.linalg.eigvalsh(coin_density)) < -1e-12:
        raise ParameterError("coin density must be positive semidefinite")
    return coin_density


def initial_state(coin_density: np.ndarray, half_width: int) -> MonitoredDensityState:
    """Walker localized at the origin with the given coin density.

    The origin block is not projected at step 0: monitoring starts after
    the first application of the map.
    """
    coin_density = _check_density(coin_density)
    if half_width < 1:
        raise ParameterError("half_width must be >= 1")
    p_dim = 2 * half_width + 1
    rho = np.zeros((2, p_dim, 2, p_dim), dtype=complex)
    rho[:, half_width, :, half_width] = coin_density
    return MonitoredDensityState(half_width=half_width, rho=rho)


def _apply_cptp(rho: np.ndarray, family: TranslationKrausFamily) -> np.ndarray:
    out = np.zeros_like(rho)
    for op in family.kraus:
        left = np.zeros_like(rho)
        for block, shift in op.terms:
            left += _shifted(np.einsum("ab,bxcy->axcy", block, rho), 1, shift)
        for block, shift in op.terms:
            out += _shifted(np.einsum("axby,cb->axcy", left, block.conj()), 3, shift)
    return out


def step_monitored(
    state: MonitoredDensityState, family: TranslationKrausFamily
) -> MonitoredDensityState:
    """One CPTP step followed by absorption projection at the origin."""
    if state.step_count + 1 > state.half_width:
        raise TruncationError(
            f"step {state.step_count + 1} would reach the truncation boundary "
            f"(half_width={state.half_width})"
        )
    rho = _apply_cptp(state.rho, family)
    o = state.origin
    absorbed = float((rho[0, o, 0, o] + rho[1, o, 1, o]).real)
    rho[:, o, :, :] = 0.0
    rho[:, :, :, o] = 0.0
    return MonitoredDensityState(
        half_width=state.half_width,
        rho=rho,
        step_count=state.step_count + 1,
        absorbed_mass=state.absorbed_mass + absorbed,
    )


def return_series(
    params: WalkParams,
    t_max: int,
    coin_density: np.ndarray | None = None,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> ReturnSeries:
    """Full survival / return / first-return series up to t_max."""
    if t_max < 1:
        raise ParameterError("t_max must be >= 1")
    if coin_density is None:
        coin_density = np.diag([1.0, 0.0])
    half_width = t_max + 1
    dim = 2 * (2 * half_width + 1)
    nbytes = dim * dim * 16
    if nbytes > memory_cap:
        raise ResourceError(
            f"density matrix would need {nbytes} bytes (cap {memory_cap})"
        )
    family = kraus_family(params)
    state = initial_state(coin_density, half_width)
    survival = np.empty(t_max + 1)
    survival[0] = 1.0
    for t in range(1, t_max + 1):
        state = step_monitored(state, family)
        survival[t] = state.survival()
    return_prob = 1.0 - survival
    first_return = np.diff(return_prob)
    return ReturnSeries(
        survival=survival, return_prob=return_prob, first_return=first_return
    )


def weighted_return(series: ReturnSeries, z: float) -> float:
    """sum_m q_m z^(m-1): the truncated generating-function estimate.

    Matches the genfun estimate up to the geometric tail bound z^t_max.
    """
    if not 0.0 < z < 1.0:
        raise ParameterError("z must lie in (0, 1)")
    m = np.arange(1, len(series.first_return) + 1)
    return float(np.sum(series.first_return * z ** (m - 1)))
