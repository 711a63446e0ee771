"""Power-law fits of R~_z-vs-z data and minima location in p.

The fit model a - b(1-z)^c is linear in (a, b) once c is fixed, so the
nonlinear part reduces to a 1-d search over the exponent: a coarse grid
followed by golden-section refinement. No initialization heuristics are
needed and the fit cannot diverge.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import FitDegenerateError, ParameterError

__all__ = [
    "FitForm",
    "PowerLawFit",
    "MinimumEstimate",
    "fit_power_law",
    "minimize_unimodal",
    "find_minimum",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
C_GRID = np.linspace(0.1, 2.0, 96)


class FitForm(enum.Enum):
    A_MINUS_B = "aminusb"  # a - b (1-z)^c
    ONE_MINUS_B = "oneminusb"  # 1 - b (1-z)^c


def _solve_linear(t, values, c, form):
    """Least-squares (a, b) and SSE for fixed exponent c; t = 1 - z."""
    basis = t**c
    if form is FitForm.A_MINUS_B:
        design = np.column_stack([np.ones_like(t), -basis])
        coef, *_ = np.linalg.lstsq(design, values, rcond=None)
        a, b = coef
        resid = values - (a - b * basis)
    else:
        rhs = 1.0 - values
        denom = float(basis @ basis)
        b = float(basis @ rhs) / denom
        a = 1.0
        resid = values - (1.0 - b * basis)
    return float(a), float(b), float(resid @ resid)


@dataclass(frozen=True)
class PowerLawFit:
    a_fit: float
    b_fit: float
    c_fit: float
    a_err: float
    b_err: float
    c_err: float
    model_form: FitForm
    residual_norm: float

    def predict(self, z):
        z = np.asarray(z, dtype=float)
        return self.a_fit - self.b_fit * (1.0 - z) ** self.c_fit


def fit_power_law(points, form: FitForm = FitForm.A_MINUS_B) -> PowerLawFit:
    """Fit (z, value) data to a - b(1-z)^c or 1 - b(1-z)^c.

    Standard errors are Jacobian-based asymptotic estimates at the optimum
    (no error model beyond i.i.d. residuals is assumed).
    """
    if isinstance(form, str):
        form = FitForm(form)
    points = sorted(points)
    if len(points) < 4:
        raise ParameterError("need at least 4 points")
    z = np.array([q[0] for q in points], dtype=float)
    values = np.array([q[1] for q in points], dtype=float)
    if np.any(z >= 1.0) or np.any(np.diff(z) <= 0):
        raise ParameterError("z must be strictly increasing and < 1")
    if np.ptp(values) < 1e-14:
        raise FitDegenerateError("constant data", constant=float(values[0]))
    if not np.all(np.isfinite(values)):
        raise ParameterError("values must be finite")
    t = 1.0 - z

    def sse(c):
        return _solve_linear(t, values, c, form)[2]

    errors = [sse(c) for c in C_GRID]
    i_best = int(np.argmin(errors))
    lo = C_GRID[max(i_best - 1, 0)]
    hi = C_GRID[min(i_best + 1, len(C_GRID) - 1)]
    # golden-section refinement on the exponent
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = sse(x1), sse(x2)
    for _ in range(60):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = sse(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = sse(x2)
    c = 0.5 * (lo + hi)
    a, b, best_sse = _solve_linear(t, values, c, form)

    # asymptotic covariance from the Jacobian of the residuals
    basis = t**c
    log_t = np.log(t)
    if form is FitForm.A_MINUS_B:
        jac = np.column_stack([np.ones_like(t), -basis, -b * basis * log_t])
        n_par = 3
    else:
        jac = np.column_stack([-basis, -b * basis * log_t])
        n_par = 2
    dof = max(len(z) - n_par, 1)
    sigma2 = best_sse / dof
    cov = sigma2 * np.linalg.pinv(jac.T @ jac)
    if form is FitForm.A_MINUS_B:
        a_err, b_err, c_err = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    else:
        a_err = 0.0
        b_err, c_err = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return PowerLawFit(
        a_fit=a, b_fit=b, c_fit=c,
        a_err=float(a_err), b_err=float(b_err), c_err=float(c_err),
        model_form=form, residual_norm=math.sqrt(best_sse),
    )


@dataclass(frozen=True)
class MinimumEstimate:
    p_min: float
    r_min: float
    interval_1e2: tuple
    interval_1e3: tuple
    monotone: bool = False


def minimize_unimodal(func, lo=0.0, hi=1.0, iterations=15):
    """Halve the bracket around the minimizer of a unimodal function.

    Each iteration compares the function just left and right of the
    midpoint, so the interval width shrinks by 2^-iterations.
    """
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        delta = (hi - lo) * 1e-3
        if func(mid - delta) < func(mid + delta):
            hi = mid + delta
        else:
            lo = mid - delta
    p = 0.5 * (lo + hi)
    return p, func(p)


def _crossover(func, target, lo, hi, iterations=15):
    """Bisect for func = target, with func(lo) and func(hi) straddling it."""
    f_lo = func(lo) - target
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if (func(mid) - target) * (f_lo if f_lo != 0 else -1.0) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_minimum(func, iterations: int = 15) -> MinimumEstimate:
    """Locate the minimizer of p -> func(p) on [0, 1] with uncertainty bands.

    Unimodality is assumed; a monotone profile (detected by probing near
    p = 0) short-circuits to p_min = 0 with empty intervals.
    """
    probe = 1.0 / 32.0
    f0 = func(0.0)
    if f0 <= func(probe) and f0 <= func(2 * probe):
        return MinimumEstimate(
            p_min=0.0, r_min=f0, interval_1e2=(0.0, 0.0),
            interval_1e3=(0.0, 0.0), monotone=True,
        )
    p_min, r_min = minimize_unimodal(func, 0.0, 1.0, iterations)
    intervals = []
    for offset in (1e-2, 1e-3):
        target = r_min + offset
        lo = _crossover(func, target, 0.0, p_min, iterations) if func(0.0) > target else 0.0
        hi = _crossover(func, target, 1.0, p_min, iterations) if func(1.0) > target else 1.0
        intervals.append((lo, hi))
    return MinimumEstimate(
        p_min=p_min, r_min=r_min,
        interval_1e2=intervals[0], interval_1e3=intervals[1],
    )
