"""Closed-form reference values used as ground truth in tests and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "PiHalfSymbols",
    "recurrence_unitary",
    "pi_half_genfun",
    "pi_half_weighted_return",
    "classical_first_return",
]


def recurrence_unitary(theta: float) -> float:
    """Recurrence probability of the unitary walk, (2/pi)[theta(1-cot^2) + cot].

    theta = 0 is special-cased to 0; the formula is singular there but the
    walker moves in a single direction and never returns.
    """
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise ParameterError("theta must lie in [0, pi/2]")
    if theta == 0.0:
        return 0.0
    cot = math.cos(theta) / math.sin(theta)
    return (2.0 / math.pi) * (theta * (1.0 - cot**2) + cot)


@dataclass(frozen=True)
class PiHalfSymbols:
    """Scalar symbols of the theta = pi/2 closed form."""

    a_e: float
    b_e: float
    c_e: float
    u_e: float
    v_e: float

    @classmethod
    def make(cls, z: float, p: float) -> "PiHalfSymbols":
        a = 1.0 - (1.0 - p) * z
        b = 1.0 + (1.0 - p) * z
        c = p * z
        if a * a - c * c < -1e-15 or b * b - c * c < -1e-15:
            raise ParameterError("symbols leave the real domain")
        u = math.sqrt(max(a * a - c * c, 0.0))
        v = math.sqrt(max(b * b - c * c, 0.0))
        return cls(a_e=a, b_e=b, c_e=c, u_e=u, v_e=v)


def pi_half_genfun(z: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Return-probability and first-return generating matrices at theta=pi/2.

    R(z) has 0/0 off-diagonals at p = 0 (algebraic limit 0) and u -> 0 as
    z -> 1; Q(z) = I - R(z)^-1 uses the closed-form inverse, which stays
    finite in both corners.
    """
    if not 0.0 <= z < 1.0:
        raise ParameterError("z must lie in [0, 1)")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    sym = PiHalfSymbols.make(z, p)
    a, b, c, u, v = sym.a_e, sym.b_e, sym.c_e, sym.u_e, sym.v_e
    diag = 0.5 * (1.0 / u + 1.0 / v)
    if c == 0.0:
        off = 0.0
    else:
        off = 0.5 * (a / (u * c) - b / (v * c))
    r_mat = np.array([[diag, off], [off, diag]])
    inv_diag = 0.5 * (a * v + b * u)
    inv_off = 0.5 * (c * u - c * v)
    q_mat = np.eye(2) - np.array([[inv_diag, inv_off], [inv_off, inv_diag]])
    return r_mat, q_mat


def pi_half_weighted_return(z: float, p: float) -> float:
    """sum_m q_m z^(m-1) at theta = pi/2 from an R-coin start.

    Column sums of Q(z) give sum_m q_m z^m; dividing by z matches the
    genfun normalization.
    """
    _, q_mat = pi_half_genfun(z, p)
    return float((q_mat[0, 0] + q_mat[1, 0]) / z)


def classical_first_return(m: int) -> float:
    """First-return probability of the balanced RW at step m (0 for odd m)."""
    if m < 2:
        raise ParameterError("m must be >= 2")
    if m % 2:
        return 0.0
    # exact integer ratio, so large m never overflows the float power
    return math.comb(m, m // 2) / ((m - 1) << m)
