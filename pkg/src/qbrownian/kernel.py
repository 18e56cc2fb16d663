"""Closed-form response kernel A(t), its derivatives and the dissipation
factor R(t).

A(t) is a real combination of three decaying complex exponentials.
Internally it is represented as

    A(t) = Re sum_j w_j exp(lam_j t),

with modes lam in {-(alpha - 2*gamma), -gamma + i*omega, -gamma - i*omega}
and constant complex weights obtained by partial fractions from the
trig/exponential closed form.  The mode representation makes the
derivatives, the inner Fourier integrals (spectral module) and the small-t
cancellations exact, with the identities

    sum w_j = 0,  sum w_j lam_j = 1,  sum w_j lam_j^2 = 0

holding algebraically (the first one exactly in floats by construction).
In particular d2A/dt2 vanishes at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, RegimeError
from .params import PhysicalParams, kernel_denominator
from .stable import phi1, phi2, psi

ArrayLike = Union[float, np.ndarray]

# Negative-radicand tolerance: values of R^2 above -RADICAND_TOL*max(1, dA^2)
# are rounded to zero, anything below is a regime violation.
RADICAND_TOL = 1e-12


@dataclass(frozen=True)
class ModeDecomposition:
    """Modes and weights of A(t) = Re sum w_j exp(lam_j t)."""

    lam: Tuple[complex, complex, complex]
    weights: Tuple[complex, complex, complex]


@lru_cache(maxsize=256)
def mode_decomposition(params: PhysicalParams) -> ModeDecomposition:
    a, g, W = params.alpha, params.gamma, params.omega
    denom = kernel_denominator(a, g, W)
    B = ((a - 2.0 * g) ** 2 + W**2 - g**2) / W
    re_wp = -(g / denom)
    wp = complex(re_wp, -B / (2.0 * denom))
    # w0 = 2*gamma/denom, written so that sum(weights) == 0 exactly in floats
    w0 = -2.0 * re_wp
    lam = (complex(-(a - 2.0 * g), 0.0), complex(-g, W), complex(-g, -W))
    return ModeDecomposition(lam=lam, weights=(complex(w0, 0.0), wp, wp.conjugate()))


@dataclass(frozen=True)
class KernelValue:
    """Kernel data at one time.

    A is dimensionless, dA has units 1/time, d2A 1/time^2; R2 and
    one_minus_R2 are dimensionless with one_minus_R2 computed
    cancellation-free (it is O(t^3) at small t).
    """

    t: float
    A: float
    dA: float
    d2A: float
    R2: float
    one_minus_R2: float


def _check_time(t: np.ndarray):
    if not np.all(np.isfinite(t)) or np.any(t < 0.0):
        raise DomainError("time must be finite and >= 0")


def kernel_derivatives(t: ArrayLike, params: PhysicalParams):
    """(A, dA/dt, d2A/dt2) at time(s) t, all by exact mode sums.

    Naive mode sums cancel to O(t) for A and to O(t) around zero for d2A,
    so both are assembled with their algebraically-zero heads removed:

        A    = t Re sum w lam phi1(lam t)        (uses sum w = 0)
        d2A  = t Re(sum w lam^3)
               + t^2 Re sum w lam^4 psi(lam t)   (uses sum w lam^2 = 0)

    which keeps the relative error at the eps level down to t = 0.  dA has
    an O(1) limit and needs no rearrangement.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    _check_time(t_arr)
    modes = mode_decomposition(params)
    w = np.asarray(modes.weights)
    lam = np.asarray(modes.lam)
    x = lam[:, None] * t_arr[None, :]
    A = t_arr * np.einsum("j,jn->n", w * lam, phi1(x)).real
    dA = np.einsum("j,jn->n", w * lam, np.exp(x)).real
    s3 = np.sum(w * lam**3).real
    d2A = t_arr * (s3 + t_arr * np.einsum("j,jn->n", w * lam**4, psi(x)).real)
    if scalar:
        return float(A[0]), float(dA[0]), float(d2A[0])
    return A, dA, d2A


def kernel_A(t: ArrayLike, params: PhysicalParams) -> ArrayLike:
    """The response kernel A(t)."""
    return kernel_derivatives(t, params)[0]


def dissipation_R2(t: ArrayLike, params: PhysicalParams):
    """(R^2, 1 - R^2) with R^2 = (dA/dt)^2 - A d2A/dt2.

    1 - R^2 is evaluated as the pair sum

        (1/2) sum_{j != k} w_j w_k (lam_j - lam_k)^2 phi2((lam_j + lam_k) t)

    whose O(1), O(t), O(t^2) pieces cancel algebraically, so the O(t^3)
    signal survives at any t.  Past one_minus_R2 = 1/2 the roles swap:
    R^2 comes from the pure exponential pair sum and one_minus_R2 from
    1 - R^2, which keeps both factors relatively accurate on their own
    scale at every t.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    _check_time(t_arr)

    modes = mode_decomposition(params)
    w0, wp, _ = modes.weights
    lam0, lamp, _ = modes.lam
    gamma = params.gamma

    c0p = w0 * wp * (lam0 - lamp) ** 2
    z0p = lam0 + lamp
    cpm = -4.0 * params.omega**2 * abs(wp) ** 2

    one_minus_pair = (
        2.0 * (c0p * phi2(z0p * t_arr)).real + cpm * phi2(-2.0 * gamma * t_arr).real
    )
    r2_direct = -(
        2.0 * (c0p * np.exp(z0p * t_arr)).real + cpm * np.exp(-2.0 * gamma * t_arr)
    )
    # below the midpoint the pair sum carries the O(t^3) signal; above it
    # the pure exponential sum is the accurate one (the pair sum's
    # cancelled polynomial heads leave eps*t^2-scale float residue that
    # would push one_minus past 1 at large t)
    large = one_minus_pair >= 0.5
    r2 = np.where(large, r2_direct, 1.0 - one_minus_pair)
    one_minus = np.where(large, 1.0 - r2_direct, one_minus_pair)

    _, dA, _ = kernel_derivatives(t_arr, params)
    tol = RADICAND_TOL * np.maximum(1.0, dA**2)
    if np.any(r2 < -tol):
        i = int(np.argmin(r2 + tol))
        raise RegimeError(
            f"negative dissipation radicand R^2 = {r2[i]:g} at t = {t_arr[i]:g}; "
            "outside the alpha >= 3*gamma regime guarantees"
        )
    r2 = np.where(r2 < 0.0, 0.0, r2)
    if np.any(one_minus < -tol):
        i = int(np.argmin(one_minus + tol))
        raise RegimeError(f"R^2 = {1 - one_minus[i]:g} > 1 at t = {t_arr[i]:g}")
    one_minus = np.where(one_minus < 0.0, 0.0, one_minus)

    if scalar:
        return float(r2[0]), float(one_minus[0])
    return r2, one_minus


def kernel_value(t: float, params: PhysicalParams) -> KernelValue:
    """Bundle A, dA, d2A, R^2 and 1 - R^2 at a single time."""
    A, dA, d2A = kernel_derivatives(t, params)
    r2, one_minus = dissipation_R2(t, params)
    return KernelValue(t=float(t), A=A, dA=dA, d2A=d2A, R2=r2, one_minus_R2=one_minus)
