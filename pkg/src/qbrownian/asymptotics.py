"""Closed-form small-time leading behavior of the fluctuation coefficients.

Two regimes:

* high-temperature occupation: every coefficient is linear in kT and a pure
  power of t; the positivity gap is strictly negative, gap31 = -(hbar
  alpha^2 t^3 kappa / 6)^2, no matter how large T is.

* uniform (zero-point corrected) occupation: the same powers of t pick up
  a (const - ln alpha t) factor and the gap turns positive for small t.

Validation against the numerical coefficients is ratio-based: remainders
are o(leading), so the honest test is convergence of ratios toward 1 on a
shrinking grid, plus fitted log-log exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError
from .params import OccupationModel, PhysicalParams, coupling_kappa
from .spectral import CoefficientSet

EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class AsymptoticSet:
    t: float
    model: OccupationModel
    X_lead: float
    Xdot_lead: float
    Y_lead: float
    one_minus_R2_lead: float
    gap31_lead: float


def _check_t(t: float):
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"leading forms need t > 0, got {t}")


def hight_leading(t: float, params: PhysicalParams) -> AsymptoticSet:
    """Leading small-t coefficients under the high-temperature occupation.

    Caller owns the validity regime (alpha*t small); nothing is checked
    beyond t > 0.
    """
    _check_t(t)
    kT = params.k * params.T
    al = params.alpha
    kap = coupling_kappa(al, params.gamma, params.omega)
    lead_common = kT * kap * al
    r2_lead = al**2 * t**3 * kap / 6.0
    return AsymptoticSet(
        t=t,
        model=OccupationModel.HIGH_T,
        X_lead=lead_common * t**4 / 4.0,
        Xdot_lead=lead_common * t**3,
        Y_lead=lead_common * t**2,
        one_minus_R2_lead=r2_lead,
        # 4 X Y - Xdot^2 cancels identically at leading order, so the gap
        # is minus the squared dissipation term
        gap31_lead=-((params.hbar * r2_lead) ** 2),
    )


def uniform_leading(t: float, params: PhysicalParams) -> AsymptoticSet:
    """Leading small-t coefficients with bath zero-point energies included.

    Each high-temperature power of t acquires a logarithmic factor.  Valid
    only for alpha*t < 1 (the logarithms must be positive decaying).
    """
    _check_t(t)
    al = params.alpha
    if al * t >= 1.0:
        raise RegimeError(f"uniform leading forms need alpha*t < 1, got {al * t}")
    kap = coupling_kappa(al, params.gamma, params.omega)
    hbar = params.hbar
    kT = params.k * params.T
    base = kap * al**2 * hbar / math.pi
    thermal = math.pi * kT / (hbar * al)
    log_t = math.log(al * t)
    L_x = thermal + 1.75 - EULER_GAMMA - log_t
    L_y = thermal + 1.5 - EULER_GAMMA - log_t
    r2_lead = al**2 * t**3 * kap / 6.0
    # plugging the leading terms into 4XY - Xdot^2 - hbar^2 (1-R^2)^2 and
    # factoring: L_x - L_y = 1/4 exactly
    gap_lead = (hbar * kap * al**2 * t**3) ** 2 * (L_y / (4.0 * math.pi**2) - 1.0 / 36.0)
    return AsymptoticSet(
        t=t,
        model=OccupationModel.UNIFORM,
        X_lead=0.25 * base * L_x * t**4,
        Xdot_lead=base * L_y * t**3,
        Y_lead=base * L_y * t**2,
        one_minus_R2_lead=r2_lead,
        gap31_lead=gap_lead,
    )


def gap31(coeffs: CoefficientSet, hbar: float) -> float:
    """4XY - Xdot^2 - hbar^2 (1-R^2)^2, the sign of which decides between
    the non-positivity theorem and the Lindblad corollary.

    Uses the spectrally assembled value of 4XY - Xdot^2 (cs_gap), which is
    built from a Gram-matrix factorization and survives the cancellation
    that the literal products lose at small t.
    """
    return coeffs.cs_gap - (hbar * coeffs.one_minus_R2) ** 2


def leading_set(t: float, model: OccupationModel, params: PhysicalParams) -> AsymptoticSet:
    if model is OccupationModel.HIGH_T:
        return hight_leading(t, params)
    if model is OccupationModel.UNIFORM:
        return uniform_leading(t, params)
    raise DomainError(f"no closed leading forms for model '{model.value}'")


def fit_loglog_exponent(ts, values) -> tuple[float, float]:
    """(exponent, prefactor) of values ~ prefactor * t^exponent by
    least-squares in log-log coordinates; values must be one-signed."""
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(values, dtype=float)
    if ts.size < 2:
        raise DomainError("need at least two points to fit an exponent")
    if np.any(ts <= 0.0) or np.any(vals == 0.0):
        raise DomainError("log-log fit needs positive t and nonzero values")
    sign = np.sign(vals[0])
    if np.any(np.sign(vals) != sign):
        raise DomainError("log-log fit needs one-signed values")
    slope, intercept = np.polyfit(np.log(ts), np.log(np.abs(vals)), 1)
    return float(slope), float(sign * np.exp(intercept))


def fit_log_leading(ts, values, power: int, alpha: float) -> tuple[float, float]:
    """Fit values ~ B * (C - ln(alpha t)) * t^power; returns (B, C).

    Used to read the logarithm's coefficient and the additive constant off
    the uniform-model data.
    """
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(values, dtype=float)
    if ts.size < 2:
        raise DomainError("need at least two points to fit the log form")
    y = vals / ts**power
    x = np.log(alpha * ts)
    design = np.column_stack([np.ones_like(x), x])
    (c0, c1), *_ = np.linalg.lstsq(design, y, rcond=None)
    B = -float(c1)
    # a pure power law fits c1 ~ rounding noise; C = c0/B would be garbage
    scale = max(abs(float(c0)), float(np.max(np.abs(y))))
    if abs(B) <= 1e-12 * scale:
        raise DomainError("fitted logarithm coefficient is negligible; "
                          "the data carries no log factor at this power")
    return B, float(c0) / B
