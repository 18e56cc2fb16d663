"""Physical parameters, derived constants and bath occupation models.

Everything here is an immutable value type or a pure function; evaluation
is safe from any number of concurrent workers.

Units: natural units hbar = k = m = 1 are the default, but all formulas
carry the constants explicitly, so any consistent unit system works.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, RegimeError

ArrayLike = Union[float, np.ndarray]


class OccupationModel(enum.Enum):
    """Bath energy factor nbar + 1/2 entering the fluctuation integrals.

    EXACT    : (1/2) coth(hbar w / 2kT), the full Bose factor.
    HIGH_T   : kT / (hbar w), drops the zero-point 1/2.
    UNIFORM  : kT / (hbar w) + 1/2, keeps the zero-point term.
    """

    EXACT = "exact"
    HIGH_T = "high_t"
    UNIFORM = "uniform"

    @classmethod
    def from_string(cls, name: str) -> "OccupationModel":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(
                f"unknown occupation model {name!r}; expected one of {valid}"
            ) from None


def coupling_kappa(alpha: float, gamma: float, omega: float) -> float:
    # Isolated on purpose: single place to touch if the shift combination
    # is ever revised.
    return 2.0 * gamma * ((alpha - gamma) ** 2 - omega**2) / alpha**2


def kernel_denominator(alpha: float, gamma: float, omega: float) -> float:
    # Same isolation rationale as coupling_kappa.
    return (alpha - 3.0 * gamma) ** 2 + omega**2


@dataclass(frozen=True)
class PhysicalParams:
    """Oscillator/bath constants.

    m      : oscillator mass
    omega  : oscillator angular frequency (rad/time)
    gamma  : damping rate (1/time)
    alpha  : bath high-frequency cutoff (1/time)
    T      : temperature (energy via k*T)
    hbar   : action quantum
    k      : Boltzmann constant

    Invariants enforced at construction: all fields strictly positive
    except T >= 0; alpha >= 3*gamma (keeps the dissipation radicand
    nonnegative); the coupling combination kappa must come out positive.
    """

    m: float = 1.0
    omega: float = 1.0
    gamma: float = 0.1
    alpha: float = 10.0
    T: float = 100.0
    hbar: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        for name in ("m", "omega", "gamma", "alpha", "hbar", "k"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a finite positive number, got {v!r}")
        if not (isinstance(self.T, (int, float)) and math.isfinite(self.T) and self.T >= 0):
            raise DomainError(f"T must be finite and >= 0, got {self.T!r}")
        if self.alpha < 3.0 * self.gamma:
            raise RegimeError(
                f"alpha >= 3*gamma required (got alpha={self.alpha}, gamma={self.gamma}); "
                "the dissipation radicand is not guaranteed nonnegative otherwise"
            )
        kappa = coupling_kappa(self.alpha, self.gamma, self.omega)
        if kappa <= 0.0:
            raise RegimeError(
                f"kappa = 2*gamma*((alpha-gamma)^2 - omega^2)/alpha^2 = {kappa:g} "
                "must be positive; require omega < alpha - gamma"
            )


@dataclass(frozen=True)
class DerivedConstants:
    """kappa: dimensionless coupling combination; kernel_denom: 1/time^2."""

    kappa: float
    kernel_denom: float


def derived_constants(params: PhysicalParams) -> DerivedConstants:
    """Compute kappa and the kernel denominator, rejecting kappa <= 0."""
    kappa = coupling_kappa(params.alpha, params.gamma, params.omega)
    denom = kernel_denominator(params.alpha, params.gamma, params.omega)
    if kappa <= 0.0:
        raise RegimeError(f"kappa = {kappa:g} must be positive")
    if denom <= 0.0:  # impossible for real inputs; defensive
        raise RegimeError(f"kernel denominator = {denom:g} must be positive")
    return DerivedConstants(kappa=kappa, kernel_denom=denom)


# Below this ratio x = hbar*w/kT the coth form is evaluated by its Laurent
# expansion 1/x + x/12 - x^3/720 (relative accuracy ~1e-12 across the branch).
_COTH_SERIES_CUTOFF = 1e-4


def _exact_factor(x: ArrayLike) -> ArrayLike:
    """(1/2) coth(x/2) for x = hbar*w/kT > 0, elementwise, branch-stable."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _COTH_SERIES_CUTOFF
    xs = x[small]
    out[small] = 1.0 / xs + xs / 12.0 - xs**3 / 720.0
    xl = x[~small]
    out[~small] = 0.5 / np.tanh(0.5 * xl)
    return out


def occupation_factor(
    omega: ArrayLike, model: OccupationModel, params: PhysicalParams
) -> ArrayLike:
    """Bath energy factor nbar + 1/2 at angular frequency omega.

    Accepts a scalar or an array of strictly positive frequencies and
    returns the factor elementwise.  EXACT at T = 0 returns exactly 1/2;
    HIGH_T at T = 0 is rejected (the factor would vanish identically).
    """
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise DomainError("occupation_factor requires finite omega > 0")

    kT = params.k * params.T
    if model is OccupationModel.HIGH_T:
        if kT == 0.0:
            raise DomainError("high_t occupation factor undefined at T = 0")
        out = kT / (params.hbar * w)
    elif model is OccupationModel.UNIFORM:
        if kT == 0.0:
            out = np.full_like(w, 0.5)
        else:
            out = kT / (params.hbar * w) + 0.5
    elif model is OccupationModel.EXACT:
        if kT == 0.0:
            out = np.full_like(w, 0.5)
        else:
            out = _exact_factor(params.hbar * w / kT)
    else:  # pragma: no cover
        raise DomainError(f"unknown model {model!r}")

    return float(out[0]) if scalar else out
