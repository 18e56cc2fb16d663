"""Gaussian second-moment bookkeeping for the dissipative map.

Everything lives in the interaction frame in which the initial state's
moments are taken directly (the explicit unitary dressing never needs to
be constructed).  The map is parametrized by (a, b, c, r^2), obtained from
the fluctuation coefficients by the association

    a = Y,  b = X,  c = Xdot,  r^2 = 1 - R^2,

and acts affinely on the second moments:

    <q^2>     -> (1 - r^2) <q^2>_V  + b/m
    <p^2>     -> (1 - r^2) <p^2>_V  + m a
    <qp + pq> -> (1 - r^2) <qp+pq>_V + c

The quadratic form

    I(lambda, beta) = Tr[(q + (beta + i lambda) p) rho (q + (beta - i lambda) p)]

is the non-positivity witness: a negative value at real (lambda, beta)
certifies that rho is not a positive operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FactorizationError, RegimeError
from .params import PhysicalParams
from .spectral import CoefficientSet

# relative slack for "is this state physical / is 4ab - c^2 nonnegative"
# decisions; absorbs roundoff only, not modeling error
_EDGE_RTOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    """Second moments (and means) of a single-mode Gaussian state.

    cqp_sym is the symmetrized centered cross moment <qp + pq>/2.
    """

    mean_q: float
    mean_p: float
    cqq: float
    cpp: float
    cqp_sym: float

    def __post_init__(self):
        vals = (self.mean_q, self.mean_p, self.cqq, self.cpp, self.cqp_sym)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite state moments: {vals}")
        if self.cqq <= 0.0 or self.cpp <= 0.0:
            raise DomainError(
                f"diagonal moments must be positive, got cqq={self.cqq}, cpp={self.cpp}"
            )

    @property
    def qp_plus_pq(self) -> float:
        """The full anticommutator expectation <qp + pq>."""
        return 2.0 * self.cqp_sym

    def covariance_det(self) -> float:
        return self.cqq * self.cpp - self.cqp_sym**2

    def purity_defect(self, hbar: float) -> float:
        """cov determinant minus hbar^2/4; zero for a pure state."""
        return self.covariance_det() - 0.25 * hbar**2

    def is_physical(self, hbar: float, rtol: float = _EDGE_RTOL) -> bool:
        return self.covariance_det() >= 0.25 * hbar**2 * (1.0 - rtol)


@dataclass(frozen=True)
class MapParams:
    """(a, b, c, r2) of the second-moment map."""

    a: float
    b: float
    c: float
    r2: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.r2)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite map parameters: {vals}")
        if not 0.0 <= self.r2 < 1.0:
            raise RegimeError(f"r^2 must lie in [0, 1), got {self.r2}")


@dataclass(frozen=True)
class EvolvedMoments:
    q2: float
    p2: float
    qp_sym: float  # the full <qp + pq> at t
    abcr: MapParams


def associate_theorem_params(coeffs: CoefficientSet, params: PhysicalParams) -> MapParams:
    """Map the fluctuation coefficients onto (a, b, c, r^2)."""
    return MapParams(a=coeffs.Y, b=coeffs.X, c=coeffs.Xdot, r2=coeffs.one_minus_R2)


def _pqg(state_V: GaussianState, abcr: MapParams, m: float):
    """The three propagated moments (P, Q, G) = (<p^2>, <q^2>, <qp+pq>) at t."""
    one = 1.0 - abcr.r2
    P = one * state_V.cpp + m * abcr.a
    Q = one * state_V.cqq + abcr.b / m
    G = one * state_V.qp_plus_pq + abcr.c
    return P, Q, G


def propagate_moments(
    state_V: GaussianState, abcr: MapParams, m: float, hbar: float
) -> EvolvedMoments:
    """Second moments after the map; requires 4ab - c^2 >= 0 (the map only
    factorizes into dissipation and fluctuation parts under that condition)."""
    if m <= 0.0 or not math.isfinite(m):
        raise DomainError(f"mass must be positive, got {m}")
    if not state_V.is_physical(hbar):
        raise DomainError(
            f"initial state violates the uncertainty bound: det={state_V.covariance_det()} "
            f"< hbar^2/4 = {0.25 * hbar**2}"
        )
    fluct = 4.0 * abcr.a * abcr.b - abcr.c**2
    if fluct < -_EDGE_RTOL * (4.0 * abcr.a * abcr.b + abcr.c**2):
        raise FactorizationError(
            f"4ab - c^2 = {fluct} < 0: the propagator does not factor into "
            "dissipation and fluctuation parts"
        )
    P, Q, G = _pqg(state_V, abcr, m)
    return EvolvedMoments(q2=Q, p2=P, qp_sym=G, abcr=abcr)


def quadratic_form_I(
    lam: float,
    beta: float,
    state_V: GaussianState,
    abcr: MapParams,
    m: float,
    hbar: float,
) -> float:
    """The witness form I(lambda, beta) evaluated literally."""
    if not (math.isfinite(lam) and math.isfinite(beta)):
        raise DomainError(f"witness parameters must be finite, got {lam}, {beta}")
    P, Q, G = _pqg(state_V, abcr, m)
    return P * beta**2 + G * beta + lam**2 * P + Q - hbar * lam
