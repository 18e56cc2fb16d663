"""Positivity and uncertainty diagnostics for the evolved Gaussian state.

Two complementary instruments:

* theorem_check: six inequalities on the initial pure state and the map
  parameters (a, b, c, r^2).  When all six hold, the evolved operator has a
  negative expectation value on an explicit coherent-family vector, produced
  by witness().  The condition fields follow the interface labels cond9,
  cond10, cond11, cond12, cond13 and cond14.

* corollary_check: nonnegativity of the time-local generator coefficients
  (sigma, eta, xi, zeta).  When they pass, the generator is of Lindblad
  form and positivity of the evolution is guaranteed; lindblad_decompose
  produces the jump-operator coefficients.

The two verdicts are mutually exclusive on shared inputs: the corollary
passing implies eta*xi - |zeta|^2 >= 0, while a firing theorem requires
4ab - c^2 - hbar^2 r^4 < 0, and those quantities coincide up to a factor 4.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    DomainError,
    InternalConsistencyError,
    NotDecomposableError,
    ScopeError,
)
from .gaussian import GaussianState, MapParams, _pqg, quadratic_form_I
from .spectral import CoefficientSet

# relative tolerance of the purity equality (cond11); absorbs roundoff in
# states constructed to be pure, nothing more
PURITY_RTOL = 1e-10

# slack for boundary cases (b = 0 makes s_minus = 0 exactly)
_EDGE_RTOL = 1e-10

_TINY = 1e-300


@dataclass(frozen=True)
class ConditionMargin:
    """One inequality: passed iff margin >= 0; margin is in units of scale."""

    passed: bool
    value: float
    threshold: float
    margin: float
    scale: float


@dataclass(frozen=True)
class TheoremReport:
    t: float
    d1: float
    cond9: ConditionMargin
    cond10: ConditionMargin
    cond11: ConditionMargin
    cond12: ConditionMargin
    cond13: ConditionMargin
    cond14: ConditionMargin
    s_minus: float
    s_plus: float
    w: float
    lam: float
    beta_bar: float
    I_value: float
    I_value_direct: float
    root_residual: float
    root_residual_scale: float
    w_from_lambda: float
    gap31: float
    uncertainty_lhs: float
    uncertainty_rhs: float
    b_zero_edge: bool

    @property
    def passed(self) -> bool:
        return all(
            c.passed
            for c in (self.cond9, self.cond10, self.cond11, self.cond12, self.cond13, self.cond14)
        )


class UncertaintyVerdict(NamedTuple):
    lhs: float
    rhs: float
    violated: bool


@dataclass(frozen=True)
class CorollaryReport:
    t: float
    sigma: float
    eta: float
    xi: float
    zeta: complex
    margin_sigma: ConditionMargin
    margin_eta: ConditionMargin
    margin_xi: ConditionMargin
    margin_gap: ConditionMargin
    passes: bool
    decomposition: tuple


def _margin(value, threshold, scale, passed=None) -> ConditionMargin:
    scale = max(scale, _TINY)
    margin = (value - threshold) / scale
    if passed is None:
        passed = bool(margin >= 0.0) and math.isfinite(margin)
    return ConditionMargin(
        passed=bool(passed), value=float(value), threshold=float(threshold),
        margin=float(margin), scale=float(scale),
    )


def _propagated_core(state_V: GaussianState, abcr: MapParams, m: float, hbar: float):
    """Propagated moments plus the regrouped w and the positivity gap.

    No theorem scope gates here: the uncertainty comparison is meaningful
    for any map, including the identity (a = b = c = r^2 = 0).  w uses the
    purity-reduced regrouping of the direct expression, which is
    algebraically identical whenever cond11 holds and does not lose the
    hbar^2-sized cancellation the direct form suffers at small times.
    """
    if m <= 0.0 or not math.isfinite(m):
        raise DomainError(f"mass must be positive, got {m}")
    if not state_V.is_physical(hbar):
        raise DomainError("initial state violates the uncertainty bound")

    a, b, c, r2 = abcr.a, abcr.b, abcr.c, abcr.r2
    g = state_V.qp_plus_pq
    q2 = state_V.cqq
    p2 = state_V.cpp
    one = 1.0 - r2

    v10 = hbar**2 * r2 + c * g

    P, Q, G = _pqg(state_V, abcr, m)

    # fluctuation determinant and the positivity gap, grouped so the only
    # cancellation is the physically meaningful one
    fluct = 4.0 * a * b - c * c
    gap31 = fluct - hbar**2 * r2 * r2

    # regrouped left side of the key inequality; equals
    # hbar^2 - 4PQ + 4K for a pure initial state
    w = 2.0 * one * (v10 - 2.0 * m * a * q2 - 2.0 * (b / m) * p2)

    return {
        "a": a, "b": b, "c": c, "r2": r2, "one": one, "g": g,
        "q2": q2, "p2": p2, "v10": v10,
        "P": P, "Q": Q, "G": G,
        "fluct": fluct, "gap31": gap31, "w": w,
    }


def _theorem_core(state_V: GaussianState, abcr: MapParams, m: float, hbar: float):
    """Shared numbers for theorem_check and witness."""
    if abcr.a <= 0.0:
        raise ScopeError(f"theorem requires a > 0, got a={abcr.a}")
    if abcr.b < 0.0:
        raise ScopeError(f"theorem requires b >= 0, got b={abcr.b}")
    k = _propagated_core(state_V, abcr, m, hbar)
    a, b = k["a"], k["b"]
    c, r2 = k["c"], k["r2"]
    g, v10 = k["g"], k["v10"]
    P, G, w = k["P"], k["G"], k["w"]
    gap31 = k["gap31"]

    # d1 = (1/4) v10^2 - ab (hbar^2 + g^2), regrouped exactly so the large
    # (cg)^2-sized products meet inside fluct = 4ab - c^2 and 2 r2 g - c
    # rather than cancelling between the two top-level terms
    hbar2 = hbar**2
    d1 = 0.25 * (
        hbar2 * hbar2 * r2 * r2
        + hbar2 * c * (2.0 * r2 * g - c)
        - (hbar2 + g**2) * k["fluct"]
    )

    if d1 >= 0.0:
        root = math.sqrt(d1)
        s_minus = (0.5 * v10 - root) / (2.0 * m * a)
        s_plus = (0.5 * v10 + root) / (2.0 * m * a)
    else:
        s_minus = math.nan
        s_plus = math.nan

    if w >= 0.0:
        lam = (hbar + math.sqrt(w)) / (2.0 * P)
    else:
        lam = math.nan
    beta_bar = -G / (2.0 * P)
    # vertex value of the witness form; exact algebra gives gap31 / (4P),
    # which stays resolvable long after the literal sum has cancelled away
    I_value = gap31 / (4.0 * P)

    k.update(
        d1=d1, s_minus=s_minus, s_plus=s_plus,
        lam=lam, beta_bar=beta_bar, I_value=I_value,
    )
    return k


def theorem_check(
    state_V: GaussianState,
    abcr: MapParams,
    m: float,
    hbar: float,
    t: float = math.nan,
) -> TheoremReport:
    """Evaluate all six conditions with margins; never raises on a mere
    failure (only on out-of-scope inputs)."""
    k = _theorem_core(state_V, abcr, m, hbar)
    a, b, c, r2 = k["a"], k["b"], k["c"], k["r2"]
    g, q2, p2 = k["g"], k["q2"], k["p2"]
    v10, d1 = k["v10"], k["d1"]
    hbar2 = hbar**2

    scale9 = 0.25 * (
        hbar2 * hbar2 * r2 * r2
        + hbar2 * abs(c) * (2.0 * r2 * abs(g) + abs(c))
        + (hbar2 + g**2) * abs(k["fluct"])
    )
    cond9 = _margin(d1, 0.0, scale9)

    cond10 = _margin(v10, 0.0, hbar2 * r2 + abs(c * g))

    purity_scale = max(q2 * p2, 0.25 * (g**2 + hbar2))
    purity_dev = abs(q2 * p2 - 0.25 * (g**2 + hbar2)) / purity_scale
    cond11 = _margin(PURITY_RTOL - purity_dev, 0.0, 1.0,
                     passed=purity_dev <= PURITY_RTOL)

    s_minus, s_plus = k["s_minus"], k["s_plus"]
    if math.isfinite(s_minus):
        root_scale = max(abs(s_plus), abs(s_minus), _TINY)
        sep = s_plus - s_minus
        v13 = min(sep, s_minus + _EDGE_RTOL * root_scale, s_plus)
        cond13 = _margin(v13, 0.0, root_scale, passed=(d1 > 0.0) and v13 >= 0.0)
        b_zero_edge = abs(s_minus) <= _EDGE_RTOL * root_scale
        v12 = min(q2 - s_minus, s_plus - q2)
        cond12 = _margin(v12, 0.0, max(sep, _TINY), passed=v12 > 0.0)
    else:
        cond13 = ConditionMargin(False, d1, 0.0, math.nan, 1.0)
        cond12 = ConditionMargin(False, math.nan, 0.0, math.nan, 1.0)
        b_zero_edge = False

    fluct, gap31 = k["fluct"], k["gap31"]
    rhs14 = hbar2 * r2 * r2
    scale14 = max(rhs14, abs(fluct))
    left_slack = _EDGE_RTOL * (4.0 * a * b + c * c)
    v14 = min(rhs14 - fluct, fluct + left_slack)
    cond14 = _margin(
        v14, 0.0, scale14,
        passed=(fluct >= -left_slack) and (fluct < rhs14),
    )

    P, Q, G = k["P"], k["Q"], k["G"]
    w, lam, beta_bar = k["w"], k["lam"], k["beta_bar"]

    one = k["one"]
    K = a * b - 0.25 * hbar2 * r2 * r2 + 0.25 * one**2 * g**2 + 0.5 * one * c * g
    if math.isfinite(lam):
        terms = (P * lam**2, -hbar * lam, Q, -K / P)
        root_residual = math.fsum(terms)
        root_residual_scale = sum(abs(v) for v in terms)
        w_from_lambda = (2.0 * P * lam - hbar) ** 2
        I_direct = quadratic_form_I(lam, beta_bar, state_V, abcr, m, hbar)
    else:
        root_residual = math.nan
        root_residual_scale = math.nan
        w_from_lambda = math.nan
        I_direct = math.nan

    # uncertainty product against the w-shifted bound; lhs - rhs = gap31 / 4
    unc_lhs = Q * P
    unc_rhs = 0.25 * (G**2 + hbar2 - w)

    return TheoremReport(
        t=float(t), d1=d1,
        cond9=cond9, cond10=cond10, cond11=cond11,
        cond12=cond12, cond13=cond13, cond14=cond14,
        s_minus=s_minus, s_plus=s_plus,
        w=w, lam=lam, beta_bar=beta_bar,
        I_value=k["I_value"], I_value_direct=I_direct,
        root_residual=root_residual, root_residual_scale=root_residual_scale,
        w_from_lambda=w_from_lambda, gap31=gap31,
        uncertainty_lhs=unc_lhs, uncertainty_rhs=unc_rhs,
        b_zero_edge=b_zero_edge,
    )


def witness(
    state_V: GaussianState, abcr: MapParams, m: float, hbar: float
) -> tuple[float, float, float]:
    """(lambda, beta, I) with I < 0, assuming theorem_check has passed.

    Raises InternalConsistencyError if the promised negativity is absent,
    since that means the caller skipped the check or the check is broken.
    """
    k = _theorem_core(state_V, abcr, m, hbar)
    if k["w"] < 0.0:
        raise InternalConsistencyError(
            f"witness called with w = {k['w']} < 0; theorem_check should have failed"
        )
    if not (k["I_value"] < 0.0):
        raise InternalConsistencyError(
            f"witness form is nonnegative at its vertex: I = {k['I_value']}"
        )
    return k["lam"], k["beta_bar"], k["I_value"]


def uncertainty_violation(
    state_V: GaussianState, abcr: MapParams, m: float, hbar: float
) -> UncertaintyVerdict:
    """Evolved uncertainty product against the state-dependent bound.

    violated is True only when the product undercuts both the w-shifted
    bound and the stronger (<qp+pq>^2 + hbar^2)/4 one.  Decisions use the
    algebraic differences (gap31/4 and (gap31 - w)/4) so tiny violations
    survive the evaluation.
    """
    if state_V.mean_q != 0.0 or state_V.mean_p != 0.0:
        raise ScopeError(
            "uncertainty comparison is stated for centered states; "
            f"got means ({state_V.mean_q}, {state_V.mean_p})"
        )
    k = _propagated_core(state_V, abcr, m, hbar)
    P, Q, G = k["P"], k["Q"], k["G"]
    w, gap31 = k["w"], k["gap31"]
    lhs = Q * P
    rhs = 0.25 * (G**2 + hbar**2 - w)
    violated = (gap31 < 0.0) and (gap31 - w < 0.0)
    return UncertaintyVerdict(lhs=lhs, rhs=rhs, violated=bool(violated))


def associate_corollary_params(
    coeffs: CoefficientSet, m: float, hbar: float
) -> tuple[float, float, float, complex]:
    """Time-local generator coefficients (sigma, eta, xi, zeta)."""
    if m <= 0.0 or not math.isfinite(m):
        raise DomainError(f"mass must be positive, got {m}")
    r2sq = coeffs.R2
    y = coeffs.one_minus_R2
    if r2sq <= 0.0:
        raise DomainError(
            f"R^2 = {r2sq} <= 0: the log-rate is undefined (kernel has a zero)"
        )
    if y > 1e-8:
        sigma = -math.log1p(-y) / (2.0 * hbar**2 * y)
    else:
        # series of -ln(1-y)/y, keeps sigma smooth through y -> 0
        sigma = (1.0 + y * (0.5 + y / 3.0)) / (2.0 * hbar**2)
    eta = m * coeffs.Y
    xi = coeffs.X / m
    zeta = -0.5 * complex(coeffs.Xdot, hbar * y)
    return sigma, eta, xi, zeta


def lindblad_decompose(
    eta: float, xi: float, zeta: complex, tol: float = 1e-12
) -> tuple[tuple[complex, complex], ...]:
    """Factor the coefficient matrix [[eta, zeta], [conj(zeta), xi]] into
    at most two jump-coefficient pairs (a_n, b_n) with

        sum |a_n|^2 = eta,  sum |b_n|^2 = xi,  sum conj(a_n) b_n = zeta.
    """
    vals = (eta, xi, abs(zeta))
    if not all(math.isfinite(v) for v in vals):
        raise DomainError(f"non-finite generator coefficients: {vals}")
    trace = eta + xi
    floor = tol * max(trace, _TINY)
    if eta < -floor or xi < -floor:
        raise NotDecomposableError(
            f"negative diagonal coefficient: eta={eta}, xi={xi}"
        )
    det = eta * xi - abs(zeta) ** 2
    if det < -tol * max(eta * xi, abs(zeta) ** 2, _TINY):
        raise NotDecomposableError(
            f"coefficient matrix is not positive semidefinite: "
            f"eta*xi - |zeta|^2 = {det}"
        )

    eta_c = max(eta, 0.0)
    xi_c = max(xi, 0.0)
    if eta_c <= floor and xi_c <= floor:
        if abs(zeta) > floor:
            raise NotDecomposableError(
                f"zero diagonal but zeta = {zeta} != 0"
            )
        return ()

    # factor from the larger diagonal entry for stability; the second pair
    # is dropped only when the Schur complement sits inside its own rounding
    # noise (comparing against the trace would silently zero out a small but
    # genuine second diagonal)
    pairs = []
    if eta_c >= xi_c:
        small, cross = xi_c, abs(zeta) ** 2 / eta_c
        u1 = (math.sqrt(eta_c), zeta.conjugate() / math.sqrt(eta_c))
        schur = small - cross
        u2 = (0.0 + 0.0j, math.sqrt(max(schur, 0.0)))
    else:
        small, cross = eta_c, abs(zeta) ** 2 / xi_c
        u1 = (zeta / math.sqrt(xi_c), math.sqrt(xi_c))
        schur = small - cross
        u2 = (math.sqrt(max(schur, 0.0)), 0.0 + 0.0j)
    pairs.append(u1)
    noise = 4.0 * sys.float_info.epsilon * max(small, cross)
    if schur > noise:
        pairs.append(u2)

    return tuple(
        (complex(u[0]).conjugate(), complex(u[1]).conjugate()) for u in pairs
    )


def corollary_check(
    sigma: float,
    eta: float,
    xi: float,
    zeta: complex,
    t: float = math.nan,
    tol: float = 1e-12,
) -> CorollaryReport:
    """Nonnegativity of the generator coefficients, with margins."""
    m_sigma = _margin(sigma, 0.0, abs(sigma))
    m_eta = _margin(eta, 0.0, abs(eta) + abs(xi))
    m_xi = _margin(xi, 0.0, abs(eta) + abs(xi))
    det = eta * xi - abs(zeta) ** 2
    m_gap = _margin(det, 0.0, max(eta * xi, abs(zeta) ** 2))

    passes = all(m.margin >= -tol for m in (m_sigma, m_eta, m_xi, m_gap))
    decomposition: tuple = ()
    if passes:
        decomposition = lindblad_decompose(eta, xi, zeta, tol=max(tol, 1e-12))

    return CorollaryReport(
        t=float(t), sigma=sigma, eta=eta, xi=xi, zeta=zeta,
        margin_sigma=m_sigma, margin_eta=m_eta, margin_xi=m_xi,
        margin_gap=m_gap, passes=bool(passes), decomposition=decomposition,
    )
