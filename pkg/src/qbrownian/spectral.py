"""Fluctuation coefficients X(t), Xdot(t), Y(t) of the damped-oscillator
quantum Brownian equation.

Each coefficient is a frequency integral

    (2 kappa alpha^2 hbar / pi) * int_0^inf dw [w/(alpha^2+w^2)]
        * |inner Fourier transform|^2 * occupation(w)

where the inner time integral over [0, t] is known in closed form from the
three-mode representation of the kernel A(t).  Only the outer frequency
integral is numerical:

* the bulk [0, M] goes through the shared panel-adaptive GL15/7 engine,
  with initial panel edges matched to the physical scales and an
  oscillation cap (panel width <= pi/(4 t) above w = 1/t);
* the tail [M, inf) is split into a smooth part (the modulus terms of
  |F|^2, integrated exactly as a value via the substitution w = M/u) and
  an oscillatory part (the e^{iwt} cross terms, bounded by integration by
  parts and charged to the error estimate, never to the value);
* M starts at max(50 alpha, 50/t) and doubles until the oscillatory bound
  fits inside the error budget.

Xdot uses differentiation under the integral sign (2 Re[conj(F) e^{iwt}
A(t)] in place of |F|^2), never finite differences of X.

The set also carries the Cauchy-Schwarz gap 4XY - Xdot^2.  The three
coefficients share one discrete measure, so the gap of the discretized
integrals is the Gram determinant of two vectors and is evaluated through
singular values, which keeps it exactly nonnegative even when it sits ten
orders of magnitude below 4XY.  Because the row budgets say nothing about
a quantity that small, the gap drives its own refinement: the Gram panels
are halved, the tail budgets tightened, and the tail start pushed out
until the combined error fits rel_tol relative to the gap itself (or its
resolution floor), with whatever is achieved reported honestly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationError, InternalConsistencyError
from .kernel import kernel_derivatives, dissipation_R2, mode_decomposition
from .params import OccupationModel, PhysicalParams, derived_constants, occupation_factor
from .quadrature import COARSE_ORDER, FINE_ORDER, adaptive_rows, panel_nodes, split_edges
from .stable import phi1, phi1_diff

TAIL_START_FACTOR = 50.0  # M0 = max(50 alpha, 50 / t)
MAX_TAIL_DOUBLINGS = 8
_BULK_SHARE, _TAIL_SHARE = 0.75, 0.125  # of the total error budget per row

# The gap 4XY - Xdot^2 can sit many orders below the row scales, so its
# error is driven to rel_tol relative to the gap itself, not to the rows:
# panel halvings for the Gram truncation (GL7 error falls ~2^14 per round),
# tighter tail budgets for the cross terms, and a larger tail start for the
# oscillatory bound (which falls at least ~2^8 per quadrupling of M).
_CS_MAX_HALVINGS = 6
_CS_M_GROWTH = 3
_CS_TAIL_MAX_PANELS = 4096


@dataclass(frozen=True)
class InnerFourier:
    """Closed-form inner Fourier integrals at one (omega, t).

    F    = int_0^t e^{i w t'} A(t') dt'
    F_dA = int_0^t e^{i w t'} (dA/dt') dt'  =  e^{i w t} A(t) - i w F
    """

    omega: float
    t: float
    F: complex
    F_dA: complex


@dataclass(frozen=True)
class CoefficientSet:
    """The three fluctuation coefficients at one time, with diagnostics.

    cs_gap estimates 4*X*Y - Xdot^2; err_* are absolute error estimates
    of the outer quadrature (bulk + tail), all in the same units as the
    values themselves.
    """

    t: float
    X: float
    Xdot: float
    Y: float
    R2: float
    one_minus_R2: float
    model: OccupationModel
    err_X: float
    err_Xdot: float
    err_Y: float
    cs_gap: float
    err_cs_gap: float


def fluctuation_prefactor(params: PhysicalParams) -> float:
    """The constant 2*kappa*alpha^2*hbar/pi multiplying all three outer
    integrals."""
    dc = derived_constants(params)
    return 2.0 * dc.kappa * params.alpha**2 * params.hbar / math.pi


def spectral_weight(omega, model: OccupationModel, params: PhysicalParams):
    """w/(alpha^2+w^2) times the occupation factor, finite at w = 0.

    The w -> 0 limit equals kT/(hbar*alpha^2) for every model (the 1/w of
    the thermal factor cancels against the explicit w).
    """
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    out = np.empty_like(om)
    zero = om == 0.0
    if np.any(~zero):
        omp = om[~zero]
        out[~zero] = (
            omp / (params.alpha**2 + omp**2) * occupation_factor(omp, model, params)
        )
    out[zero] = params.k * params.T / (params.hbar * params.alpha**2)
    return float(out[0]) if scalar else out


def _mode_arrays(params: PhysicalParams):
    md = mode_decomposition(params)
    return np.asarray(md.lam, dtype=complex), np.asarray(md.weights, dtype=complex)


def _fourier(omega: np.ndarray, t: float, lam: np.ndarray, w: np.ndarray):
    """Vectorized (F, F_dA) over an omega array.

    F is assembled as t sum_j w_j [phi1(z_j t) - phi1(i w t)] with
    z_j = i w + lam_j.  Subtracting the shared phi1(i w t) costs nothing
    (sum w_j = 0 holds exactly in floats) and, with the difference computed
    stably, removes the i*w-sized head of every mode term that would
    otherwise cancel across the sum.  F_dA needs no such care: its weights
    w_j lam_j carry no large factor.
    """
    b = 1j * (t * omega)
    zt = lam[:, None] * t + b[None, :]
    F = np.zeros(omega.shape, dtype=complex)
    for j in range(lam.size):
        F = F + w[j] * phi1_diff(b, lam[j] * t)
    F = t * F
    F_dA = t * np.einsum("j,jn->n", w * lam, phi1(zt))
    return F, F_dA


def inner_fourier(omega: float, t: float, params: PhysicalParams) -> InnerFourier:
    if not (np.isfinite(omega) and omega >= 0.0):
        raise DomainError(f"omega must be finite and >= 0, got {omega}")
    if not (np.isfinite(t) and t >= 0.0):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    lam, w = _mode_arrays(params)
    F, F_dA = _fourier(np.array([float(omega)]), float(t), lam, w)
    return InnerFourier(omega=float(omega), t=float(t), F=complex(F[0]), F_dA=complex(F_dA[0]))


def _initial_edges(t: float, M: float, model: OccupationModel, params: PhysicalParams):
    """Panel edges for the bulk [0, M]: cuts at the physical scales, graded
    fill in the smooth region, uniform width <= pi/(4t) above w = 1/t."""
    osc_start = 1.0 / t
    w_osc = math.pi / (4.0 * t)
    cuts = {params.omega, params.alpha, math.pi / t}
    if model is OccupationModel.EXACT:
        cuts.add(2.0 * params.k * params.T / params.hbar)
    base = [0.0] + sorted(c for c in cuts if 0.0 < c < M) + [M]

    edges = [0.0]
    for a, b in zip(base[:-1], base[1:]):
        smooth_hi = min(b, max(a, osc_start))
        if smooth_hi > a:  # smooth section [a, smooth_hi]
            if a == 0.0:
                fill = [smooth_hi * f for f in (0.125, 0.25, 0.5)]
            elif smooth_hi / a > 16.0:
                fill, x = [], 4.0 * a
                while x < 0.5 * smooth_hi:
                    fill.append(x)
                    x *= 4.0
            else:
                fill = [a + (smooth_hi - a) * f for f in (0.25, 0.5, 0.75)]
            edges.extend(fill)
            edges.append(smooth_hi)
        if b > smooth_hi:  # oscillatory section [smooth_hi, b]
            n = max(1, math.ceil((b - smooth_hi) / w_osc))
            edges.extend(smooth_hi + (b - smooth_hi) * np.arange(1, n + 1) / n)
    uniq = [edges[0]]
    for e in edges[1:]:
        if e > uniq[-1] * (1.0 + 1e-12) + 1e-300:
            uniq.append(e)
    uniq[-1] = M
    return uniq


def _pq(omega: np.ndarray, t: float, lam: np.ndarray, w: np.ndarray):
    """Tail-safe split F = P_e e^{iwt} - P_0, F_dA = Q_e e^{iwt} - Q_0.

    Valid at any w but arranged for large w: the leading 1/(iw) terms are
    peeled off analytically (using sum w_j = 0), so no cancellation grows
    with w.  Only used for w >= M where exponent arguments are tame.
    """
    elam = np.exp(lam * t)
    iw = 1j * omega
    d = 1.0 / (lam[:, None] + iw[None, :])
    lw = w * lam
    sum_e = np.sum(w * elam)  # = A(t) up to eps in the imaginary part
    sum_el = np.sum(lw * elam)  # = dA(t) likewise
    sum_l = np.sum(lw)  # = 1 algebraically
    P0 = -np.einsum("j,jn->n", lw, d) / iw
    Pe = (sum_e - np.einsum("j,jn->n", lw * elam, d)) / iw
    Q0 = (sum_l - np.einsum("j,jn->n", lw * lam, d)) / iw
    Qe = (sum_el - np.einsum("j,jn->n", lw * lam * elam, d)) / iw
    return Pe, P0, Qe, Q0


def _tail_envelopes(M: float, t: float, lam, w, A_t, model, params):
    """Absolute envelopes of the three oscillatory tail integrands at w=M."""
    om = np.array([M])
    Pe, P0, Qe, Q0 = _pq(om, t, lam, w)
    W = spectral_weight(om, model, params)
    return np.array(
        [
            float(2.0 * W[0] * np.abs(Pe[0] * np.conj(P0[0]))),
            float(2.0 * W[0] * np.abs(Qe[0] * np.conj(Q0[0]))),
            float(2.0 * W[0] * abs(A_t) * np.abs(P0[0])),
        ]
    )


def _osc_bound(env: np.ndarray, M: float, t: float) -> np.ndarray:
    # integration by parts once: |int_M^inf h e^{iwt}| <= 2 |h(M)| / t for a
    # monotone envelope; factor 2 slack on top, capped by the crude area M|h|
    return env * min(4.0 / t, M)


def coefficients(
    t: float,
    model: OccupationModel | str,
    params: PhysicalParams,
    rel_tol: float = 1e-8,
) -> CoefficientSet:
    """All three fluctuation coefficients at one time, with error estimates
    and the Cauchy-Schwarz gap 4XY - Xdot^2."""
    if isinstance(model, str):
        model = OccupationModel.from_string(model)
    tf = float(t)
    if not (np.isfinite(tf) and tf >= 0.0):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    if not (np.isfinite(rel_tol) and 0.0 < rel_tol < 1.0):
        raise DomainError(f"rel_tol must lie in (0, 1), got {rel_tol}")

    r2, one_minus = dissipation_R2(tf, params)
    if tf == 0.0:
        return CoefficientSet(
            t=0.0, X=0.0, Xdot=0.0, Y=0.0, R2=1.0, one_minus_R2=0.0,
            model=model, err_X=0.0, err_Xdot=0.0, err_Y=0.0,
            cs_gap=0.0, err_cs_gap=0.0,
        )

    lam, w = _mode_arrays(params)
    A_t = float(kernel_derivatives(tf, params)[0])
    pref = fluctuation_prefactor(params)
    tiny = np.finfo(float).tiny

    def bulk_rows(omega):
        F, F_dA = _fourier(omega, tf, lam, w)
        W = spectral_weight(omega, model, params)
        eiwt = np.cos(omega * tf) + 1j * np.sin(omega * tf)
        xd = 2.0 * A_t * (np.conj(F) * eiwt).real
        return np.vstack(
            [(F.real**2 + F.imag**2) * W, (F_dA.real**2 + F_dA.imag**2) * W, xd * W]
        )

    def budget(v):
        sx = max(abs(v[0]), tiny)
        sy = max(abs(v[1]), tiny)
        sxd = max(abs(v[2]), 2.0 * math.sqrt(max(v[0], 0.0) * max(v[1], 0.0)), tiny)
        return _BULK_SHARE * rel_tol * np.array([sx, sy, sxd])

    M0 = TAIL_START_FACTOR * max(params.alpha, 1.0 / tf)
    M = M0
    bulk = adaptive_rows(bulk_rows, _initial_edges(tf, M, model, params), budget)

    # grow M until the oscillatory tail bound fits its budget share
    scales = budget(bulk.values) / (_BULK_SHARE * rel_tol)
    gb_budget = _TAIL_SHARE * rel_tol * scales
    for _ in range(MAX_TAIL_DOUBLINGS):
        osc = _osc_bound(_tail_envelopes(M, tf, lam, w, A_t, model, params), M, tf)
        if np.all(osc <= gb_budget):
            break
        M *= 2.0
    else:
        raise IntegrationError(
            "oscillatory tail bound does not fit the error budget "
            f"after {MAX_TAIL_DOUBLINGS} doublings of the tail start",
            achieved=osc,
            requested=gb_budget,
        )
    if M != M0:
        bulk = adaptive_rows(bulk_rows, _initial_edges(tf, M, model, params), budget)

    def tail_rows(u):
        om = M / u
        Pe, P0, Qe, Q0 = _pq(om, tf, lam, w)
        W = spectral_weight(om, model, params)
        jac = M / u**2
        sX = np.abs(Pe) ** 2 + np.abs(P0) ** 2
        sY = np.abs(Qe) ** 2 + np.abs(Q0) ** 2
        sXd = 2.0 * A_t * Pe.real
        return np.vstack([sX, sY, sXd]) * (W * jac)

    eps = np.finfo(float).eps
    for escalation in range(_CS_M_GROWTH + 1):
        osc = _osc_bound(_tail_envelopes(M, tf, lam, w, A_t, model, params), M, tf)
        Xb, Yb, Xdb = pref * bulk.values

        # Cauchy-Schwarz gap over the bulk: Gram determinant of the two
        # Fourier rows in the discrete measure, through singular values so
        # it stays exactly >= 0.  The row budgets say nothing about the gap,
        # so the panels are halved until the GL15/GL7 Gram difference fits
        # the gap's own tolerance or the SVD resolution floor.
        # resolution floor: Householder QR has columnwise backward error, so
        # the 2-column volume |b1||b2|sin(theta) behind the Gram determinant
        # is stable to ~eps/sin(theta) relatively, and the bidiagonal SVD of
        # the remaining 2x2 factor is relatively accurate.  In gap units that
        # is eps*sqrt(cs*4XY), falling back to eps^2*4XY once cs itself sits
        # at the noise.  The naive bound eps*s1^3*s2 would be larger by
        # s1/|b1|, which reaches 1e9 in the deep small-t regime.
        gedges = bulk.edges
        nf, wf = bulk.nodes, bulk.weights
        nc, wc = bulk.nodes_coarse, bulk.weights_coarse
        fourXY = 4.0 * Xb * Yb
        for _ in range(_CS_MAX_HALVINGS + 1):
            s_fine = _gram_singulars(nf, wf, tf, lam, w, model, params)
            s_coarse = _gram_singulars(nc, wc, tf, lam, w, model, params)
            cs_fine = 4.0 * pref**2 * (s_fine[0] * s_fine[1]) ** 2
            cs_coarse = 4.0 * pref**2 * (s_coarse[0] * s_coarse[1]) ** 2
            svd_floor = 64.0 * eps * math.sqrt(cs_fine * fourXY)
            svd_floor += (64.0 * eps) ** 2 * fourXY
            gram_err = abs(cs_fine - cs_coarse)
            if gram_err <= rel_tol * cs_fine + svd_floor:
                break
            gedges = split_edges(gedges)
            nf, wf = panel_nodes(gedges, FINE_ORDER)
            nc, wc = panel_nodes(gedges, COARSE_ORDER)
        cs_target = max(rel_tol * cs_fine, svd_floor)

        # tail integrals: row-share budgets, capped so the cross terms with
        # the bulk cannot blur the gap beyond its own target; best effort,
        # whatever is actually achieved lands in the error estimate
        tail_cap = np.array(
            [
                cs_target / (24.0 * max(Yb, tiny) * pref),
                cs_target / (24.0 * max(Xb, tiny) * pref),
                cs_target / (12.0 * max(abs(Xdb), tiny) * pref),
            ]
        )
        tail = adaptive_rows(
            tail_rows,
            [0.0, 0.25, 0.5, 1.0],
            lambda v: np.minimum(_TAIL_SHARE * rel_tol * scales, tail_cap),
            max_panels=_CS_TAIL_MAX_PANELS,
            raise_on_fail=False,
        )

        # the oscillatory remainder bound scales like a high inverse power
        # of M; if it still swamps the gap target, restart the bulk with a
        # larger tail start (at most twice)
        osc_cs = 4.0 * (Xb * pref * osc[1] + Yb * pref * osc[0])
        osc_cs += 2.0 * abs(Xdb) * pref * osc[2]
        if osc_cs <= cs_target or escalation == _CS_M_GROWTH:
            break
        M *= 4.0
        bulk = adaptive_rows(bulk_rows, _initial_edges(tf, M, model, params), budget)

    vb, eb = bulk.values, bulk.errors
    vt, et = tail.values, tail.errors

    X = pref * (vb[0] + vt[0])
    Y = pref * (vb[1] + vt[1])
    Xdot = pref * (vb[2] + vt[2])
    errs = pref * (eb + et + osc)

    Xt, Yt, Xdt = pref * vt
    Xb, Yb, Xdb = pref * vb
    cs_gap = cs_fine + 4.0 * (Xb * Yt + Xt * Yb + Xt * Yt) - 2.0 * Xdb * Xdt - Xdt**2

    tail_err = 4.0 * (X * (pref * (et[1] + osc[1])) + Y * (pref * (et[0] + osc[0])))
    tail_err += 2.0 * abs(Xdot) * pref * (et[2] + osc[2])
    cross_err = 4.0 * (Yt * pref * eb[0] + Xt * pref * eb[1])
    cross_err += 2.0 * abs(Xdt) * pref * eb[2]
    err_cs = gram_err + svd_floor + tail_err + cross_err

    out = CoefficientSet(
        t=tf, X=float(X), Xdot=float(Xdot), Y=float(Y),
        R2=float(r2), one_minus_R2=float(one_minus), model=model,
        err_X=float(errs[0]), err_Xdot=float(errs[2]), err_Y=float(errs[1]),
        cs_gap=float(cs_gap), err_cs_gap=float(err_cs),
    )
    _enforce_invariants(out)
    return out


def _gram_singulars(nodes, wts, t, lam, w, model, params):
    F, F_dA = _fourier(nodes, t, lam, w)
    mu = wts * spectral_weight(nodes, model, params)
    r = np.sqrt(np.maximum(mu, 0.0))
    n = nodes.size
    B = np.empty((2 * n, 2))
    B[:n, 0] = F.real * r
    B[n:, 0] = F.imag * r
    B[:n, 1] = F_dA.real * r
    B[n:, 1] = F_dA.imag * r
    return np.linalg.svd(B, compute_uv=False)


def _enforce_invariants(c: CoefficientSet):
    vals = (c.X, c.Xdot, c.Y, c.R2, c.one_minus_R2, c.cs_gap)
    if not all(np.isfinite(v) for v in vals):
        raise InternalConsistencyError(f"non-finite coefficient data: {c}")
    if c.X < 0.0 or c.Y < 0.0:
        raise InternalConsistencyError(
            f"negative coefficient from a nonnegative integrand: X={c.X}, Y={c.Y}"
        )
    floor = -1e-10 * (4.0 * c.X * c.Y + c.Xdot**2)
    if c.cs_gap < floor:
        raise InternalConsistencyError(
            f"Cauchy-Schwarz gap {c.cs_gap} below the rounding floor {floor} "
            f"at t={c.t} ({c.model})"
        )


def coefficient_X(t, model, params, rel_tol: float = 1e-8) -> float:
    return coefficients(t, model, params, rel_tol).X


def coefficient_Y(t, model, params, rel_tol: float = 1e-8) -> float:
    return coefficients(t, model, params, rel_tol).Y


def coefficient_Xdot(t, model, params, rel_tol: float = 1e-8) -> float:
    return coefficients(t, model, params, rel_tol).Xdot
