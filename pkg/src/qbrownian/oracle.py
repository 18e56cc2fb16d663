"""Brute-force double-quadrature evaluation of the fluctuation
coefficients, used only by tests and calibration.

Nothing here shares code with the production path beyond the kernel
values themselves: the inner Fourier integral over [0, t] is computed by
composite Gauss-Legendre panels sized by phase (no closed form), and the
outer frequency integral by dense composite rules on [0, 1/t] (geometric
octaves), [1/t, 10 alpha] (phase-sized panels), and a tail of doubling
blocks that stops only when the last increment is negligible, so the tail
is never silently truncated.

The returned error estimate combines an embedded lower-order outer rule
with the final tail increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, IntegrationError
from .kernel import dissipation_R2, kernel_derivatives
from .params import OccupationModel, PhysicalParams
from .quadrature import _gl
from .spectral import CoefficientSet, fluctuation_prefactor, spectral_weight


@dataclass(frozen=True)
class OracleResolution:
    """Explicit discretization knobs for the brute-force path."""

    inner_order: int = 12
    outer_order: int = 12
    inner_phase: float = math.pi  # max phase advance per inner panel
    outer_phase: float = math.pi  # outer panel width, in units of 1/t
    low_octaves: int = 14  # geometric panels covering [0, 1/t]
    low_per_octave: int = 2
    tail_rel_stop: float = 1e-7
    tail_max_blocks: int = 48

    def refine(self, factor: int = 2) -> "OracleResolution":
        """Multiply the node density by `factor` at fixed tail extent."""
        return replace(
            self,
            inner_phase=self.inner_phase / factor,
            outer_phase=self.outer_phase / factor,
            low_per_octave=self.low_per_octave * factor,
        )


def _inner_fourier_numeric(omega: np.ndarray, t: float, params: PhysicalParams, res: OracleResolution):
    """(F, F_dA) at many omega by composite GL over [0, t].

    Outer nodes are grouped by the required inner panel count (a power of
    two), so each group shares one inner grid and the transform becomes a
    dense matrix product.
    """
    rate = params.alpha + params.omega
    need = np.maximum(4, np.ceil(t * (omega + rate) / res.inner_phase).astype(int))
    group = 1 << np.ceil(np.log2(need)).astype(int)
    x, wq = _gl(res.inner_order)
    F = np.empty(omega.size, dtype=complex)
    F_dA = np.empty_like(F)
    for n in np.unique(group):
        sel = np.flatnonzero(group == n)
        edges = t * np.arange(n + 1) / n
        h = 0.5 * (edges[1:] - edges[:-1])[:, None]
        tp = (edges[:-1][:, None] + h) + h * x[None, :]  # (n, order)
        wts = (h * wq[None, :]).ravel()
        tp = tp.ravel()
        A, dA, _ = kernel_derivatives(tp, params)
        wA, wdA = wts * A, wts * dA
        # chunk the phase matrix: m_chunk * (n*order) complex entries at a time
        m_chunk = max(1, int(2_000_000 / tp.size))
        for lo in range(0, sel.size, m_chunk):
            idx = sel[lo : lo + m_chunk]
            ph = np.exp(1j * np.outer(omega[idx], tp))
            F[idx] = ph @ wA
            F_dA[idx] = ph @ wdA
    return F, F_dA


def _outer_edges_low(b1: float, res: OracleResolution):
    ks = np.arange(res.low_octaves, 0, -1)
    edges = [0.0] + list(b1 * 2.0 ** (-ks.astype(float)))
    out = [0.0]
    for a, b in zip(edges[:-1], edges[1:]):
        for i in range(1, res.low_per_octave + 1):
            out.append(a + (b - a) * i / res.low_per_octave)
    out.append(b1)
    uniq = [out[0]]
    for e in out[1:]:
        if e > uniq[-1]:
            uniq.append(e)
    return np.asarray(uniq)


def _phase_edges(a: float, b: float, t: float, res: OracleResolution):
    n = max(1, math.ceil((b - a) * t / res.outer_phase))
    return a + (b - a) * np.arange(n + 1) / n


def oracle_coefficients(
    t: float,
    model: OccupationModel | str,
    params: PhysicalParams,
    resolution: OracleResolution | None = None,
) -> CoefficientSet:
    """Independent evaluation of coefficients() by brute-force quadrature."""
    if isinstance(model, str):
        model = OccupationModel.from_string(model)
    res = resolution or OracleResolution()
    tf = float(t)
    if not (np.isfinite(tf) and tf >= 0.0):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    r2, one_minus = dissipation_R2(tf, params)
    if tf == 0.0:
        return CoefficientSet(
            t=0.0, X=0.0, Xdot=0.0, Y=0.0, R2=1.0, one_minus_R2=0.0,
            model=model, err_X=0.0, err_Xdot=0.0, err_Y=0.0,
            cs_gap=0.0, err_cs_gap=0.0,
        )

    A_t = float(kernel_derivatives(tf, params)[0])

    def rows(omega):
        F, F_dA = _inner_fourier_numeric(omega, tf, params, res)
        W = spectral_weight(omega, model, params)
        eiwt = np.exp(1j * omega * tf)
        xd = 2.0 * A_t * (np.conj(F) * eiwt).real
        return np.vstack(
            [(F.real**2 + F.imag**2) * W, (F_dA.real**2 + F_dA.imag**2) * W, xd * W]
        )

    def region(edges):
        """(fine, |fine - embedded lower order|) composite integrals."""
        fine = _composite(rows, edges, res.outer_order)
        coarse = _composite(rows, edges, res.outer_order - 4)
        return fine, np.abs(fine - coarse)

    b1 = 1.0 / tf
    b2 = max(10.0 * params.alpha, b1)
    vals = np.zeros(3)
    errs = np.zeros(3)
    f, e = region(_outer_edges_low(b1, res))
    vals += f
    errs += e
    if b2 > b1:
        f, e = region(_phase_edges(b1, b2, tf, res))
        vals += f
        errs += e

    lo = b2
    tiny = np.finfo(float).tiny
    for _ in range(res.tail_max_blocks):
        f, e = region(_phase_edges(lo, 2.0 * lo, tf, res))
        vals += f
        errs += e
        lo *= 2.0
        scale = np.array(
            [
                max(abs(vals[0]), tiny),
                max(abs(vals[1]), tiny),
                max(abs(vals[2]), 2.0 * math.sqrt(max(vals[0], 0) * max(vals[1], 0)), tiny),
            ]
        )
        if np.all(np.abs(f) <= res.tail_rel_stop * scale):
            break
    else:
        raise IntegrationError(
            f"oracle tail did not settle within {res.tail_max_blocks} doubling blocks",
            achieved=np.abs(f),
            requested=res.tail_rel_stop * scale,
        )
    errs += np.abs(f)  # charge the last increment as truncation estimate

    pref = fluctuation_prefactor(params)
    X, Y, Xd = pref * vals[0], pref * vals[1], pref * vals[2]
    eX, eY, eXd = pref * errs[0], pref * errs[1], pref * errs[2]
    cs = 4.0 * X * Y - Xd**2
    err_cs = 4.0 * (X * eY + Y * eX) + 2.0 * abs(Xd) * eXd
    return CoefficientSet(
        t=tf, X=float(X), Xdot=float(Xd), Y=float(Y),
        R2=float(r2), one_minus_R2=float(one_minus), model=model,
        err_X=float(eX), err_Xdot=float(eXd), err_Y=float(eY),
        cs_gap=float(cs), err_cs_gap=float(err_cs),
    )


def _composite(fn, edges, order):
    x, wq = _gl(order)
    e = np.asarray(edges, dtype=float)
    h = 0.5 * (e[1:] - e[:-1])[:, None]
    nodes = (e[:-1][:, None] + h) + h * x[None, :]
    rows = fn(nodes.ravel())
    P = e.size - 1
    rows = rows.reshape(rows.shape[0], P, order)
    return np.einsum("kpj,pj->k", rows, h * wq[None, :])
