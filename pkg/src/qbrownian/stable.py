"""Cancellation-safe elementary kernels shared by the kernel and spectral
modules.

phi1(z) = (e^z - 1)/z
psi(z)  = (e^z - 1 - z)/z^2
phi2(z) = e^z - 1 - z - z^2/2

All three accept complex arrays; below |z| = 0.25 they switch to Taylor
series (13 terms, relative error < 1e-16 at the branch point), above it
they rely on a complex expm1 built from the real one.
"""

from __future__ import annotations

import math

import numpy as np

_SERIES_CUTOFF = 0.25
_N_TERMS = 13


def cexpm1(z: np.ndarray) -> np.ndarray:
    """exp(z) - 1 for complex z without cancellation near z = 0.

    exp(x+iy) - 1 = expm1(x) e^{iy} + (e^{iy} - 1), and
    e^{iy} - 1 = -2 sin^2(y/2) + i sin(y).
    """
    z = np.asarray(z, dtype=complex)
    x = z.real
    y = z.imag
    eiy = np.cos(y) + 1j * np.sin(y)
    return np.expm1(x) * eiy + (-2.0 * np.sin(0.5 * y) ** 2 + 1j * np.sin(y))


def _series(z: np.ndarray, k0: int) -> np.ndarray:
    """sum_{n>=0} z^n / (n + k0)!  (Horner, _N_TERMS terms)."""
    acc = np.zeros_like(z)
    for n in range(_N_TERMS - 1, -1, -1):
        acc = acc * z + 1.0 / math.factorial(n + k0)
    return acc


def phi1(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) <= _SERIES_CUTOFF
    out[small] = _series(z[small], 1)
    zl = z[~small]
    out[~small] = cexpm1(zl) / zl
    return out


def psi(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) <= _SERIES_CUTOFF
    out[small] = _series(z[small], 2)
    zl = z[~small]
    out[~small] = (cexpm1(zl) - zl) / zl**2
    return out


def phi2(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) <= _SERIES_CUTOFF
    zs = z[small]
    out[small] = zs**3 * _series(zs, 3)
    zl = z[~small]
    out[~small] = cexpm1(zl) - zl - 0.5 * zl**2
    return out


_DIFF_X_CUTOFF = 0.5
_DIFF_SERIES_RADIUS = 1.2
_DIFF_SERIES_TERMS = 22
_DIFF_TAYLOR_TERMS = 14


def phi1_diff(b: np.ndarray, x: complex) -> np.ndarray:
    """phi1(b + x) - phi1(b), accurate relative to the difference itself.

    The naive difference keeps only ~|x phi1'/phi1| of its digits.  That is
    fatal in the spectral integrand, where b = i*omega*t runs far up the
    imaginary axis while x = lam_j*t shrinks with t and the mode sum then
    multiplies the loss by another factor ~omega.  Three regimes:

      |x| > 0.5            direct difference (loss bounded by a few digits)
      both args <= ~1.7    double Taylor series around 0
      |b| > 1.2            Taylor in x; the n-th derivative of phi1 reduces
                           to truncated exponential sums E_n(-b), and
                           e^b E_n(-b) - 1 never cancels below the size of
                           the term it feeds
    """
    b = np.asarray(b, dtype=complex)
    xc = complex(x)
    if xc == 0.0:
        return np.zeros_like(b)
    if abs(xc) > _DIFF_X_CUTOFF:
        return phi1(b + xc) - phi1(b)
    out = np.empty_like(b)
    small = np.abs(b) <= _DIFF_SERIES_RADIUS
    if np.any(small):
        # phi1(b+x) - phi1(b) = x * sum_{n>=1} S_n / (n+1)! with
        # S_n = sum_{k<n} (b+x)^k b^{n-1-k}; S_{n+1} = (b+x) S_n + b^n.
        # Every S_n is a plain power sum, so no subtractive cancellation.
        bs = b[small]
        u = bs + xc
        s_n = np.ones_like(bs)
        b_pow = np.ones_like(bs)
        acc = 0.5 * s_n
        for n in range(1, _DIFF_SERIES_TERMS):
            b_pow = b_pow * bs
            s_n = u * s_n + b_pow
            acc += s_n / math.factorial(n + 2)
        out[small] = xc * acc
    if not np.all(small):
        # d^n/db^n phi1(b) = n! (-1)^n b^{-n-1} (e^b E_n(-b) - 1) with
        # E_n the degree-n Taylor polynomial of exp; the x-Taylor terms are
        # (-x/b)^n (e^b E_n(-b) - 1) / b and fall off at least like x^n/n!.
        bl = b[~small]
        ratio = -xc / bl
        eb = np.exp(bl)
        trunc_exp = np.ones_like(bl)
        term = np.ones_like(bl)
        pw = np.ones_like(bl)
        acc = np.zeros_like(bl)
        for n in range(1, _DIFF_TAYLOR_TERMS + 1):
            term = term * (-bl) / n
            trunc_exp = trunc_exp + term
            pw = pw * ratio
            acc += pw * (eb * trunc_exp - 1.0)
        out[~small] = acc / bl
    return out
