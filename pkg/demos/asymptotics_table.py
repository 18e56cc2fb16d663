#!/usr/bin/env python3
"""Numeric coefficients against their closed small-time leading forms.

Prints the numeric/leading ratio over a shrinking time window for both
models with closed forms, then the fitted log-log exponents and, for the
uniform model, the coefficient and additive constant of the logarithmic
factor. The dissipation factor's printed constant differs from the exact
kernel coefficient by 1 + 2 Omega^2/((alpha-Gamma)^2 - Omega^2), visible
as its ratio flattening near 1.02 instead of 1.
"""

import math

import numpy as np

from qbrownian import OccupationModel, PhysicalParams, coefficients
from qbrownian.asymptotics import (
    EULER_GAMMA,
    fit_log_leading,
    fit_loglog_exponent,
    gap31,
    leading_set,
)
from qbrownian.params import coupling_kappa

p = PhysicalParams()
ATS = np.geomspace(1e-4, 1e-2, 5)
QUANTITIES = ("X", "Xdot", "Y", "one_minus_R2")

cache = {}
for model in (OccupationModel.HIGH_T, OccupationModel.UNIFORM):
    print(f"--- {model.value} ---")
    print(f"{'alpha*t':>9}" + "".join(f"{q:>16}" for q in QUANTITIES)
          + f"{'gap31':>16}")
    for at in ATS:
        t = float(at) / p.alpha
        co = cache.setdefault((model, at), coefficients(t, model, p))
        lead = leading_set(t, model, p)
        cells = [getattr(co, q) / getattr(lead, f"{q}_lead") for q in QUANTITIES]
        cells.append(gap31(co, p.hbar) / lead.gap31_lead)
        print(f"{at:>9.0e}" + "".join(f"{c:>16.6f}" for c in cells))

    ts = ATS / p.alpha
    print("fitted log-log exponents:")
    for q, want in zip(QUANTITIES, (4, 3, 2, 3)):
        vals = [getattr(cache[(model, at)], q) for at in ATS]
        expo, _ = fit_loglog_exponent(ts, vals)
        print(f"  {q}: {expo:.4f}  (leading power {want})")
    print()

# the uniform model's log factor: coefficient and additive constant
kap = coupling_kappa(p.alpha, p.gamma, p.omega)
base = kap * p.alpha**2 * p.hbar / math.pi
thermal = math.pi * p.k * p.T / (p.hbar * p.alpha)
print("uniform-model log factor, values ~ B*(C - ln alpha t)*t^power:")
for q, power, b_want, c_tail in (("X", 4, 0.25 * base, 1.75 - EULER_GAMMA),
                                 ("Y", 2, base, 1.5 - EULER_GAMMA)):
    vals = [getattr(cache[(OccupationModel.UNIFORM, at)], q) for at in ATS]
    B, C = fit_log_leading(ATS / p.alpha, vals, power=power, alpha=p.alpha)
    print(f"  {q}: B={B:.6e} (closed {b_want:.6e})  "
          f"C - thermal = {C - thermal:.4f} (closed {c_tail:.4f})")
print("B and C are nearly collinear over a narrow window (ln alpha t spans")
print("~4.6 against a mean level ~41), so B's percent-level bias drags the")
print("fitted C; the ratio table above, at 2e-5 deviation, is the evidence")
print("that the closed constants are the right ones.")
