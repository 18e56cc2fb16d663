#!/usr/bin/env python3
"""Anatomy of the non-positivity witness.

Builds the violating pure state at the scan's t' by hand, walks through
the quantities the theorem needs, and probes the quadratic form around the
witness point: beta_bar minimizes its direction exactly, the slope along
lambda is sqrt(w), and both curvatures equal 2P. The literal double
evaluation of I at the witness cancels ~26 digits and lands in float
noise, which is why the library evaluates it through the algebraic
identity I = gap31 / (4P) instead; both numbers are printed.
"""

from qbrownian import (
    OccupationModel,
    PhysicalParams,
    associate_theorem_params,
    build_chi,
    coefficients,
    find_violation_time,
    quadratic_form_I,
    theorem_check,
    witness,
)

p = PhysicalParams()
t_prime = find_violation_time(p)
print(f"t' = {t_prime:.6e}")

co = coefficients(t_prime, OccupationModel.HIGH_T, p)
abcr = associate_theorem_params(co, p)
print(f"map parameters: a={abcr.a:.6e} b={abcr.b:.6e} "
      f"c={abcr.c:.6e} 1-R^2={abcr.r2:.6e}")

chi = build_chi(t_prime, p)
det = chi.cqq * chi.cpp - chi.cqp_sym**2
print(f"state: <q^2>={chi.cqq:.6e} <p^2>={chi.cpp:.6e} "
      f"<qp+pq>/2={chi.cqp_sym:.1f}  det={det:.12f} (= hbar^2/4: pure)")

rep = theorem_check(chi, abcr, p.m, p.hbar, t=t_prime)
print(f"\nvariance window for <q^2>: ({rep.s_minus:.3e}, {rep.s_plus:.3e}); "
      f"the state sits at the midpoint")
print(f"roots solve P s^2 - hbar s + Q = K/P; residual at lambda: "
      f"{rep.root_residual:.2e} (scale {rep.root_residual_scale:.2e})")

lam, beta, I = witness(chi, abcr, p.m, p.hbar)
print(f"\nwitness lambda = {lam:.6e}, beta_bar = {beta:.6e}")
print(f"I via identity gap31/(4P) = {I:.6e}")
print(f"I via literal quadratic form = {rep.I_value_direct:.6e} "
      f"(cancellation noise; do not trust its sign)")

f = lambda l, b: quadratic_form_I(l, b, chi, abcr, p.m, p.hbar)
d = 1e-3 * lam
slope = (f(lam + d, beta) - f(lam - d, beta)) / (2 * d)
curv_l = f(lam + d, beta) + f(lam - d, beta) - 2 * f(lam, beta)
db = 1e-3 * max(abs(beta), 1.0)
curv_b = f(lam, beta + db) + f(lam, beta - db) - 2 * f(lam, beta)
print(f"\nlocal geometry: slope along lambda = {slope:.6e} "
      f"(sqrt(w) = {rep.w**0.5:.6e})")
print(f"curvature/d^2 along lambda = {curv_l / d**2:.6e}, "
      f"along beta = {curv_b / db**2:.6e} (both 2P)")
