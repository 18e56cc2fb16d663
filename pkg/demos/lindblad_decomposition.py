#!/usr/bin/env python3
"""Generator form under the zero-point corrected occupation.

At small times the uniform model's coefficients assemble into a bona fide
Lindblad generator: positive damping weight sigma, a positive
semidefinite 2x2 coefficient matrix [[eta, zeta], [zeta*, xi]], and
explicit jump-operator pairs from its Cholesky factorization. The same
construction refuses the high-temperature coefficients, whose matrix has
a negative determinant.
"""

from qbrownian import (
    NotDecomposableError,
    OccupationModel,
    PhysicalParams,
    associate_corollary_params,
    coefficients,
    corollary_check,
    lindblad_decompose,
)

p = PhysicalParams()
t = 1e-4 / p.alpha

for model in (OccupationModel.UNIFORM, OccupationModel.HIGH_T):
    co = coefficients(t, model, p)
    sigma, eta, xi, zeta = associate_corollary_params(co, p.m, p.hbar)
    rep = corollary_check(sigma, eta, xi, zeta, t=t)
    print(f"{model.value} at alpha*t = {p.alpha * t:.0e}:")
    print(f"  sigma={sigma:.6e}  eta={eta:.6e}  xi={xi:.6e}")
    print(f"  zeta={zeta:.6e}")
    print(f"  det = eta*xi - |zeta|^2 margin: "
          f"{rep.margin_gap.margin:+.3e}  -> passes={rep.passes}")
    if rep.passes:
        pairs = rep.decomposition
        print(f"  jump operator pairs (a_n q + b_n p), n=1..{len(pairs)}:")
        for i, (a, b) in enumerate(pairs, 1):
            print(f"    a_{i}={a:.6e}  b_{i}={b:.6e}")
        eta_r = sum(abs(a) ** 2 for a, _ in pairs)
        xi_r = sum(abs(b) ** 2 for _, b in pairs)
        zeta_r = sum(a.conjugate() * b for a, b in pairs)
        print(f"  reconstruction: |d eta|={abs(eta_r - eta):.1e}  "
              f"|d xi|={abs(xi_r - xi):.1e}  |d zeta|={abs(zeta_r - zeta):.1e}")
    else:
        try:
            lindblad_decompose(eta, xi, zeta)
        except NotDecomposableError as exc:
            print(f"  decomposition refused: {exc}")
    print()
