"""
Lipschitz estimates for phi and the absolute value
===================================================

phi(x) = x (1 + x^2)^{-1/2} is a smooth stand-in for the sign function.  Its
increments, and those of |x| weighted by (1 + x^2)^{-1/2}, are controlled in
L_p by the size of the perturbation.  Every check returns a report with both
sides, the constant used and the empirical ratio.
"""

import numpy as np

from lpflow import BlockAlgebra, estimate_Kp
from lpflow.ensembles import gen_hermitian, gen_psd
from lpflow.inequalities import verify_A2, verify_bks, verify_thm03i

alg = BlockAlgebra([(4, 1.0), (2, 0.5), (2, 2.5)])
p = 3.0
kp = estimate_Kp(p, (8,), 100, 7).value
rng = np.random.default_rng(0)

# --- perturbations of growing size -------------------------------------------------

x = gen_hermitian(alg, 3.0, rng)
for scale in (0.01, 0.1, 1.0, 10.0):
    a = gen_hermitian(alg, scale, rng)
    r_abs, r_phi = verify_thm03i(x, a, p, kp)
    print(f"|a| scale {scale:5g}:  abs form ratio {r_abs.ratio:.4f} (constant {r_abs.constant_used:.2f}),"
          f"  phi form ratio {r_phi.ratio:.4f} (constant {r_phi.constant_used:.2f})")

# the ratios stay far below the constants: the bounds are not tight on random data

# --- two supporting inequalities ------------------------------------------------------

r = verify_A2(x, gen_hermitian(alg, 1.0, rng), p)
print("resolvent difference:", r.passed, "sandwich min eigenvalue", f"{r.details['sandwich_min_eig']:.3e}")

r = verify_bks(gen_psd(alg, 1.0, rng), gen_psd(alg, 1.0, rng), p)
print(f"square root difference: lhs {r.lhs:.4f} <= rhs {r.rhs:.4f}  ({r.passed})")
