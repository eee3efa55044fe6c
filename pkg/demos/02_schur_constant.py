"""
Estimating the Schur multiplier constant
=========================================

The multiplier (lambda - mu)/(lambda + mu) acts on the spectral corners of an
operator.  Its norm on L_p has no closed form, so we search for large ratios
and keep the best instance as a witness anyone can re-evaluate.
"""

from lpflow.inequalities import derived_constants
from lpflow.schur import estimate_Kp, reevaluate_witness

# --- p = 2 is a sanity check: every coefficient has modulus at most 1 -------------

est = estimate_Kp(2.0, dims=(8,), trials=50, seed=7)
print(f"K_2 estimate {est.value:.12f}")

# --- other exponents ---------------------------------------------------------------

for p in (1.5, 3.0, 4.0):
    est = estimate_Kp(p, dims=(8,), trials=100, seed=7)
    again = reevaluate_witness(est.max_witness)
    print(f"K_{p:g} >= {est.value:.6f}   witness re-evaluated {again:.6f}")

# K_p and K_q agree for dual exponents, which the estimates reflect
print("K_1.5 vs K_3:", estimate_Kp(1.5, (6,), 60, 1).value, estimate_Kp(3.0, (6,), 60, 1).value)

# --- constants that inherit the estimate ---------------------------------------------

for c in derived_constants(est):
    print(f"{c.name:8s} {c.value:.6f}")
