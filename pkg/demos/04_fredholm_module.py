"""
A finite Fredholm module
========================

An invertible Hermitian D0 and a few unitaries.  We check that the two
summability norms agree, walk from the unbounded picture to the bounded one
through phi, and evaluate a Chern character pairing.
"""

import numpy as np

from lpflow import BlockAlgebra
from lpflow.ensembles import gen_invertible_hermitian, gen_symmetry, gen_unitary
from lpflow.fredholm import (
    ModuleSpec,
    chern_character,
    chern_cyclicity_residual,
    check_corollary04,
    summability_profile,
)

alg = BlockAlgebra([(4, 1.0), (2, 0.5), (2, 2.5)])
rng = np.random.default_rng(11)
D0 = gen_invertible_hermitian(alg, 4.0, rng)
module = ModuleSpec(alg, D0, 4.0, [gen_unitary(alg, rng) for _ in range(2)])

# --- summability --------------------------------------------------------------------

prof = summability_profile(module)
print(f"||(1+D0^2)^(-1/2)||_4 = {prof['unbounded']:.14f}")
print(f"|| |1-phi(D0)^2|^(1/2) ||_4 = {prof['bounded']:.14f}")

# --- unbounded to bounded ---------------------------------------------------------------

for r in check_corollary04(module, Kp=1.0):
    print(f"{r.name:20s} lhs {r.lhs:.3e}  rhs {r.rhs:.3e}  {'ok' if r.passed else 'FAIL'}")

# --- Chern character on a symmetry ---------------------------------------------------------

F0 = gen_symmetry(alg, rng)
a = [gen_unitary(alg, rng) for _ in range(4)]
print("Chern value", np.round(chern_character(F0, a), 8))
print("cyclicity residual", chern_cyclicity_residual(F0, a))
