"""
Spectral flow by counting and by integrating
=============================================

Along a Hermitian path the spectral flow counts eigenvalues crossing zero,
weighted by the trace.  The same integer comes out of an integral of a
one-form, either in the unbounded picture or, after phi, in the bounded one.
"""

import numpy as np

from lpflow import BlockAlgebra
from lpflow.ensembles import gen_invertible_hermitian
from lpflow.specflow import (
    crossing_sf,
    eta_potential,
    integral_sf_bounded,
    integral_sf_unbounded,
    linear_path,
    shift_path,
)

# --- the truncated shift: one eigenvalue moves from -1/2 to 1/2 ---------------------------

path = shift_path(20)
res = integral_sf_unbounded(path, m=2.0)
print(f"crossing count {res.crossing_sf:g}, integral {res.integral_sf:.10f}")

# the integral falls short of 1 only by the tails cut off at K = 20;
# the bounded route differentiates phi(D_t) by central differences
for q in (3.0, 4.0, 5.0):
    b = integral_sf_bounded(path, q, derivative="fd")
    print(f"bounded q={q:g}: {b.integral_sf:.10f}   delta to unbounded m={q / 2 + 1:g}: {b.consistency_delta:.1e}")

# --- a random path between invertible endpoints ------------------------------------------------

alg = BlockAlgebra([(4, 1.0), (2, 0.5), (2, 2.5)])
rng = np.random.default_rng(2)
D0, D1 = gen_invertible_hermitian(alg, 2.0, rng), gen_invertible_hermitian(alg, 2.0, rng)
path = linear_path(D0, D1 - D0)
res = integral_sf_unbounded(path, m=2.0)
exact = eta_potential(D1, 2.0) - eta_potential(D0, 2.0)
print(f"crossing count {crossing_sf(path):g}, integral {res.integral_sf:.6f}")
print(f"quadrature numerator {res.numerator:.12f}, exact potential difference {exact:.12f}")

# in finite dimensions the integral is the crossing count plus an endpoint correction
