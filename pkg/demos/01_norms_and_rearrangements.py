"""
Norms and singular value functions in a weighted block algebra
===============================================================

A finite von Neumann algebra here is a direct sum of matrix blocks, each
carrying its own trace weight.  Weighted traces change every norm, and the
singular value function becomes a step function whose steps have the block
weights as their widths.
"""

from lpflow import BlockAlgebra, mu, schatten_norm, submajorizes
from lpflow.ensembles import gen_general, gen_hermitian

# --- a two block algebra ------------------------------------------------------

alg = BlockAlgebra([(1, 0.5), (1, 2.0)])
x = alg.diag([5.0, 2.0])
print(alg.label(), "total trace", alg.total_trace)

# mu(x) is 5 on [0, 0.5) and 2 on [0.5, 2.5)
print("mu(x) steps:", mu(x).steps)

for p in (1, 2, 3):
    # tau(|x|^p) = 0.5 * 5^p + 2 * 2^p
    print(f"||x||_{p} = {schatten_norm(x, p):.6f}   by hand {(0.5 * 5 ** p + 2 * 2 ** p) ** (1 / p):.6f}")

# --- the integral of mu^p is the trace of |x|^p ---------------------------------

alg = BlockAlgebra([(4, 1.0), (2, 0.5), (2, 2.5)])
x = gen_general(alg, 1.0, seed=3)
m = mu(x)
for p in (1.5, 4.0):
    print(f"p={p}: int mu^p = {m.integral_power(p):.12f}  tau|x|^p = {schatten_norm(x, p) ** p:.12f}")

# --- submajorization --------------------------------------------------------------

a = gen_hermitian(alg, 1.0, seed=1)
ok, margin = submajorizes(mu(2.0 * a), mu(a))
print("mu(a) << mu(2a):", ok, "tightest margin", round(margin, 6))

# the reverse fails, and the margin says by how much
print("mu(2a) << mu(a):", submajorizes(mu(a), mu(2.0 * a)))
