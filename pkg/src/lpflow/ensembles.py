"""Seeded random ensembles of algebra elements.

Every generator accepts either an integer seed or a ``numpy.random.Generator``
and is deterministic in it.  Integer seeds go through PCG64 via
``numpy.random.default_rng``.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra, func_calc

__all__ = [
    "as_rng",
    "gen_hermitian",
    "gen_unitary",
    "gen_psd",
    "gen_general",
    "gen_commuting_positive",
    "gen_order_pair",
    "gen_symmetry",
    "gen_invertible_hermitian",
]


def as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _gauss(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _check_scale(scale):
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")


def gen_hermitian(algebra: BlockAlgebra, scale=1.0, seed=0) -> AlgebraElement:
    """GUE-type blocks ``(G + G*)/2 * scale/sqrt(n)``; spectral radius near ``2 scale``."""
    _check_scale(scale)
    rng = as_rng(seed)
    out = []
    for n in algebra.sizes:
        g = _gauss(rng, n)
        out.append((g + g.conj().T) * (0.5 * scale / np.sqrt(n)))
    return AlgebraElement(algebra, out)


def gen_general(algebra: BlockAlgebra, scale=1.0, seed=0) -> AlgebraElement:
    _check_scale(scale)
    rng = as_rng(seed)
    return AlgebraElement(algebra, [_gauss(rng, n) * (scale / np.sqrt(2 * n)) for n in algebra.sizes])


def gen_unitary(algebra: BlockAlgebra, seed=0) -> AlgebraElement:
    """Haar unitary per block (QR with the phase correction on ``R``'s diagonal)."""
    rng = as_rng(seed)
    out = []
    for n in algebra.sizes:
        q, r = np.linalg.qr(_gauss(rng, n))
        d = np.diag(r)
        out.append(q * (d / np.abs(d)))
    return AlgebraElement(algebra, out)


def gen_psd(algebra: BlockAlgebra, scale=1.0, seed=0) -> AlgebraElement:
    """``g* g`` for a Gaussian ``g``, made exactly Hermitian."""
    g = gen_general(algebra, np.sqrt(scale), seed)
    out = []
    for b in g.blocks:
        m = b.conj().T @ b
        out.append((m + m.conj().T) / 2)
    return AlgebraElement(algebra, out)


def gen_commuting_positive(x: AlgebraElement, seed=0) -> AlgebraElement:
    """A positive definite function of ``x``; commutes with ``x`` by construction.

    The three shapes stay bounded away from zero on any bounded spectrum.
    """
    rng = as_rng(seed)
    kind = int(rng.integers(3))
    c = float(rng.uniform(0.2, 2.0))
    if kind == 0:
        f = lambda t: np.exp(-c * t / np.sqrt(1.0 + t * t))
    elif kind == 1:
        f = lambda t: (1.0 + t * t) ** (-c / 2)
    else:
        f = lambda t: c + np.abs(t)
    return func_calc(x, f)


def gen_order_pair(algebra: BlockAlgebra, scale=1.0, seed=0):
    """``(x, y)`` with ``-y <= x <= y``: ``y = |g| + |h|``, ``x = |g| - |h|`` for PSD ``g``, ``h``."""
    rng = as_rng(seed)
    g = gen_psd(algebra, scale, rng)
    h = gen_psd(algebra, scale, rng)
    return g - h, g + h


def gen_symmetry(algebra: BlockAlgebra, seed=0) -> AlgebraElement:
    """``F = u diag(+-1) u*`` with a random sign pattern; ``F^2 = 1``."""
    rng = as_rng(seed)
    u = gen_unitary(algebra, rng)
    out = []
    for n, b in zip(algebra.sizes, u.blocks):
        s = rng.choice([-1.0, 1.0], size=n)
        m = (b * s) @ b.conj().T
        out.append((m + m.conj().T) / 2)
    return AlgebraElement(algebra, out)


def gen_invertible_hermitian(algebra: BlockAlgebra, scale=1.0, seed=0, gap=0.05) -> AlgebraElement:
    """Hermitian element whose eigenvalues all have modulus at least ``gap * scale``."""
    rng = as_rng(seed)
    h = gen_hermitian(algebra, scale, rng)
    floor = gap * scale
    return func_calc(h, lambda t: np.where(t >= 0, np.maximum(t, floor), np.minimum(t, -floor)))
