"""Traced block matrix algebras and Hermitian functional calculus.

A finite semifinite algebra is modelled as a direct sum of full matrix
blocks ``M_{n_1} + ... + M_{n_K}`` carrying the trace
``tau(x) = sum_k c_k Tr(x_k)`` with positive weights ``c_k``.  Non-integer
weights give traces that are not multiples of the standard trace, so
singular value functions have fractional step widths and spectral flow can
be non-integer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from numbers import Number
from typing import Callable, Sequence

import numpy as np

from .errors import (
    AlgebraMismatch,
    BadExponent,
    DomainError,
    KernelTooClose,
    NoConvergence,
    NonHermitian,
)
from .jacobi import jacobi_eigh

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
SYMMETRIZE_WARN = 1e-14

__all__ = [
    "BlockAlgebra",
    "AlgebraElement",
    "SpectralDecomposition",
    "eig_hermitian",
    "func_calc",
    "abs_op",
    "phi_map",
    "resolvent_half",
    "sgn_op",
    "trace",
    "schatten_norm",
    "op_norm",
    "commutator",
    "min_eigenvalue",
    "hermitian",
    "default_cluster_tol",
]


@dataclass(frozen=True)
class BlockAlgebra:
    """Direct sum of matrix blocks ``(size, weight)``."""

    blocks: tuple

    def __init__(self, blocks):
        blocks = tuple((int(n), float(w)) for n, w in blocks)
        if not blocks:
            raise ValueError("a block algebra needs at least one block")
        for n, w in blocks:
            if n < 1:
                raise ValueError(f"block size must be >= 1, got {n}")
            if not w > 0:
                raise ValueError(f"block weight must be > 0, got {w}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def matrix(cls, n, weight=1.0):
        return cls([(n, weight)])

    @property
    def sizes(self):
        return tuple(n for n, _ in self.blocks)

    @property
    def weights(self):
        return tuple(w for _, w in self.blocks)

    @property
    def dim(self):
        return sum(self.sizes)

    @property
    def total_trace(self):
        return sum(n * w for n, w in self.blocks)

    def identity(self):
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.sizes])

    def zeros(self):
        return AlgebraElement(self, [np.zeros((n, n), dtype=complex) for n in self.sizes])

    def scalar(self, c):
        return AlgebraElement(self, [c * np.eye(n, dtype=complex) for n in self.sizes])

    def diag(self, values):
        """Element with the given diagonal, filled block by block."""
        values = np.asarray(values, dtype=complex).ravel()
        if values.size != self.dim:
            raise AlgebraMismatch(f"expected {self.dim} diagonal entries, got {values.size}")
        out, i = [], 0
        for n in self.sizes:
            out.append(np.diag(values[i:i + n]))
            i += n
        return AlgebraElement(self, out)

    def doubled(self):
        """The algebra ``M (x) M_2(C)``: every block doubled, same weights."""
        return BlockAlgebra([(2 * n, w) for n, w in self.blocks])

    def label(self):
        return "+".join(f"{n}@{w:g}" for n, w in self.blocks)

    def to_json(self):
        return [{"size": n, "weight": w} for n, w in self.blocks]


class AlgebraElement:
    """A block-diagonal complex matrix conforming to a ``BlockAlgebra``.

    Elements behave as immutable values: the block arrays are marked
    read-only, and arithmetic always allocates.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks: Sequence):
        if len(blocks) != len(algebra.blocks):
            raise AlgebraMismatch(
                f"expected {len(algebra.blocks)} blocks, got {len(blocks)}")
        arrs = []
        for b, n in zip(blocks, algebra.sizes):
            arr = np.array(b, dtype=complex)
            if arr.shape != (n, n):
                raise AlgebraMismatch(f"block shape {arr.shape} != {(n, n)}")
            arr.setflags(write=False)
            arrs.append(arr)
        self.algebra = algebra
        self.blocks = tuple(arrs)

    # -- construction helpers -------------------------------------------------
    @classmethod
    def from_dense(cls, algebra, matrix):
        """Cut the diagonal blocks out of a dense matrix."""
        m = np.asarray(matrix, dtype=complex)
        out, i = [], 0
        for n in algebra.sizes:
            out.append(m[i:i + n, i:i + n])
            i += n
        return cls(algebra, out)

    def to_dense(self):
        m = np.zeros((self.algebra.dim, self.algebra.dim), dtype=complex)
        i = 0
        for b in self.blocks:
            n = b.shape[0]
            m[i:i + n, i:i + n] = b
            i += n
        return m

    def map_blocks(self, fn):
        return AlgebraElement(self.algebra, [fn(b) for b in self.blocks])

    # -- arithmetic -------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatch(
                f"algebras differ: {self.algebra.label()} vs {other.algebra.label()}")

    def __add__(self, other):
        if isinstance(other, Number):
            return self + self.algebra.scalar(other)
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Number):
            return self - self.algebra.scalar(other)
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return AlgebraElement(self.algebra, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    @property
    def H(self):
        """Adjoint ``x*``."""
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    # -- inspection -------------------------------------------------------------
    def max_abs(self):
        return max(float(np.max(np.abs(b))) if b.size else 0.0 for b in self.blocks)

    def hermitian_defect(self):
        return max(float(np.max(np.abs(b - b.conj().T))) for b in self.blocks)

    def is_hermitian(self, tol=HERMITIAN_TOL):
        return self.hermitian_defect() <= tol * max(self.max_abs(), 1e-300)

    def allclose(self, other, atol=1e-10):
        self._check(other)
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"AlgebraElement({self.algebra.label()}, dim={self.algebra.dim})"


def hermitian(x: AlgebraElement, tol=HERMITIAN_TOL) -> AlgebraElement:
    """Certify ``x`` Hermitian and return its symmetrization ``(x + x*)/2``."""
    defect = x.hermitian_defect()
    scale = x.max_abs()
    if defect > tol * scale and defect > 0.0:
        raise NonHermitian(f"max-entry |x - x*| = {defect:.3e} exceeds {tol:g}*|x| = {tol * scale:.3e}")
    if defect == 0.0:
        return x
    if defect > SYMMETRIZE_WARN * max(scale, 1e-300):
        log.warning("symmetrizing input with Hermitian defect %.3e", defect)
    return AlgebraElement(x.algebra, [0.5 * (b + b.conj().T) for b in x.blocks])


def default_cluster_tol(x: AlgebraElement) -> float:
    return 1e-8 * (1.0 + op_norm(x))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Per-block eigen-decomposition of a Hermitian element.

    ``eigenvalues[k]`` is ascending within block ``k``; ``eigenvectors[k]``
    holds the matching orthonormal columns.
    """

    algebra: BlockAlgebra
    eigenvalues: tuple
    eigenvectors: tuple
    cluster_tol: float

    def tagged_eigenvalues(self):
        """All eigenvalues as ``(value, block, index)``, ascending by value."""
        out = [(float(lam), k, i)
               for k, w in enumerate(self.eigenvalues) for i, lam in enumerate(w)]
        out.sort(key=lambda r: (r[0], r[1], r[2]))
        return out

    def clusters(self):
        """Group eigenvalues whose consecutive gaps are within ``cluster_tol``.

        Returns a list of ``(value, members)`` with ``members`` a list of
        ``(block, index)``; ``value`` is the mean of the cluster.
        """
        tagged = self.tagged_eigenvalues()
        groups, current = [], []
        for rec in tagged:
            if current and rec[0] - current[-1][0] > self.cluster_tol:
                groups.append(current)
                current = []
            current.append(rec)
        if current:
            groups.append(current)
        return [(float(np.mean([r[0] for r in g])), [(r[1], r[2]) for r in g]) for g in groups]

    def projection(self, members):
        """Orthogonal projection onto the span of the listed eigenvectors."""
        out = []
        for k, (n, _) in enumerate(self.algebra.blocks):
            cols = [i for (b, i) in members if b == k]
            v = self.eigenvectors[k][:, cols]
            out.append(v @ v.conj().T if cols else np.zeros((n, n), dtype=complex))
        return AlgebraElement(self.algebra, out)

    def apply(self, f):
        """``f(x)`` rebuilt from the decomposition."""
        out = []
        for w, v in zip(self.eigenvalues, self.eigenvectors):
            fw = np.asarray(f(w))
            if fw.shape != w.shape:
                fw = np.broadcast_to(fw, w.shape)
            if not np.all(np.isfinite(fw)):
                bad = w[~np.isfinite(fw)]
                raise DomainError(f"function undefined at eigenvalue(s) {bad}")
            out.append((v * fw) @ v.conj().T)
        return AlgebraElement(self.algebra, out)

    def min_abs(self):
        return min(float(np.min(np.abs(w))) for w in self.eigenvalues)

    def weighted_count(self, predicate):
        """``tau`` of the spectral projection onto ``{lambda : predicate}``."""
        return sum(wt * int(np.count_nonzero(predicate(w)))
                   for w, wt in zip(self.eigenvalues, self.algebra.weights))


def _eigh_block(b, solver, k):
    if not np.all(np.isfinite(b)):
        raise NoConvergence(f"non-finite entries in block {k}", block=k)
    if solver == "jacobi":
        return jacobi_eigh(b)
    if solver != "lapack":
        raise ValueError(f"unknown eigensolver {solver!r}")
    try:
        return np.linalg.eigh(b)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver failed on block {k}: {exc}", block=k) from exc


def eig_hermitian(x: AlgebraElement, cluster_tol: float | None = None,
                  solver: str = "lapack") -> SpectralDecomposition:
    """Block-wise eigen-decomposition of a Hermitian element.

    ``solver`` is ``"lapack"`` (default) or ``"jacobi"`` for the cyclic
    Jacobi iteration in :mod:`lpflow.jacobi`.
    """
    x = hermitian(x)
    vals, vecs = [], []
    for k, b in enumerate(x.blocks):
        w, v = _eigh_block(b, solver, k)
        vals.append(np.asarray(w, dtype=float))
        vecs.append(v)
    if cluster_tol is None:
        norm = max(float(np.max(np.abs(w))) for w in vals)
        cluster_tol = 1e-8 * (1.0 + norm)
    return SpectralDecomposition(x.algebra, tuple(vals), tuple(vecs), float(cluster_tol))


def func_calc(x: AlgebraElement, f: Callable, solver: str = "lapack") -> AlgebraElement:
    """Spectral functional calculus ``f(x) = U f(Lambda) U*``.

    ``f`` must accept a numpy array of eigenvalues.
    """
    return eig_hermitian(x, solver=solver).apply(f)


def abs_op(x: AlgebraElement) -> AlgebraElement:
    """``|x| = (x* x)^{1/2}``, via singular value decomposition."""
    out = []
    for b in x.blocks:
        if np.array_equal(b, b.conj().T):
            w, v = np.linalg.eigh(b)
            out.append((v * np.abs(w)) @ v.conj().T)
        else:
            _, s, vh = np.linalg.svd(b)
            out.append((vh.conj().T * s) @ vh)
    return AlgebraElement(x.algebra, out)


def _phi(t):
    return t / np.sqrt(1.0 + t * t)


def phi_map(x: AlgebraElement) -> AlgebraElement:
    """``phi(x) = x (1 + x^2)^{-1/2}``."""
    return func_calc(x, _phi)


def resolvent_half(x: AlgebraElement) -> AlgebraElement:
    """``z = (1 + x^2)^{-1/2}``."""
    return func_calc(x, lambda t: 1.0 / np.sqrt(1.0 + t * t))


def sgn_op(x: AlgebraElement, zero_tol: float = 1e-10) -> AlgebraElement:
    """Sign of an invertible Hermitian element; no convention on the kernel."""
    dec = eig_hermitian(x)
    if dec.min_abs() <= zero_tol:
        raise KernelTooClose(f"eigenvalue within {zero_tol:g} of 0 (min |lambda| = {dec.min_abs():.3e})")
    return dec.apply(np.sign)


def trace(x: AlgebraElement) -> complex:
    return complex(sum(w * np.trace(b) for b, w in zip(x.blocks, x.algebra.weights)))


def singular_values(x: AlgebraElement):
    """Per-block singular values, descending within each block."""
    return [np.linalg.svd(b, compute_uv=False) for b in x.blocks]


def schatten_norm(x: AlgebraElement, p: float) -> float:
    """``||x||_p = tau(|x|^p)^{1/p}``; ``p = inf`` gives the operator norm."""
    if np.isinf(p):
        return op_norm(x)
    if not p >= 1:
        raise BadExponent(f"Schatten exponent must be >= 1, got {p}")
    return lp_value(x, p)


def lp_value(x: AlgebraElement, p: float) -> float:
    """``tau(|x|^p)^{1/p}`` for any ``p > 0`` (a quasi-norm below 1)."""
    total = 0.0
    for s, w in zip(singular_values(x), x.algebra.weights):
        total += w * float(np.sum(s ** p))
    return total ** (1.0 / p)


def op_norm(x: AlgebraElement) -> float:
    return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in x.blocks)


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a @ b - b @ a


def min_eigenvalue(x: AlgebraElement) -> float:
    x = hermitian(x)
    return min(float(np.linalg.eigvalsh(b)[0]) for b in x.blocks)
