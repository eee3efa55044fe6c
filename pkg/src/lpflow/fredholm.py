"""Finite-dimensional Breuer-Fredholm module checks.

A module is ``(algebra, D0, p, unitaries)``.  The unitaries stand in for the
dense subalgebra: its commutator condition only has to be checked on a
spanning set of unitaries, and a finite list is the desk-scale surrogate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    commutator,
    func_calc,
    hermitian,
    lp_value,
    op_norm,
    phi_map,
    resolvent_half,
    schatten_norm,
    sgn_op,
    trace,
)
from .errors import BadExponent, ConfigError, NotSymmetry
from .inequalities import verify_thm03i
from .io import element_from_json, element_to_json
from .reports import Instance, identity_report, make_report

__all__ = [
    "ModuleSpec",
    "summability_profile",
    "truncation_profile",
    "check_corollary04",
    "norm0",
    "norm_p_phalf",
    "phi_affine_image",
    "AffineImage",
    "chern_character",
    "chern_cyclicity_residual",
    "phi_identity_residual",
    "sgn_phi_residual",
    "conjugation_residual",
]

IDENTITY_TOL = 1e-9
UNITARY_TOL = 1e-10
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class ModuleSpec:
    algebra: BlockAlgebra
    D0: AlgebraElement
    p: float
    unitaries: tuple
    zero_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "D0", hermitian(self.D0))
        object.__setattr__(self, "unitaries", tuple(self.unitaries))
        if not 1.0 < self.p < np.inf:
            raise BadExponent(f"module exponent must lie in (1, inf), got {self.p}")
        one = self.algebra.identity()
        for i, u in enumerate(self.unitaries):
            if u.algebra != self.algebra:
                raise ConfigError(f"unitary {i} lives in a different algebra")
            if op_norm(u.H @ u - one) > UNITARY_TOL:
                raise ConfigError(f"unitary {i} fails u*u = 1 to {UNITARY_TOL:g}")

    def to_json(self):
        return {
            "algebra": self.algebra.to_json(),
            "D0": element_to_json(self.D0),
            "p": self.p,
            "unitaries": [element_to_json(u) for u in self.unitaries],
            "zero_tol": self.zero_tol,
        }

    @classmethod
    def from_json(cls, obj):
        D0 = element_from_json(obj["D0"])
        us = [element_from_json(u) for u in obj.get("unitaries", [])]
        return cls(D0.algebra, D0, float(obj["p"]), us, float(obj.get("zero_tol", 1e-10)))

    @classmethod
    def load(cls, path):
        return cls.from_json(json.loads(Path(path).read_text()))


def summability_profile(m: ModuleSpec, tol=1e-10):
    """Both summability norms of ``D0``, which must coincide.

    ``||(1 + D0^2)^{-1/2}||_p`` and ``|| |1 - phi(D0)^2|^{1/2} ||_p``.
    """
    unbounded = schatten_norm(resolvent_half(m.D0), m.p)
    F = phi_map(m.D0)
    one = m.algebra.identity()
    bounded = schatten_norm(func_calc(one - F @ F, lambda t: np.sqrt(np.abs(t))), m.p)
    diff = abs(unbounded - bounded)
    return {"unbounded": unbounded, "bounded": bounded, "diff": diff, "equal": diff <= tol}


def truncation_profile(p, sizes, weight=1.0):
    """``||(1 + D^2)^{-1/2}||_p`` for ``D = diag(k - 1/2 : k = -K..K)`` over ``K`` in ``sizes``.

    Finite truncations are always summable; the trend in ``K`` shows whether
    the limit is (it converges iff ``p > 1``).
    """
    out = []
    for K in sizes:
        ks = np.arange(-K, K + 1) - 0.5
        alg = BlockAlgebra([(1, weight)] * ks.size)
        out.append((K, schatten_norm(resolvent_half(alg.diag(ks)), p)))
    return out


def norm0(a: AlgebraElement, D0: AlgebraElement):
    """``||a||_0 = ||a|| + ||[D0, a]||`` with the operator norm on the algebra."""
    return op_norm(a) + op_norm(commutator(D0, a))


def phi_identity_residual(x):
    """``|| 1 - phi(x)^2 - (1 + x^2)^{-1} ||``."""
    F = phi_map(x)
    one = x.algebra.identity()
    return op_norm(one - F @ F - func_calc(x, lambda t: 1.0 / (1.0 + t * t)))


def sgn_phi_residual(D0, zero_tol=1e-10):
    """``|| (sgn - phi)(sgn + phi) - (1 - phi^2) ||`` for invertible ``D0``."""
    S = sgn_op(D0, zero_tol)
    F = phi_map(D0)
    one = D0.algebra.identity()
    return op_norm((S - F) @ (S + F) - (one - F @ F))


def conjugation_residual(D0, u):
    """``|| [phi(D0), u] - u (phi(u* D0 u) - phi(D0)) ||``."""
    F = phi_map(D0)
    return op_norm(commutator(F, u) - u @ (phi_map(u.H @ D0 @ u) - F))


def check_corollary04(m: ModuleSpec, Kp):
    """Walk the bounded/unbounded passage for every listed unitary.

    Reports, in order: the factorization identity and the bound
    ``||sgn - phi||_p <= ||(1+D0^2)^{-1}||_p ||(sgn+phi)^{-1}||`` for ``D0``;
    then per unitary the conjugation identity, the triangle bound
    ``||[sgn, u]||_p <= 2 ||sgn - phi||_p + ||[phi, u]||_p`` and the
    main-theorem bound on ``||[phi(D0), u]||_p``.
    """
    D0, p = m.D0, m.p
    S = sgn_op(D0, m.zero_tol)
    F = phi_map(D0)
    base = Instance("cor04_factorization", p, {}, {"D0": D0})
    reports = [identity_report(base, sgn_phi_residual(D0, m.zero_tol), IDENTITY_TOL)]

    inv = func_calc(D0, lambda t: 1.0 / (1.0 + t * t))
    sum_inv = func_calc(D0, lambda t: 1.0 / (np.sign(t) + t / np.sqrt(1.0 + t * t)))
    gap = schatten_norm(S - F, p)
    bound = schatten_norm(inv, p) * op_norm(sum_inv)
    reports.append(make_report(Instance("cor04_sgn_phi", p, {}, {"D0": D0}), gap, bound, 1.0))

    for i, u in enumerate(m.unitaries):
        inst = Instance("cor04_conjugation", p, {"index": i}, {"D0": D0, "u": u})
        reports.append(identity_report(inst, conjugation_residual(D0, u), IDENTITY_TOL,
                                       {"D0_commutator": op_norm(commutator(D0, u))}))
        cs = schatten_norm(commutator(S, u), p)
        cf = schatten_norm(commutator(F, u), p)
        inst = Instance("cor04_triangle", p, {"index": i}, {"D0": D0, "u": u})
        reports.append(make_report(inst, cs, 2.0 * gap + cf, 1.0))
        # [phi(D0), u] = u (phi(y) - phi(x)) with x = D0, y = u* D0 u
        # symmetrize first: when u nearly commutes with D0 the difference is pure roundoff
        reports.append(verify_thm03i(D0, D0 - hermitian(u.H @ D0 @ u), p, Kp)[1])
    return reports


def norm_p_phalf(X, F0, p, strict=False):
    """``||X||_p + ||X F0 + F0 X||_{p/2}``.

    Below ``p = 2`` the second term is only a quasi-norm; ``strict`` rejects
    that range instead of computing it.
    """
    if strict and p < 2:
        raise BadExponent(f"p/2 must be >= 1 in strict mode, got p = {p}")
    if not p > 0:
        raise BadExponent(f"p must be positive, got {p}")
    return schatten_norm(X, p) + lp_value(X @ F0 + F0 @ X, p / 2)


@dataclass(frozen=True)
class AffineImage:
    X: AlgebraElement
    identity_residual: float
    norm: float
    report: object = None


def phi_affine_image(D0, A, p, Kp=None):
    """``X = phi(D0 + A) - phi(D0)`` with its mixed norm and defining identity.

    The identity is ``1 - phi(D)^2 = 1 - F0^2 - (X^2 + F0 X + X F0)`` with
    ``F0 = phi(D0)``.  With ``Kp`` given, ``report`` carries the main-theorem
    bound ``||X||_p <= Z'_p h(A) ||z||_p``.
    """
    if not 1.0 < p < np.inf:
        raise BadExponent(f"requires 1 < p < inf, got {p}")
    D0 = hermitian(D0)
    A = hermitian(A)
    F0 = phi_map(D0)
    F = phi_map(D0 + A)
    X = F - F0
    one = D0.algebra.identity()
    res = op_norm((one - F @ F) - (one - F0 @ F0 - (X @ X + F0 @ X + X @ F0)))
    report = verify_thm03i(D0, -A, p, Kp)[1] if Kp is not None else None
    return AffineImage(X, res, norm_p_phalf(X, F0, p), report)


def chern_character(F0, as_):
    """``tau(F0 [F0, a0][F0, a1] ... [F0, a_{2n+1}])`` for a symmetry ``F0``."""
    as_ = list(as_)
    if len(as_) < 2 or len(as_) % 2:
        raise ValueError(f"need an even number (2n+2) of entries, got {len(as_)}")
    one = F0.algebra.identity()
    defect = op_norm(F0 @ F0 - one)
    if defect > SYMMETRY_TOL:
        raise NotSymmetry(f"||F0^2 - 1|| = {defect:.3e}")
    prod = F0
    for a in as_:
        prod = prod @ commutator(F0, a)
    return trace(prod)


def chern_cyclicity_residual(F0, as_):
    """``|tau(a1, ..., a_{2n+1}, a0) + tau(a0, ..., a_{2n+1})|``."""
    as_ = list(as_)
    return abs(chern_character(F0, as_[1:] + as_[:1]) + chern_character(F0, as_))

