"""Verifiers for the Lipschitz-type estimates of ``phi`` and the absolute value.

Notation used throughout: ``x`` Hermitian, ``a`` a bounded Hermitian
perturbation, ``y = x - a``, ``z = (1 + x^2)^{-1/2}`` and
``h(a) = max(||a||^{1/2}, ||a||)``.

Constants.  With ``K_p`` the Schur multiplier constant,

* ``Kcal_p = 2 (1 + K_p)``                    weighted absolute value estimate,
* ``Zprime_p = Kcal_p + 2^{3/2} + 1``          estimate for ``phi(y) - phi(x)``,
* ``Z_p = Zprime_p + 2^{3/2} + 1``             estimate for ``(|x| - |y|) z``,

the last obtained by moving back through :func:`transfer_constant`.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    abs_op,
    func_calc,
    hermitian,
    min_eigenvalue,
    op_norm,
    phi_map,
    resolvent_half,
    schatten_norm,
)
from .errors import BadExponent, NotPSD, OrderViolation, SupportDeficient
from .reports import Instance, make_report, SLACK
from .schur import ConstantEstimate, check_commuting
from .singular import dominates_dilated, mu, submajorizes

__all__ = [
    "SQRT8",
    "kcal",
    "zprime",
    "zconst",
    "transfer_constant",
    "derived_constants",
    "verify_thm03i",
    "verify_thm03ii",
    "verify_25",
    "verify_lemmaA1",
    "verify_corA1",
    "verify_A2",
    "verify_bks",
    "verify_prop02",
    "MONOTONE_FAMILY",
    "LIPSCHITZ_FAMILY",
]

SQRT8 = 2.0 ** 1.5
ORDER_TOL = 1e-10
SUBMAJ_TOL = 1e-9

MONOTONE_FAMILY = {
    "sqrt": np.sqrt,
    "id": lambda t: t,
    "square": np.square,
    "log1p": np.log1p,
}

LIPSCHITZ_FAMILY = {
    "abs": np.abs,
    "phi": lambda t: t / np.sqrt(1.0 + t * t),
    "sin": np.sin,
    "clip": lambda t: np.clip(t, -1.0, 1.0),
}


def kcal(Kp):
    return 2.0 * (1.0 + Kp)


def transfer_constant(c, z_norm, direction="to_phi"):
    """Move an estimate between the ``|.|`` and ``phi`` forms.

    Both directions add ``(2^{3/2} + 1) ||z||_p``.
    """
    if direction not in ("to_phi", "from_phi"):
        raise ValueError(f"unknown direction {direction!r}")
    if c < 0 or z_norm < 0:
        raise ValueError("constant and norm must be nonnegative")
    return c + (SQRT8 + 1.0) * z_norm


def zprime(Kp):
    return transfer_constant(kcal(Kp), 1.0, "to_phi")


def zconst(Kp):
    return transfer_constant(zprime(Kp), 1.0, "from_phi")


def derived_constants(est):
    """Constants built from a ``K_p`` estimate, sharing its witness."""
    values = {
        "K_cal_p": kcal(est.value),
        "Z_p'": zprime(est.value),
        "Z_p": zconst(est.value),
        "C_p_251": SQRT8,
    }
    return [ConstantEstimate(name, est.p, v, est.trials, est.seed, est.max_witness if name != "C_p_251" else {})
            for name, v in values.items()]


def _open_p(p):
    if not 1.0 < p < np.inf:
        raise BadExponent(f"requires 1 < p < inf, got {p}")


def _closed_p(p):
    if not 1.0 <= p < np.inf:
        raise BadExponent(f"requires 1 <= p < inf, got {p}")


def _h(a_norm):
    return max(np.sqrt(a_norm), a_norm)


def verify_thm03i(x, a, p, Kp):
    """Check both estimates of the main theorem for ``y = x - a``.

    Returns ``(abs_report, phi_report)`` for

    ``||(|x| - |y|) z||_p <= Z_p h(a) ||z||_p`` and
    ``||phi(y) - phi(x)||_p <= Z'_p h(a) ||z||_p``.
    """
    _open_p(p)
    x = hermitian(x)
    a = hermitian(a)
    y = x - a
    z = resolvent_half(x)
    zn = schatten_norm(z, p)
    base = _h(op_norm(a)) * zn
    inst = Instance("thm03i", p, {"Kp": Kp}, {"x": x, "a": a})
    lhs1 = schatten_norm((abs_op(x) - abs_op(y)) @ z, p)
    lhs2 = schatten_norm(phi_map(y) - phi_map(x), p)
    z1, z2 = zconst(Kp), zprime(Kp)
    details = {"form": "abs", "Z_p": z1, "derived": "Z_p = Zprime_p + 2^{3/2} + 1"}
    r1 = make_report(inst, lhs1, z1 * base, z1, details=details)
    inst2 = Instance("thm03i_phi", p, {"Kp": Kp}, {"x": x, "a": a})
    r2 = make_report(inst2, lhs2, z2 * base, z2, details={"form": "phi", "Zprime_p": z2})
    return r1, r2


def verify_thm03ii(x, a, z, p, Kp):
    """``||(|x| - |y|) z||_p <= Kcal_p ||x - y|| ||z||_p`` for ``z > 0`` commuting with ``x``."""
    _open_p(p)
    x = hermitian(x)
    a = hermitian(a)
    z = hermitian(z)
    if min_eigenvalue(z) <= 1e-12:
        raise SupportDeficient("z must be positive definite (support projection 1)")
    check_commuting(x, z)
    y = x - a
    const = kcal(Kp)
    lhs = schatten_norm((abs_op(x) - abs_op(y)) @ z, p)
    base = op_norm(a) * schatten_norm(z, p)
    inst = Instance("thm03ii", p, {"Kp": Kp}, {"x": x, "a": a, "z": z})
    return make_report(inst, lhs, const * base, const)


def verify_25(x, a, p):
    """``|| |y|(1+y^2)^{-1/2} - |x|(1+x^2)^{-1/2} ||_p <= 2^{3/2} ||z||_p h(a)``."""
    _closed_p(p)
    x = hermitian(x)
    a = hermitian(a)
    y = x - a
    g = lambda t: np.abs(t) / np.sqrt(1.0 + t * t)
    lhs = schatten_norm(func_calc(y, g) - func_calc(x, g), p)
    base = schatten_norm(resolvent_half(x), p) * _h(op_norm(a))
    inst = Instance("eq25", p, {}, {"x": x, "a": a})
    return make_report(inst, lhs, SQRT8 * base, SQRT8)


def _submaj_report(inst, big, small, scale, extra_ok=True, details=None, tol=SUBMAJ_TOL):
    """Report ``small << scale * big`` at its tightest breakpoint."""
    rhs_fn = big.scaled(scale)
    ok, margin = submajorizes(rhs_fn, small, tol)
    grid = np.unique(np.concatenate([rhs_fn.breakpoints(), small.breakpoints()]))
    grid = grid[grid > 0]
    if grid.size:
        gaps = rhs_fn.partial_integrals(grid) - small.partial_integrals(grid)
        t = grid[int(np.argmin(gaps))]
        lhs, rhs = small.partial_integral(t), rhs_fn.partial_integral(t)
    else:
        t, lhs, rhs = 0.0, 0.0, 0.0
    d = {"submajorization_margin": margin, "t_worst": float(t)}
    d.update(details or {})
    return make_report(inst, lhs, rhs, scale, abs_tol=tol, extra_ok=ok and extra_ok, details=d)


def _check_order(x, y):
    lo = min_eigenvalue(y + x)
    hi = min_eigenvalue(y - x)
    if min(lo, hi) < -ORDER_TOL:
        raise OrderViolation(f"-y <= x <= y fails (min eig {min(lo, hi):.3e})")


def verify_lemmaA1(x, y, p=None):
    """``mu_s(x) <= mu_{s/2}(y)`` for ``-y <= x <= y``.

    The details also carry the submajorization ``|x|^{1/2} << 2 y^{1/2}``;
    with ``p`` given, the norm consequence ``|| |x|^{1/2} ||_p <= 2 ||y^{1/2}||_p``
    is checked too.  All of these enter the pass flag.
    """
    x = hermitian(x)
    y = hermitian(y)
    _check_order(x, y)
    mx, my = mu(x), mu(y)
    ok, margin, s = dominates_dilated(mx, my, 2.0, SUBMAJ_TOL)
    rx, ry = mu(func_calc(abs_op(x), np.sqrt)), mu(func_calc(y, lambda t: np.sqrt(np.maximum(t, 0.0))))
    ok_c, margin_c = submajorizes(ry.scaled(2.0), rx, SUBMAJ_TOL)
    details = {"pointwise_margin": margin, "s_worst": s, "corA1_sqrt_margin": margin_c}
    extra = ok_c
    if p is not None:
        _closed_p(p)
        n1 = rx.integral_power(p) ** (1 / p)
        n2 = 2.0 * ry.integral_power(p) ** (1 / p)
        details["lp_lhs"], details["lp_rhs"] = n1, n2
        extra = extra and n1 <= n2 + SLACK
    inst = Instance("lemmaA1", p, {}, {"x": x, "y": y})
    lhs, rhs = mx(s), my.stretched(2.0)(s)
    return make_report(inst, lhs, rhs, 1.0, abs_tol=SUBMAJ_TOL, extra_ok=ok and extra, details=details)


def verify_corA1(x, y, f="sqrt", p=None):
    """``f(|x|) << 2 f(y)`` for ``-y <= x <= y`` and ``f`` from the monotone family.

    Also checks the pointwise form ``mu_s(f(|x|)) <= mu_{s/2}(f(y))`` and,
    with ``p`` given, ``||f(|x|)||_p <= 2 ||f(y)||_p``.
    """
    fn = MONOTONE_FAMILY[f]
    x = hermitian(x)
    y = hermitian(y)
    _check_order(x, y)
    fx = mu(func_calc(abs_op(x), fn))
    fy = mu(func_calc(y, lambda t: fn(np.maximum(t, 0.0))))
    ok_pt, margin_pt, _ = dominates_dilated(fx, fy, 2.0, SUBMAJ_TOL)
    details = {"f": f, "pointwise_margin": margin_pt}
    extra = ok_pt
    if p is not None:
        _closed_p(p)
        n1 = fx.integral_power(p) ** (1 / p)
        n2 = 2.0 * fy.integral_power(p) ** (1 / p)
        details["lp_lhs"], details["lp_rhs"] = n1, n2
        extra = extra and n1 <= n2 + SLACK * max(1.0, n2)
    inst = Instance("corA1", p, {"f": f}, {"x": x, "y": y})
    return _submaj_report(inst, fy, fx, 2.0, extra_ok=extra, details=details,
                          tol=SUBMAJ_TOL * max(1.0, fy.integral_power(1.0)))


def verify_A2(x, a, p=None):
    """``|(1+y^2)^{-1} - (1+x^2)^{-1}|^{1/2} << 2 (2M)^{1/2} (1+x^2)^{-1/2}``.

    ``M = max(||a||^2, ||a||)``.  The pass flag also requires the sandwich
    ``-2M z^2 <= (1+y^2)^{-1} - (1+x^2)^{-1} <= 2M z^2`` and, with ``p`` given,
    the norm form ``|| |.|^{1/2} ||_p <= 2^{3/2} h(a) ||z||_p``.
    """
    x = hermitian(x)
    a = hermitian(a)
    y = x - a
    na = op_norm(a)
    M = max(na * na, na)
    inv = lambda t: 1.0 / (1.0 + t * t)
    dx = func_calc(x, inv)
    diff = func_calc(y, inv) - dx
    upper = min_eigenvalue(2.0 * M * dx - diff)
    lower = min_eigenvalue(2.0 * M * dx + diff)
    sandwich = min(upper, lower) >= -ORDER_TOL
    small = mu(func_calc(diff, lambda t: np.sqrt(np.abs(t))))
    z = resolvent_half(x)
    big = mu(z)
    scale = 2.0 * np.sqrt(2.0 * M)
    details = {"sandwich_min_eig": min(upper, lower), "sandwich_ok": bool(sandwich)}
    extra = sandwich
    if p is not None:
        _closed_p(p)
        n1 = small.integral_power(p) ** (1 / p)
        n2 = SQRT8 * _h(na) * big.integral_power(p) ** (1 / p)
        details["lp_lhs"], details["lp_rhs"] = n1, n2
        extra = extra and n1 <= n2 + SLACK
    inst = Instance("A2", p, {}, {"x": x, "a": a})
    return _submaj_report(inst, big, small, scale, extra_ok=extra, details=details)


def verify_bks(a, b, p=None):
    """``a^{1/2} - b^{1/2} << |a - b|^{1/2}`` for positive ``a``, ``b``."""
    a = hermitian(a)
    b = hermitian(b)
    for name, e in (("a", a), ("b", b)):
        if min_eigenvalue(e) < -ORDER_TOL * max(1.0, op_norm(e)):
            raise NotPSD(f"{name} is not positive semidefinite")
    root = lambda t: np.sqrt(np.maximum(t, 0.0))
    small = mu(func_calc(a, root) - func_calc(b, root))
    big = mu(func_calc(a - b, lambda t: np.sqrt(np.abs(t))))
    details = {}
    extra = True
    if p is not None:
        _closed_p(p)
        n1 = small.integral_power(p) ** (1 / p)
        n2 = big.integral_power(p) ** (1 / p)
        details["lp_lhs"], details["lp_rhs"] = n1, n2
        extra = n1 <= n2 + SLACK
    inst = Instance("bks", p, {}, {"a": a, "b": b})
    return _submaj_report(inst, big, small, 1.0, extra_ok=extra, details=details)


def verify_prop02(x, a, t, p, f="abs"):
    """``||(f(x + a) - f(x)) T||_p <= ||a|| ||T||_p`` for 1-Lipschitz ``f``, ``T`` commuting with ``x``.

    Only claimed for ``p`` in ``[1, 2]``; outside that range, or for ``f``
    other than the absolute value, reports are informational.
    """
    _closed_p(p)
    fn = LIPSCHITZ_FAMILY[f]
    x = hermitian(x)
    a = hermitian(a)
    check_commuting(x, t)
    lhs = schatten_norm((func_calc(x + a, fn) - func_calc(x, fn)) @ t, p)
    rhs = op_norm(a) * schatten_norm(t, p)
    inst = Instance("prop02", p, {"f": f}, {"x": x, "a": a, "t": t})
    return make_report(inst, lhs, rhs, 1.0, details={"claimed": bool(1.0 <= p <= 2.0)})
