"""Spectral flow of Hermitian paths.

Two routes are provided.  ``crossing_sf`` counts the trace of the negative
spectral projection at both endpoints.  The integral routes integrate the
one-forms

    tau(D'_t (1 + D_t^2)^{-m})                      (unbounded form)
    tau(F'_t (1 - F_t^2)^{(q-1)/2}),  F_t = phi(D_t)  (bounded form)

over ``[0, 1]`` and normalize by

    Ct_m = int_R (1 + u^2)^{-m} du = sqrt(pi) Gamma(m - 1/2) / Gamma(m)
    C_n  = int_{-1}^{1} (1 - u^2)^n du = sqrt(pi) Gamma(n + 1) / Gamma(n + 3/2)

In finite dimensions the unbounded form is exact: its integral along any
path equals ``tau(g_m(D_1)) - tau(g_m(D_0))`` with ``g_m`` the
antiderivative of ``(1 + u^2)^{-m}`` vanishing at 0 (see ``eta_potential``).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .algebra import AlgebraElement, BlockAlgebra, eig_hermitian, hermitian, trace
from .errors import EndpointKernel, StepTooSmall
from .io import element_from_json, element_to_json
from .quadrature import QuadratureSpec, adaptive_simpson

__all__ = [
    "OperatorPath",
    "SpectralFlowResult",
    "RefinementWarning",
    "crossing_sf",
    "integral_sf_unbounded",
    "integral_sf_bounded",
    "verify_diff_formula",
    "eta_potential",
    "g_potential",
    "alpha_form",
    "theta_form",
    "unbounded_constant",
    "bounded_constant",
    "unbounded_integrand",
    "bounded_integrand",
    "linear_path",
    "conjugation_path",
    "sampled_path",
    "concat",
    "shift_path",
]


class RefinementWarning(UserWarning):
    """An interior sample sits near a kernel on a grid too coarse to resolve it."""


# -- normalization constants ----------------------------------------------------


def unbounded_constant(m):
    """``int_R (1 + u^2)^{-m} du`` for ``m > 1/2``."""
    if not m > 0.5:
        raise ValueError(f"need m > 1/2, got {m}")
    return float(np.sqrt(np.pi) * np.exp(gammaln(m - 0.5) - gammaln(m)))


def bounded_constant(n):
    """``int_{-1}^{1} (1 - u^2)^n du`` for ``n > -1``."""
    if not n > -1:
        raise ValueError(f"need n > -1, got {n}")
    return float(np.sqrt(np.pi) * np.exp(gammaln(n + 1.0) - gammaln(n + 1.5)))


# -- paths -----------------------------------------------------------------------


def _unitary_exp(evals, evecs, s):
    """``exp(i s H)`` per block from the eigen-decomposition of ``H``."""
    return [(v * np.exp(1j * s * w)) @ v.conj().T for w, v in zip(evals, evecs)]


@dataclass(frozen=True, eq=False)
class OperatorPath:
    """A Hermitian path ``t -> D_t`` on ``[0, 1]``.

    ``kind`` is one of

    * ``linear``: ``data = (D0, A)``, ``D_t = D0 + t A``;
    * ``conjugation``: ``data = (D0, H)``, ``D_t = exp(-itH) D0 exp(itH)``;
    * ``sampled``: ``data`` is the tuple of samples on ``t_grid``, linearly
      interpolated in between;
    * ``composite``: ``data`` is a tuple of paths traversed in order, each
      reparametrized onto an equal share of ``[0, 1]``.

    ``t_grid`` is the audit grid for crossing checks (for ``sampled`` it is
    also the sample grid).
    """

    algebra: BlockAlgebra
    kind: str
    data: tuple
    t_grid: tuple

    def __post_init__(self):
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.size < 2 or grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
            raise ValueError("t_grid must be strictly increasing from 0 to 1")
        if self.kind not in ("linear", "conjugation", "sampled", "composite"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.kind == "sampled" and len(self.data) != grid.size:
            raise ValueError("sampled path needs one sample per grid point")
        if self.kind in ("linear", "conjugation"):
            object.__setattr__(self, "data", tuple(hermitian(e) for e in self.data))
        if self.kind == "sampled":
            object.__setattr__(self, "data", tuple(hermitian(e) for e in self.data))
        object.__setattr__(self, "t_grid", tuple(float(t) for t in grid))
        if self.kind == "conjugation":
            dec = eig_hermitian(self.data[1])
            object.__setattr__(self, "_h", (dec.eigenvalues, dec.eigenvectors))

    # evaluation

    def _locate(self, t):
        parts = self.data
        k = min(int(t * len(parts)), len(parts) - 1)
        return parts[k], t * len(parts) - k, float(len(parts))

    def at(self, t) -> AlgebraElement:
        t = float(t)
        if self.kind == "linear":
            D0, A = self.data
            return D0 + A * t
        if self.kind == "conjugation":
            D0 = self.data[0]
            evals, evecs = self._h
            u = AlgebraElement(self.algebra, _unitary_exp(evals, evecs, -t))
            out = u @ D0 @ u.H
            return AlgebraElement(self.algebra, [(b + b.conj().T) / 2 for b in out.blocks])
        if self.kind == "sampled":
            grid = self.t_grid
            j = int(np.clip(np.searchsorted(grid, t, side="right") - 1, 0, len(grid) - 2))
            s = (t - grid[j]) / (grid[j + 1] - grid[j])
            if s == 0.0:
                return self.data[j]
            return self.data[j] * (1.0 - s) + self.data[j + 1] * s
        path, s, _ = self._locate(t)
        return path.at(s)

    def tangent(self, t) -> AlgebraElement:
        """Exact tangent for analytic kinds; for ``sampled`` the segment slope.

        At a sample node the sampled tangent is the central difference of
        the neighbouring samples (one-sided at the ends).
        """
        t = float(t)
        if self.kind == "linear":
            return self.data[1]
        if self.kind == "conjugation":
            D = self.at(t)
            H = self.data[1]
            return (D @ H - H @ D) * 1j
        if self.kind == "sampled":
            grid, smp = self.t_grid, self.data
            j = int(np.searchsorted(grid, t))
            if j < len(grid) and grid[j] == t:
                lo, hi = max(j - 1, 0), min(j + 1, len(grid) - 1)
            else:
                lo, hi = j - 1, j
            return (smp[hi] - smp[lo]) / (grid[hi] - grid[lo])
        path, s, scale = self._locate(t)
        return path.tangent(s) * scale

    def breakpoints(self):
        """Points where the tangent may be discontinuous (quadrature splits there)."""
        if self.kind == "sampled":
            return list(self.t_grid)
        if self.kind == "composite":
            n = len(self.data)
            out = []
            for k, part in enumerate(self.data):
                out.extend((k + s) / n for s in part.breakpoints()[:-1])
            return out + [1.0]
        return [0.0, 1.0]

    # transformations

    def reverse(self) -> "OperatorPath":
        grid = tuple(1.0 - t for t in reversed(self.t_grid))
        if self.kind == "linear":
            D0, A = self.data
            return OperatorPath(self.algebra, "linear", (D0 + A, -A), grid)
        if self.kind == "conjugation":
            return OperatorPath(self.algebra, "conjugation", (self.at(1.0), -self.data[1]), grid)
        if self.kind == "sampled":
            return OperatorPath(self.algebra, "sampled", tuple(reversed(self.data)), grid)
        return OperatorPath(self.algebra, "composite",
                            tuple(p.reverse() for p in reversed(self.data)), grid)

    def conjugated(self, u: AlgebraElement) -> "OperatorPath":
        """The path ``t -> u* D_t u`` for a fixed unitary ``u``."""
        if self.kind == "composite":
            data = tuple(p.conjugated(u) for p in self.data)
        else:
            data = tuple(u.H @ e @ u for e in self.data)
        return OperatorPath(self.algebra, self.kind, data, self.t_grid)

    # persistence

    def to_json(self):
        grid = list(self.t_grid)
        if self.kind == "linear":
            return {"kind": "linear", "D0": element_to_json(self.data[0]),
                    "A": element_to_json(self.data[1]), "t_grid": grid}
        if self.kind == "conjugation":
            return {"kind": "conjugation", "D0": element_to_json(self.data[0]),
                    "H": element_to_json(self.data[1]), "t_grid": grid}
        if self.kind == "sampled":
            return {"kind": "sampled", "t_grid": grid,
                    "samples": [element_to_json(e) for e in self.data]}
        return {"kind": "composite", "t_grid": grid, "parts": [p.to_json() for p in self.data]}

    @classmethod
    def from_json(cls, obj):
        kind = obj["kind"]
        if "t_grid" in obj:
            grid = obj["t_grid"]
        else:
            grid = np.linspace(0.0, 1.0, int(obj.get("grid", 65)))
        if kind == "linear":
            return linear_path(element_from_json(obj["D0"]), element_from_json(obj["A"]), grid)
        if kind == "conjugation":
            return conjugation_path(element_from_json(obj["D0"]), element_from_json(obj["H"]), grid)
        if kind == "sampled":
            return sampled_path([element_from_json(e) for e in obj["samples"]], grid)
        if kind == "composite":
            return concat(*[cls.from_json(p) for p in obj["parts"]])
        raise ValueError(f"unknown path kind {kind!r}")

    @classmethod
    def load(cls, path):
        return cls.from_json(json.loads(Path(path).read_text()))


def _grid(grid):
    if isinstance(grid, (int, np.integer)):
        return tuple(np.linspace(0.0, 1.0, int(grid)))
    return tuple(grid)


def linear_path(D0, A, grid=65):
    return OperatorPath(D0.algebra, "linear", (D0, A), _grid(grid))


def conjugation_path(D0, H, grid=65):
    return OperatorPath(D0.algebra, "conjugation", (D0, H), _grid(grid))


def sampled_path(samples, grid=None):
    samples = list(samples)
    grid = np.linspace(0.0, 1.0, len(samples)) if grid is None else grid
    return OperatorPath(samples[0].algebra, "sampled", tuple(samples), _grid(grid))


def concat(*paths):
    """Traverse ``paths`` in order; junction endpoints must agree."""
    for p1, p2 in zip(paths[:-1], paths[1:]):
        if not p1.at(1.0).allclose(p2.at(0.0), atol=1e-10):
            raise ValueError("paths do not join: end of one differs from start of the next")
    n = len(paths)
    grid = sorted({(k + t) / n for k, p in enumerate(paths) for t in p.t_grid})
    return OperatorPath(paths[0].algebra, "composite", tuple(paths), tuple(grid))


def shift_path(K=20, weight=1.0, grid=65):
    """``D_t = diag(k - 1/2 + t : k = -K..K)``: one eigenvalue crosses zero upward."""
    alg = BlockAlgebra([(2 * K + 1, weight)])
    return linear_path(alg.diag(np.arange(-K, K + 1) - 0.5), alg.identity(), grid)


# -- crossing count ----------------------------------------------------------------


def _neg_trace(D):
    dec = eig_hermitian(D)
    return dec.weighted_count(lambda lam: lam < 0), dec.min_abs()


def crossing_sf(path: OperatorPath, zero_tol=1e-10, resolution=1e-3):
    """``tau(E_(-inf,0)(D_0)) - tau(E_(-inf,0)(D_1))``.

    The interior of ``t_grid`` is audited but the returned value never
    depends on it.  A sample with an eigenvalue within ``zero_tol`` of zero
    whose two neighbours have equal negative traces (a tangency, or two
    crossings the grid cannot separate) raises a ``RefinementWarning`` when
    the grid step there exceeds ``resolution``.
    """
    start, m0 = _neg_trace(path.at(0.0))
    end, m1 = _neg_trace(path.at(1.0))
    if m0 <= zero_tol or m1 <= zero_tol:
        raise EndpointKernel(f"endpoint eigenvalue within {zero_tol:g} of 0 "
                             f"(min |lambda| = {min(m0, m1):.3e})")
    grid = path.t_grid
    samples = [(start, m0)] + [_neg_trace(path.at(t)) for t in grid[1:-1]] + [(end, m1)]
    for j in range(1, len(grid) - 1):
        step = max(grid[j] - grid[j - 1], grid[j + 1] - grid[j])
        if samples[j][1] <= zero_tol and samples[j - 1][0] == samples[j + 1][0] and step > resolution:
            warnings.warn(f"eigenvalue near 0 at t={grid[j]:.6g} on grid step {step:.3g}; "
                          "refine t_grid to resolve a possible tangency", RefinementWarning)
    return float(start - end)


def _endpoint_min_eigs(path):
    return (eig_hermitian(path.at(0.0)).min_abs(), eig_hermitian(path.at(1.0)).min_abs())


# -- integrands ----------------------------------------------------------------------


def _diag_in_eigenbasis(dec, X):
    return [np.real(np.einsum("ji,jk,ki->i", v.conj(), b, v)) for v, b in zip(dec.eigenvectors, X.blocks)]


def unbounded_integrand(D, Ddot, m):
    """``tau(Ddot (1 + D^2)^{-m})``."""
    dec = eig_hermitian(D)
    diag = _diag_in_eigenbasis(dec, Ddot)
    return float(sum(w * np.sum(d * (1.0 + lam * lam) ** (-m))
                     for w, d, lam in zip(D.algebra.weights, diag, dec.eigenvalues)))


def _phi(t):
    return t / np.sqrt(1.0 + t * t)


def _phi_frechet(dec, Ddot):
    """Daleckii-Krein derivative of ``phi`` at ``D`` in direction ``Ddot``."""
    out = []
    for lam, v, b in zip(dec.eigenvalues, dec.eigenvectors, Ddot.blocks):
        li, lj = lam[:, None], lam[None, :]
        diff = li - lj
        close = np.abs(diff) <= 1e-8 * (1.0 + np.abs(li))
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = np.where(close, 0.0, (_phi(li) - _phi(lj)) / np.where(close, 1.0, diff))
        mid = 0.5 * (li + lj)
        gamma = np.where(close, (1.0 + mid * mid) ** -1.5, gamma)
        out.append(v @ (gamma * (v.conj().T @ b @ v)) @ v.conj().T)
    return AlgebraElement(Ddot.algebra, out)


def bounded_integrand(path, t, q, derivative="dk", h=1e-5):
    """``tau(F'_t (1 - F_t^2)^{(q-1)/2})`` with ``F_t = phi(D_t)``.

    ``derivative="dk"`` differentiates ``phi`` by the Daleckii-Krein formula,
    ``"fd"`` by a central difference of ``phi(D_{t +- h})`` (one-sided
    within ``h`` of an endpoint).
    """
    n = 0.5 * (q - 1.0)
    D = path.at(t)
    dec = eig_hermitian(D)
    F = dec.apply(_phi)
    if derivative == "dk":
        Fdot = _phi_frechet(dec, path.tangent(t))
    elif derivative == "fd":
        lo, hi = max(t - h, 0.0), min(t + h, 1.0)
        Fdot = (eig_hermitian(path.at(hi)).apply(_phi) - eig_hermitian(path.at(lo)).apply(_phi)) / (hi - lo)
    else:
        raise ValueError(f"unknown derivative mode {derivative!r}")
    one = D.algebra.identity()
    weight = eig_hermitian(one - F @ F).apply(lambda s: np.maximum(s, 0.0) ** n)
    return float(np.real(trace(Fdot @ weight)))


# -- integral routes ---------------------------------------------------------------


@dataclass
class SpectralFlowResult:
    crossing_sf: float
    integral_sf: float
    method_params: dict
    quad_error_estimate: float
    endpoint_min_eigs: tuple
    numerator: float = 0.0
    constant: float = 1.0
    consistency_delta: float | None = None
    warnings: list = field(default_factory=list)

    def to_json(self):
        return {
            "crossing_sf": self.crossing_sf,
            "integral_sf": self.integral_sf,
            "method_params": self.method_params,
            "quad_error_estimate": self.quad_error_estimate,
            "endpoint_min_eigs": list(self.endpoint_min_eigs),
            "numerator": self.numerator,
            "constant": self.constant,
            "consistency_delta": self.consistency_delta,
            "warnings": list(self.warnings),
        }


def _integrate(path, g, quad):
    """Integrate ``g`` over ``[0, 1]``, split at the path's breakpoints."""
    pts = path.breakpoints()
    total, err, intervals, evals = 0.0, 0.0, 0, 0
    share = QuadratureSpec(quad.tol / (len(pts) - 1), quad.max_intervals, quad.initial_intervals)
    for lo, hi in zip(pts[:-1], pts[1:]):
        # shrink the ends a hair so piecewise tangents are taken inside the segment
        eps = 0.0 if path.kind in ("linear", "conjugation") else 1e-15 * (hi - lo)
        r = adaptive_simpson(g, lo + eps, hi - eps, share)
        total += r.value
        err += r.error
        intervals += r.intervals
        evals += r.evaluations
    return total, err, intervals, evals


def _crossing_or_nan(path, zero_tol, notes):
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RefinementWarning)
            sf = crossing_sf(path, zero_tol)
        notes.extend(str(w.message) for w in caught)
        return sf
    except EndpointKernel as exc:
        notes.append(str(exc))
        return float("nan")


def integral_sf_unbounded(path: OperatorPath, m=2.0, quad: QuadratureSpec = QuadratureSpec(),
                          zero_tol=1e-10):
    """``(1/Ct_m) int_0^1 tau(D'_t (1 + D_t^2)^{-m}) dt``."""
    if not m > 1:
        raise ValueError(f"need m > 1, got {m}")
    g = lambda t: unbounded_integrand(path.at(t), path.tangent(t), m)
    num, err, intervals, evals = _integrate(path, g, quad)
    c = unbounded_constant(m)
    notes = []
    sf = _crossing_or_nan(path, zero_tol, notes)
    params = {"method": "unbounded", "m": m, "rule": "adaptive_simpson", "tol": quad.tol,
              "intervals": intervals, "evaluations": evals, "grid": len(path.t_grid)}
    return SpectralFlowResult(sf, num / c, params, err, _endpoint_min_eigs(path), num, c,
                              warnings=notes)


def integral_sf_bounded(path: OperatorPath, q=3.0, quad: QuadratureSpec = QuadratureSpec(),
                        derivative="dk", h=1e-5, zero_tol=1e-10, compare=True):
    """``(1/C_n) int_0^1 tau(F'_t (1 - F_t^2)^n) dt`` with ``n = (q-1)/2``.

    With ``compare`` the unbounded route at ``m = q/2 + 1`` is run as well and
    the difference is stored in ``consistency_delta``.
    """
    if not q > 1:
        raise ValueError(f"need q > 1, got {q}")
    n = 0.5 * (q - 1.0)
    g = lambda t: bounded_integrand(path, t, q, derivative, h)
    num, err, intervals, evals = _integrate(path, g, quad)
    c = bounded_constant(n)
    notes = []
    sf = _crossing_or_nan(path, zero_tol, notes)
    params = {"method": "bounded", "q": q, "n": n, "derivative": derivative,
              "rule": "adaptive_simpson", "tol": quad.tol, "intervals": intervals,
              "evaluations": evals, "grid": len(path.t_grid)}
    if derivative == "fd":
        params["h"] = h
    delta = None
    if compare:
        other = integral_sf_unbounded(path, q / 2 + 1.0, quad, zero_tol)
        delta = num / c - other.integral_sf
        err = err + other.quad_error_estimate
    return SpectralFlowResult(sf, num / c, params, err, _endpoint_min_eigs(path), num, c, delta, notes)


def verify_diff_formula(path: OperatorPath, n, t, h):
    """``|tau((phi(D_{t+h}) - phi(D_{t-h}))/(2h) (1-phi(D_t)^2)^n) - tau(D'_t (1+D_t^2)^{-n-3/2})|``."""
    if h < 1e-8:
        raise StepTooSmall(f"step {h:g} below 1e-8 loses the derivative to cancellation")
    if t - h < 0.0 or t + h > 1.0:
        raise ValueError(f"t +- h must stay inside [0, 1] (t={t}, h={h})")
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    D = path.at(t)
    F = eig_hermitian(D).apply(_phi)
    Fd = (eig_hermitian(path.at(t + h)).apply(_phi) - eig_hermitian(path.at(t - h)).apply(_phi)) / (2 * h)
    one = D.algebra.identity()
    weight = eig_hermitian(one - F @ F).apply(lambda s: np.maximum(s, 0.0) ** n)
    lhs = float(np.real(trace(Fd @ weight)))
    rhs = unbounded_integrand(D, path.tangent(t), n + 1.5)
    return abs(lhs - rhs)


# -- exact potential and one-forms --------------------------------------------------


def g_potential(u, m):
    """``g_m(u) = int_0^u (1 + s^2)^{-m} ds`` (vectorized over ``u``)."""
    u = np.asarray(u, dtype=float)
    if not m > 0.5:
        raise ValueError(f"need m > 1/2, got {m}")
    if m == 1:
        return np.arctan(u)
    if m == 1.5:
        return u / np.sqrt(1.0 + u * u)
    if m == 2:
        return u / (2.0 * (1.0 + u * u)) + 0.5 * np.arctan(u)
    f = lambda s: (1.0 + s * s) ** (-m)
    flat = [integrate.quad(f, 0.0, float(v), epsabs=1e-13, epsrel=1e-13, limit=200)[0]
            for v in u.ravel()]
    return np.asarray(flat).reshape(u.shape)


def eta_potential(D: AlgebraElement, m):
    """``tau(g_m(D))``; differences along a path give the exact unbounded integral."""
    dec = eig_hermitian(D)
    return float(sum(w * np.sum(g_potential(lam, m)) for w, lam in zip(D.algebra.weights, dec.eigenvalues)))


def alpha_form(D, A, m):
    """``tau(A (1 + D^2)^{-m}) / Ct_m``."""
    return unbounded_integrand(D, A, m) / unbounded_constant(m)


def theta_form(F0, X, q):
    """``tau(X (1 - F0^2)^{(q-1)/2}) / C_{(q-1)/2}``."""
    if not q > 0:
        raise ValueError(f"need q > 0, got {q}")
    n = 0.5 * (q - 1.0)
    one = F0.algebra.identity()
    weight = eig_hermitian(hermitian(one - F0 @ F0)).apply(lambda s: np.maximum(s, 0.0) ** n)
    return float(np.real(trace(X @ weight))) / bounded_constant(n)
