"""Adaptive composite Simpson rule for smooth scalar integrands on an interval."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import QuadratureFailure

__all__ = ["QuadratureSpec", "QuadratureResult", "adaptive_simpson"]


@dataclass(frozen=True)
class QuadratureSpec:
    tol: float = 1e-8
    max_intervals: int = 2 ** 14
    initial_intervals: int = 4

    def to_json(self):
        return {"tol": self.tol, "max_intervals": self.max_intervals,
                "initial_intervals": self.initial_intervals}


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    intervals: int
    evaluations: int


def _simpson(fa, fm, fb, h):
    return h * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f, a, b, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``spec.tol``.

    Each panel compares Simpson on the whole panel (``S1``) with Simpson on
    its halves (``S2``) and takes ``e = |S2 - S1|/15`` as its error.  A
    small ``e`` can be a coincidence on a coarse panel, so the panel is also
    held to ``e_parent/32``, what the parent's error predicts under the
    ``h^5`` rate; initial panels have no parent and are always split once.
    A panel is accepted when the larger of the two is below its share of
    the tolerance, proportional to its length.  Accepted panels contribute
    the Richardson value ``S2 + (S2 - S1)/15``; the returned error estimate
    is the sum of the accepted bounds.
    """
    if not b > a:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    cache = {}

    def F(t):
        if t not in cache:
            v = float(f(t))
            if not math.isfinite(v):
                raise QuadratureFailure(f"integrand is {v} at t={t:.17g}")
            cache[t] = v
        return cache[t]

    length = b - a
    n0 = max(1, spec.initial_intervals)
    edges = [a + (b - a) * i / n0 for i in range(n0)] + [b]
    stack = [(lo, hi, math.inf) for lo, hi in zip(edges[:-1], edges[1:])][::-1]
    total, err, accepted = 0.0, 0.0, 0
    while stack:
        lo, hi, parent = stack.pop()
        h = hi - lo
        mid = 0.5 * (lo + hi)
        q1, q3 = 0.5 * (lo + mid), 0.5 * (mid + hi)
        s1 = _simpson(F(lo), F(mid), F(hi), h)
        s2 = _simpson(F(lo), F(q1), F(mid), 0.5 * h) + _simpson(F(mid), F(q3), F(hi), 0.5 * h)
        e = abs(s2 - s1) / 15.0
        bound = max(e, parent / 32.0)
        if bound <= spec.tol * h / length or h <= length * 2.0 ** -52:
            total += s2 + (s2 - s1) / 15.0
            err += e if math.isinf(bound) else bound
            accepted += 1
            continue
        if accepted + len(stack) + 2 > spec.max_intervals:
            raise QuadratureFailure(
                f"adaptive Simpson exceeded {spec.max_intervals} intervals "
                f"(panel [{lo:.6g}, {hi:.6g}] error {e:.3e})")
        stack.append((mid, hi, e))
        stack.append((lo, mid, e))
    if err > spec.tol:
        raise QuadratureFailure(f"error estimate {err:.3e} exceeds tolerance {spec.tol:g}")
    return QuadratureResult(total, err, accepted, len(cache))
