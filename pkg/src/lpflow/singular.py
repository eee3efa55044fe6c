"""Generalized singular value functions and submajorization.

For ``x`` in a block algebra, ``mu_s(x)`` is a decreasing step function on
``[0, tau(1))``: every singular value of block ``k`` occupies an interval of
length ``c_k``.  Partial integrals of step functions are piecewise linear,
so comparing them on the merged breakpoint grid is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, singular_values

__all__ = ["SingularValueFunction", "mu", "submajorizes", "dominates_dilated"]


@dataclass(frozen=True)
class SingularValueFunction:
    """Nonincreasing step function given as ``(width, value)`` pairs."""

    widths: tuple
    values: tuple

    def __init__(self, steps):
        steps = [(float(w), float(v)) for w, v in steps]
        for w, v in steps:
            if not w > 0:
                raise ValueError(f"step width must be positive, got {w}")
            if v < 0:
                raise ValueError(f"step value must be nonnegative, got {v}")
        for (_, a), (_, b) in zip(steps, steps[1:]):
            if b > a:
                raise ValueError("step values must be nonincreasing")
        object.__setattr__(self, "widths", tuple(w for w, _ in steps))
        object.__setattr__(self, "values", tuple(v for _, v in steps))

    @property
    def steps(self):
        return list(zip(self.widths, self.values))

    @property
    def domain_end(self):
        return float(sum(self.widths))

    def breakpoints(self):
        return np.cumsum(self.widths)

    def __call__(self, s):
        """Right-continuous evaluation; zero beyond the domain."""
        ends = self.breakpoints()
        i = int(np.searchsorted(ends, s, side="right"))
        return self.values[i] if i < len(self.values) else 0.0

    def partial_integral(self, t):
        """``int_0^t mu_s ds``."""
        total, start = 0.0, 0.0
        for w, v in zip(self.widths, self.values):
            if t <= start:
                break
            total += v * (min(t, start + w) - start)
            start += w
        return total

    def partial_integrals(self, grid):
        """Vectorized :meth:`partial_integral` over an increasing grid."""
        ends = np.concatenate([[0.0], self.breakpoints()])
        cum = np.concatenate([[0.0], np.cumsum(np.multiply(self.widths, self.values))])
        vals = np.concatenate([self.values, [0.0]])
        grid = np.asarray(grid, dtype=float)
        i = np.searchsorted(ends, grid, side="right") - 1
        i = np.clip(i, 0, len(ends) - 1)
        return cum[i] + vals[i] * (grid - ends[i])

    def integral_power(self, p):
        """``int_0^inf mu_s^p ds``."""
        return float(sum(w * v ** p for w, v in zip(self.widths, self.values)))

    def scaled(self, c):
        """The function ``c * mu``."""
        if c < 0:
            raise ValueError("scale must be nonnegative")
        if c == 0:
            return SingularValueFunction([(self.domain_end, 0.0)])
        return SingularValueFunction([(w, c * v) for w, v in self.steps])

    def stretched(self, factor):
        """``s -> mu_{s/factor}``; ``factor=2`` gives ``s -> mu_{s/2}``."""
        return SingularValueFunction([(factor * w, v) for w, v in self.steps])

    def map_values(self, f):
        """``f(mu)`` for an increasing ``f`` with ``f(0) >= 0``."""
        return SingularValueFunction([(w, float(f(v))) for w, v in self.steps])

    def to_json(self):
        return {"steps": [[w, v] for w, v in self.steps]}

    @classmethod
    def from_json(cls, obj):
        return cls([tuple(s) for s in obj["steps"]])


def _canonical_steps(pairs):
    pairs = sorted(pairs, key=lambda r: -r[1])
    steps = []
    for w, v in pairs:
        if steps and steps[-1][1] == v:
            steps[-1][0] += w
        else:
            steps.append([w, v])
    return [tuple(s) for s in steps]


def mu(x: AlgebraElement) -> SingularValueFunction:
    """Generalized singular value function of ``x``."""
    pairs = []
    for s, w in zip(singular_values(x), x.algebra.weights):
        pairs.extend((w, float(v)) for v in s)
    return SingularValueFunction(_canonical_steps(pairs))


def _grid(*fns):
    pts = np.unique(np.concatenate([f.breakpoints() for f in fns]))
    return pts[pts > 0]


def submajorizes(y: SingularValueFunction, x: SingularValueFunction, tol: float = 0.0):
    """Decide ``x << y`` (``x`` submajorized by ``y``).

    Returns ``(holds, margin)`` where ``margin`` is the minimum over all
    breakpoints of ``int_0^t mu(y) - int_0^t mu(x)``; past the last
    breakpoint both partial integrals are constant, so the last grid point
    also covers ``t -> inf``.
    """
    grid = _grid(x, y)
    if grid.size == 0:
        return True, 0.0
    diff = y.partial_integrals(grid) - x.partial_integrals(grid)
    margin = float(np.min(diff))
    return margin >= -tol, margin


def dominates_dilated(x: SingularValueFunction, y: SingularValueFunction, factor=2.0, tol=0.0):
    """Check ``mu_s(x) <= mu_{s/factor}(y)`` pointwise.

    Both sides are right-continuous step functions, so it is enough to
    compare them at the left end of every cell of the merged grid.
    Returns ``(holds, margin, s_worst)``.
    """
    ys = y.stretched(factor)
    cells = np.concatenate([[0.0], _grid(x, ys)])
    cells = cells[cells < x.domain_end]
    margin, worst = np.inf, 0.0
    for s in cells:
        gap = ys(s) - x(s)
        if gap < margin:
            margin, worst = gap, float(s)
    if not np.isfinite(margin):
        margin = 0.0
    return margin >= -tol, float(margin), worst
