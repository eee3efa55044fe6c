import numpy as np
import pytest

from lpflow.errors import QuadratureFailure
from lpflow.quadrature import QuadratureSpec, adaptive_simpson


def test_cubic_is_exact_after_one_split():
    r = adaptive_simpson(lambda t: 4 * t ** 3 - t + 2, 0.0, 2.0)
    assert r.value == pytest.approx(18.0, abs=1e-13)
    assert r.intervals == 8 and r.error < 1e-13


def test_coarse_coincidence_is_not_accepted():
    # vanishes at every node of the single initial panel, so S1 == S2 == 0 there
    f = lambda t: np.sin(4 * np.pi * t) ** 2
    r = adaptive_simpson(f, 0.0, 1.0, QuadratureSpec(1e-8, initial_intervals=1))
    assert r.value == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("tol", [1e-6, 1e-8, 1e-10])
def test_meets_tolerance(tol):
    r = adaptive_simpson(np.sin, 0.0, np.pi, QuadratureSpec(tol))
    assert abs(r.value - 2.0) <= tol
    assert r.error <= tol


def test_adapts_to_a_peak():
    f = lambda t: 1.0 / (1e-4 + t * t)
    r = adaptive_simpson(f, -1.0, 1.0, QuadratureSpec(1e-8))
    assert r.value == pytest.approx(2 * np.arctan(100.0) / 1e-2, rel=1e-9)


def test_function_values_are_cached():
    calls = []
    adaptive_simpson(lambda t: calls.append(t) or np.exp(t), 0.0, 1.0)
    assert len(calls) == len(set(calls))


def test_failures():
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda t: abs(t - 0.1234) ** -0.5, -1.0, 1.0, QuadratureSpec(1e-10, max_intervals=64))
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda t: np.nan, 0.0, 1.0)
    with pytest.raises(ValueError):
        adaptive_simpson(np.sin, 1.0, 1.0)
