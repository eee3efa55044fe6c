import numpy as np
import pytest
from hypothesis import given

from conftest import layouts, seeds
from lpflow.algebra import BlockAlgebra, abs_op, schatten_norm
from lpflow.ensembles import gen_general, gen_psd
from lpflow.singular import SingularValueFunction, dominates_dilated, mu, submajorizes


def test_mu_examples():
    assert mu(BlockAlgebra([(2, 1.0)]).diag([3, -4])).steps == [(1.0, 4.0), (1.0, 3.0)]
    alg = BlockAlgebra([(1, 0.5), (1, 2.0)])
    assert mu(alg.diag([5, 2])).steps == [(0.5, 5.0), (2.0, 2.0)]


def test_equal_values_merge_across_blocks():
    alg = BlockAlgebra([(1, 0.5), (1, 2.0)])
    assert mu(alg.diag([3, 3])).steps == [(2.5, 3.0)]


def test_validation():
    with pytest.raises(ValueError):
        SingularValueFunction([(0.0, 1.0)])
    with pytest.raises(ValueError):
        SingularValueFunction([(1.0, 1.0), (1.0, 2.0)])
    with pytest.raises(ValueError):
        SingularValueFunction([(1.0, -1.0)])


def test_evaluation_and_integrals():
    f = SingularValueFunction([(1.0, 4.0), (2.0, 1.0)])
    assert f(0) == 4.0 and f(0.999) == 4.0 and f(1.0) == 1.0 and f(3.0) == 0.0
    assert f.partial_integral(2.0) == 5.0
    np.testing.assert_allclose(f.partial_integrals([0.5, 1.0, 2.0, 10.0]), [2.0, 4.0, 5.0, 6.0])
    assert f.integral_power(2) == 18.0
    assert f.stretched(2.0)(1.5) == 4.0


def test_json_round_trip():
    f = SingularValueFunction([(0.5, 5.0), (2.0, 2.0)])
    assert f.to_json() == {"steps": [[0.5, 5.0], [2.0, 2.0]]}
    assert SingularValueFunction.from_json(f.to_json()) == f


def test_submajorizes_examples():
    x = SingularValueFunction([(1.0, 1.0)])
    y = SingularValueFunction([(1.0, 2.0)])
    assert submajorizes(y, x) == (True, 1.0)
    assert submajorizes(x, x) == (True, 0.0)
    ok, margin = submajorizes(x, y)
    assert not ok and margin == -1.0


def test_submajorization_is_not_pointwise():
    # equal total mass spread differently: a flatter profile is submajorized
    flat = SingularValueFunction([(2.0, 1.0)])
    peak = SingularValueFunction([(1.0, 2.0)])
    assert submajorizes(peak, flat)[0]
    assert not submajorizes(flat, peak)[0]


def test_dilated_domination():
    x = SingularValueFunction([(2.0, 1.0)])
    y = SingularValueFunction([(1.0, 1.0)])
    ok, margin, _ = dominates_dilated(x, y, 2.0)
    assert ok and margin == 0.0
    ok, _, s = dominates_dilated(x, y, 1.0)
    assert not ok and s == 1.0


@given(layouts, seeds)
def test_mu_integrates_to_trace(alg, seed):
    x = gen_general(alg, 1.0, seed)
    m = mu(x)
    assert m.domain_end == pytest.approx(alg.total_trace)
    for p in (1, 2, 3):
        assert m.integral_power(p) == pytest.approx(schatten_norm(x, p) ** p, rel=1e-9)


@given(layouts, seeds)
def test_mu_adjoint_and_modulus(alg, seed):
    x = gen_general(alg, 1.0, seed)
    a, b, c = mu(x), mu(x.H), mu(abs_op(x))
    for other in (b, c):
        assert len(other.steps) == len(a.steps)
        np.testing.assert_allclose(other.values, a.values, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(other.widths, a.widths)


@given(layouts, seeds)
def test_submajorization_transitive(alg, seed):
    rng = np.random.default_rng(seed)
    fs = sorted((mu(gen_psd(alg, 1.0, rng)) for _ in range(3)), key=lambda f: f.integral_power(1))
    pairs = [submajorizes(fs[1], fs[0])[0], submajorizes(fs[2], fs[1])[0]]
    if all(pairs):
        assert submajorizes(fs[2], fs[0])[0]
