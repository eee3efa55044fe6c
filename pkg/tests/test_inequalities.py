import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import layouts, seeds
from lpflow.algebra import AlgebraElement, BlockAlgebra
from lpflow.ensembles import (
    gen_commuting_positive,
    gen_hermitian,
    gen_order_pair,
    gen_psd,
)
from lpflow.errors import BadExponent, NotCommuting, NotPSD, OrderViolation, SupportDeficient
from lpflow.inequalities import (
    MONOTONE_FAMILY,
    SQRT8,
    derived_constants,
    kcal,
    transfer_constant,
    verify_25,
    verify_A2,
    verify_bks,
    verify_corA1,
    verify_lemmaA1,
    verify_prop02,
    verify_thm03i,
    verify_thm03ii,
    zconst,
    zprime,
)
from lpflow.schur import ConstantEstimate

SCALAR = BlockAlgebra([(1, 1.0)])


def test_constant_chain():
    assert kcal(1.0) == 4.0
    assert zprime(1.0) == pytest.approx(4.0 + SQRT8 + 1.0)
    assert zconst(1.0) == pytest.approx(4.0 + 2 * (SQRT8 + 1.0))
    assert transfer_constant(0.0, 1.0) == pytest.approx(3.8284271, abs=1e-7)
    assert transfer_constant(0.0, 1.0, "from_phi") == transfer_constant(0.0, 1.0, "to_phi")
    with pytest.raises(ValueError):
        transfer_constant(1.0, 1.0, "sideways")


def test_derived_constants_share_witness():
    est = ConstantEstimate("K_p", 3.0, 1.5, 10, 0, {"k": 1})
    out = {c.name: c for c in derived_constants(est)}
    assert out["K_cal_p"].value == 5.0
    assert out["Z_p'"].max_witness == {"k": 1}
    assert out["C_p_251"].value == SQRT8


def test_eq25_scalar_example():
    # x = 0, a = -1: y = 1, lhs = 2^{-1/2}, rhs = 2^{3/2} * 1 * h(1)
    r = verify_25(SCALAR.diag([0.0]), SCALAR.diag([-1.0]), 2.0)
    assert r.lhs == pytest.approx(0.7071067811865476)
    assert r.rhs == pytest.approx(2.8284271247461903)
    assert r.passed


def test_bks_example():
    # a = 4, b = 1: |2 - 1| = 1 against |3|^{1/2}
    r = verify_bks(SCALAR.diag([4.0]), SCALAR.diag([1.0]), p=2.0)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(np.sqrt(3.0))
    assert r.passed


def test_bks_rejects_indefinite():
    with pytest.raises(NotPSD):
        verify_bks(SCALAR.diag([-1.0]), SCALAR.diag([1.0]))


def test_A2_scalar_example():
    # x = 0, a = -1: |1/2 - 1|^{1/2} = 2^{-1/2} against 2 * sqrt(2) * 1
    r = verify_A2(SCALAR.diag([0.0]), SCALAR.diag([-1.0]), p=2.0)
    assert r.lhs == pytest.approx(2 ** -0.5)
    assert r.rhs == pytest.approx(2 * np.sqrt(2.0))
    assert r.details["sandwich_ok"] and r.passed


def test_order_is_enforced():
    with pytest.raises(OrderViolation):
        verify_lemmaA1(SCALAR.diag([2.0]), SCALAR.diag([1.0]))


def test_support_and_commuting_are_enforced():
    alg = BlockAlgebra([(3, 1.0)])
    x, a = gen_hermitian(alg, 1.0, 0), gen_hermitian(alg, 1.0, 1)
    with pytest.raises(SupportDeficient):
        verify_thm03ii(x, a, alg.diag([1.0, 1.0, 0.0]), 2.0, 1.0)
    with pytest.raises(NotCommuting):
        verify_thm03ii(x, a, gen_psd(alg, 1.0, 2) + alg.identity(), 2.0, 1.0)
    with pytest.raises(BadExponent):
        verify_thm03i(x, a, 1.0, 1.0)


@given(layouts, seeds, st.sampled_from([1.5, 2.0, 3.0, 10.0]))
def test_main_estimates_hold_with_p2_constant(alg, seed, p):
    rng = np.random.default_rng(seed)
    x = gen_hermitian(alg, 2.0, rng)
    a = gen_hermitian(alg, 0.5, rng)
    r1, r2 = verify_thm03i(x, a, p, 1.0)
    assert r1.passed and r2.passed
    r3 = verify_thm03ii(x, a, gen_commuting_positive(x, rng), p, 1.0)
    assert r3.passed


@given(layouts, seeds, st.sampled_from([1.0, 2.0, 10.0]))
def test_order_consequences(alg, seed, p):
    x, y = gen_order_pair(alg, 1.0, seed)
    assert verify_lemmaA1(x, y, p).passed
    for f in MONOTONE_FAMILY:
        assert verify_corA1(x, y, f, p).passed


@given(layouts, seeds, st.sampled_from([1.0, 3.0]))
def test_A2_and_bks_hold(alg, seed, p):
    rng = np.random.default_rng(seed)
    assert verify_A2(gen_hermitian(alg, 2.0, rng), gen_hermitian(alg, 1.0, rng), p).passed
    assert verify_bks(gen_psd(alg, 1.0, rng), gen_psd(alg, 1.0, rng), p).passed


@given(layouts, seeds, st.floats(0.1, 10.0))
def test_bks_scale_covariance(alg, seed, c):
    # both sides scale by c^{1/2}
    rng = np.random.default_rng(seed)
    a, b = gen_psd(alg, 1.0, rng), gen_psd(alg, 1.0, rng)
    r1, r2 = verify_bks(a, b), verify_bks(c * a, c * b)
    assert r2.lhs == pytest.approx(np.sqrt(c) * r1.lhs, rel=1e-7, abs=1e-12)
    assert r2.rhs == pytest.approx(np.sqrt(c) * r1.rhs, rel=1e-7, abs=1e-12)


@given(layouts, seeds)
def test_bks_symmetric_in_its_arguments(alg, seed):
    rng = np.random.default_rng(seed)
    a, b = gen_psd(alg, 1.0, rng), gen_psd(alg, 1.0, rng)
    r1, r2 = verify_bks(a, b, 2.0), verify_bks(b, a, 2.0)
    assert r1.details["lp_lhs"] == pytest.approx(r2.details["lp_lhs"], rel=1e-10)
    assert r1.details["lp_rhs"] == pytest.approx(r2.details["lp_rhs"], rel=1e-10)


@given(layouts, seeds)
def test_thm03ii_homogeneous_in_z(alg, seed):
    rng = np.random.default_rng(seed)
    x, a = gen_hermitian(alg, 1.0, rng), gen_hermitian(alg, 1.0, rng)
    z = gen_commuting_positive(x, rng)
    r1, r2 = verify_thm03ii(x, a, z, 3.0, 1.0), verify_thm03ii(x, a, 3.0 * z, 3.0, 1.0)
    assert r2.lhs == pytest.approx(3.0 * r1.lhs, rel=1e-10)
    assert r2.ratio == pytest.approx(r1.ratio, rel=1e-10)


def test_prop02_marks_claimed_range():
    alg = BlockAlgebra([(3, 1.0)])
    x, a = gen_hermitian(alg, 1.0, 0), gen_hermitian(alg, 1.0, 1)
    t = gen_commuting_positive(x, 2)
    assert verify_prop02(x, a, t, 1.5).details["claimed"]
    assert not verify_prop02(x, a, t, 3.0).details["claimed"]
    diag = AlgebraElement(alg, [np.diag([1.0, 2.0, 3.0])])
    assert verify_prop02(diag, 0.5 * alg.identity(), alg.identity(), 2.0, "sin").passed


def test_commuting_diagonal_example():
    # entrywise ||s| - |t|| <= |s - t| already gives the bound with constant 1
    alg = BlockAlgebra([(3, 1.0)])
    x, a = alg.diag([2.0, -1.0, 0.5]), alg.diag([3.0, -0.5, 0.2])
    r_abs, _ = verify_thm03i(x, a, 2.0, 1.0)
    from lpflow.algebra import op_norm, resolvent_half, schatten_norm
    assert r_abs.lhs <= op_norm(a) * schatten_norm(resolvent_half(x), 2.0)
    assert r_abs.passed


@given(layouts, seeds, st.sampled_from([1.0, 2.0, 3.0]))
def test_eq25_recentered(alg, seed, p):
    rng = np.random.default_rng(seed)
    x, a = gen_hermitian(alg, 2.0, rng), gen_hermitian(alg, 1.0, rng)
    assert verify_25(x, a, p).passed
    assert verify_25(x - a, -a, p).passed


@given(layouts, seeds)
def test_bks_margin_doubles_at_t2(alg, seed):
    # (t^2 a, t^2 b) scales both singular value functions by t
    rng = np.random.default_rng(seed)
    a, b = gen_psd(alg, 1.0, rng), gen_psd(alg, 1.0, rng)
    r1, r2 = verify_bks(a, b), verify_bks(4.0 * a, 4.0 * b)
    assert abs(r2.details["submajorization_margin"] - 2 * r1.details["submajorization_margin"]) <= 1e-9
