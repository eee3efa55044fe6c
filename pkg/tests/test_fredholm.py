import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import layouts, seeds
from lpflow.algebra import AlgebraElement, BlockAlgebra, phi_map
from lpflow.ensembles import gen_general, gen_hermitian, gen_invertible_hermitian, gen_symmetry, gen_unitary
from lpflow.errors import BadExponent, ConfigError, NotSymmetry
from lpflow.fredholm import (
    ModuleSpec,
    chern_character,
    chern_cyclicity_residual,
    check_corollary04,
    conjugation_residual,
    norm0,
    norm_p_phalf,
    phi_affine_image,
    phi_identity_residual,
    sgn_phi_residual,
    summability_profile,
    truncation_profile,
)

M2 = BlockAlgebra([(2, 1.0)])
SX = AlgebraElement(M2, [np.array([[0, 1], [1, 0]])])
SY = AlgebraElement(M2, [np.array([[0, -1j], [1j, 0]])])
F = M2.diag([1.0, -1.0])


def test_summability_example():
    prof = summability_profile(ModuleSpec(M2, M2.diag([3.0, -4.0]), 2.0, []))
    assert prof["unbounded"] == pytest.approx(np.sqrt(1 / 10 + 1 / 17), abs=1e-12)
    assert prof["unbounded"] == pytest.approx(0.3985, abs=1e-4)
    assert prof["equal"]


def test_truncations_grow_only_at_p1():
    p1 = [v for _, v in truncation_profile(1.0, [10, 100, 1000])]
    p2 = [v for _, v in truncation_profile(2.0, [10, 100, 1000])]
    assert p1[2] - p1[1] > 1.0
    assert p2[2] - p2[1] < 0.05


def test_spec_validation_and_round_trip(tmp_path):
    with pytest.raises(BadExponent):
        ModuleSpec(M2, F, 1.0, [])
    with pytest.raises(ConfigError):
        ModuleSpec(M2, F, 2.0, [2.0 * M2.identity()])
    m = ModuleSpec(M2, M2.diag([3.0, -4.0]), 4.0, [gen_unitary(M2, 0)])
    path = tmp_path / "m.json"
    import json
    path.write_text(json.dumps(m.to_json()))
    back = ModuleSpec.load(path)
    assert back.p == 4.0 and back.unitaries[0].allclose(m.unitaries[0], 0.0)


@given(layouts, seeds)
def test_identities(alg, seed):
    rng = np.random.default_rng(seed)
    D0 = gen_invertible_hermitian(alg, 3.0, rng)
    assert phi_identity_residual(D0) < 1e-12
    assert sgn_phi_residual(D0) < 1e-12
    assert conjugation_residual(D0, gen_unitary(alg, rng)) < 1e-12


@given(layouts, seeds, st.sampled_from([1.5, 2.0, 4.0]))
def test_corollary_chain(alg, seed, p):
    rng = np.random.default_rng(seed)
    m = ModuleSpec(alg, gen_invertible_hermitian(alg, 3.0, rng), p, [gen_unitary(alg, rng) for _ in range(2)])
    reports = check_corollary04(m, 1.0)
    names = [r.name for r in reports]
    assert names[:2] == ["cor04_factorization", "cor04_sgn_phi"]
    assert names[2:5] == ["cor04_conjugation", "cor04_triangle", "thm03i_phi"]
    assert len(reports) == 2 + 3 * 2
    assert all(r.passed for r in reports)


def test_norm0_example():
    D0 = M2.diag([1.0, -1.0])
    # ||sx|| = 1 and [D0, sx] = 2 [[0, 1], [-1, 0]]
    assert norm0(SX, D0) == pytest.approx(3.0)


def test_mixed_norm():
    X = M2.diag([1.0, 0.0])
    # X F + F X = diag(2, 0): ||X||_4 = 1, ||diag(2,0)||_2 = 2
    assert norm_p_phalf(X, F, 4.0) == pytest.approx(3.0)
    with pytest.raises(BadExponent):
        norm_p_phalf(X, F, 1.5, strict=True)


@given(layouts, seeds)
def test_affine_image(alg, seed):
    rng = np.random.default_rng(seed)
    D0, A = gen_hermitian(alg, 3.0, rng), gen_hermitian(alg, 0.5, rng)
    img = phi_affine_image(D0, A, 3.0, Kp=1.0)
    assert img.identity_residual < 1e-12
    assert img.X.allclose(phi_map(D0 + A) - phi_map(D0), 1e-14)
    assert img.report.passed


def test_chern_hand_examples():
    assert chern_character(F, [SX, SY]) == pytest.approx(-8j)
    assert chern_character(F, [SY, SX]) == pytest.approx(8j)
    assert chern_character(F, [SX, SX]) == pytest.approx(0)
    assert chern_cyclicity_residual(F, [SX, SY]) < 1e-14


def test_chern_validation():
    with pytest.raises(ValueError):
        chern_character(F, [SX])
    with pytest.raises(NotSymmetry):
        chern_character(2.0 * F, [SX, SY])


@given(layouts, seeds, st.sampled_from([2, 4]), st.floats(-2, 2))
def test_chern_multilinear_and_cyclic(alg, seed, k, c):
    rng = np.random.default_rng(seed)
    F0 = gen_symmetry(alg, rng)
    as_ = [gen_general(alg, 1.0, rng) for _ in range(k)]
    b = gen_general(alg, 1.0, rng)
    split = chern_character(F0, [as_[0] + c * b] + as_[1:])
    assert split == pytest.approx(chern_character(F0, as_) + c * chern_character(F0, [b] + as_[1:]), abs=1e-10)
    assert chern_cyclicity_residual(F0, as_) < 1e-9


@given(layouts, seeds)
def test_chern_vanishes_for_commuting_entry(alg, seed):
    rng = np.random.default_rng(seed)
    F0 = gen_symmetry(alg, rng)
    a = gen_general(alg, 1.0, rng)
    assert abs(chern_character(F0, [F0, a])) < 1e-10


def test_affine_image_scalar_example():
    one = BlockAlgebra([(1, 1.0)])
    img = phi_affine_image(one.diag([0.0]), one.diag([1.0]), 4.0)
    assert img.X.blocks[0][0, 0] == pytest.approx(2 ** -0.5)
    assert img.identity_residual < 1e-15


@given(layouts, seeds)
def test_affine_image_dense_cross_check(alg, seed):
    rng = np.random.default_rng(seed)
    D0, A = gen_hermitian(alg, 2.0, rng), gen_hermitian(alg, 1.0, rng)
    img = phi_affine_image(D0, A, 4.0, Kp=1.0)

    def dense_phi(m):
        w, v = np.linalg.eigh(m)
        return (v * (w / np.sqrt(1 + w * w))) @ v.conj().T

    d0, a = D0.to_dense(), A.to_dense()
    X = dense_phi(d0 + a) - dense_phi(d0)
    F0 = dense_phi(d0)

    def lp(m, p):
        out = 0.0
        for lo, (n, w) in zip(np.cumsum([0] + list(alg.sizes))[:-1], alg.blocks):
            s = np.linalg.svd(m[lo:lo + n, lo:lo + n], compute_uv=False)
            out += w * np.sum(s ** p)
        return out ** (1 / p)

    assert img.norm == pytest.approx(lp(X, 4.0) + lp(X @ F0 + F0 @ X, 2.0), rel=1e-10)
    assert img.report.passed
