import json

import numpy as np

from lpflow.algebra import AlgebraElement, BlockAlgebra
from lpflow.ensembles import gen_general
from lpflow.io import digest_instance, dumps, element_from_json, element_to_json, load_element, save_element


def test_round_trip_is_bit_exact(tmp_path):
    alg = BlockAlgebra([(3, 0.1), (2, 2.5)])
    x = gen_general(alg, 1.7, 3)
    save_element(x, tmp_path / "x.json")
    y = load_element(tmp_path / "x.json")
    assert y.algebra == alg
    for a, b in zip(x.blocks, y.blocks):
        assert np.array_equal(a, b)


def test_defaults_for_weight_and_imaginary_part():
    obj = {"blocks": [{"size": 2, "re": [[1, 2], [2, 3]]}]}
    x = element_from_json(obj)
    assert x.algebra.blocks == ((2, 1.0),)
    assert np.array_equal(x.blocks[0], np.array([[1, 2], [2, 3]], dtype=complex))


def test_format_layout():
    x = BlockAlgebra([(1, 0.5)]).diag([2 + 1j])
    assert element_to_json(x) == {"blocks": [{"size": 1, "weight": 0.5, "re": [[2.0]], "im": [[1.0]]}]}


def test_digest_depends_on_every_bit():
    x = gen_general(BlockAlgebra([(2, 1.0)]), 1.0, 0)
    d = digest_instance("t", 2.0, {"Kp": 1.0}, {"x": x})
    assert d == digest_instance("t", 2.0, {"Kp": 1.0}, {"x": x})
    blocks = [b.copy() for b in x.blocks]
    blocks[0][0, 1] = np.nextafter(blocks[0][0, 1].real, np.inf) + 1j * blocks[0][0, 1].imag
    y = AlgebraElement(x.algebra, blocks)
    assert d != digest_instance("t", 2.0, {"Kp": 1.0}, {"x": y})
    assert d != digest_instance("t", 2.0, {"Kp": 1.0 + 2 ** -52}, {"x": x})
    assert d != digest_instance("t", None, {"Kp": 1.0}, {"x": x})


def test_dumps_is_canonical():
    assert dumps({"b": np.float64(1.5), "a": np.bool_(True)}) == '{"a":true,"b":1.5}'
    assert json.loads(dumps({"x": [1e-17]})) == {"x": [1e-17]}
