"""JSON persistence for block algebra elements.

Matrix file layout::

    {"blocks": [{"size": n, "weight": w, "re": [[...]], "im": [[...]]}, ...]}

Rows are stored row-major; ``weight`` defaults to 1.0 and ``im`` to zero.
Floats are written with ``repr`` (shortest round-trip form), so a save/load
cycle is bit-exact.
"""

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra

__all__ = [
    "element_to_json",
    "element_from_json",
    "algebra_from_json",
    "save_element",
    "load_element",
    "digest_instance",
    "dumps",
]


def element_to_json(x: AlgebraElement) -> dict:
    blocks = []
    for (n, w), b in zip(x.algebra.blocks, x.blocks):
        blocks.append({
            "size": n,
            "weight": w,
            "re": [[float(v) for v in row] for row in b.real],
            "im": [[float(v) for v in row] for row in b.imag],
        })
    return {"blocks": blocks}


def algebra_from_json(obj) -> BlockAlgebra:
    """Accept either a matrix file or a bare list of ``{"size", "weight"}``."""
    blocks = obj["blocks"] if isinstance(obj, dict) else obj
    return BlockAlgebra([(b["size"], b.get("weight", 1.0)) for b in blocks])


def element_from_json(obj: dict) -> AlgebraElement:
    alg = algebra_from_json(obj)
    data = []
    for b in obj["blocks"]:
        re = np.array(b["re"], dtype=float).reshape(b["size"], b["size"])
        im = b.get("im")
        im = np.zeros_like(re) if im is None else np.array(im, dtype=float).reshape(re.shape)
        data.append(re + 1j * im)
    return AlgebraElement(alg, data)


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical compact JSON (sorted keys) used for all report output."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True, default=_plain)


def save_element(x: AlgebraElement, path) -> None:
    Path(path).write_text(json.dumps(element_to_json(x)))


def load_element(path) -> AlgebraElement:
    return element_from_json(json.loads(Path(path).read_text()))


def _feed_element(h, x: AlgebraElement):
    for (n, w), b in zip(x.algebra.blocks, x.blocks):
        h.update(struct.pack("<qd", n, w))
        h.update(np.ascontiguousarray(b, dtype="<c16").tobytes())


def digest_instance(name, p, params, elements) -> str:
    """SHA-256 over the exact bits of an inequality instance.

    ``params`` maps names to floats, ``elements`` names to algebra elements;
    both are hashed in sorted key order.
    """
    h = hashlib.sha256()
    h.update(name.encode())
    h.update(struct.pack("<d", float("nan") if p is None else float(p)))
    for k in sorted(params):
        v = params[k]
        h.update(k.encode())
        h.update(repr(v).encode() if isinstance(v, str) else struct.pack("<d", float(v)))
    for k in sorted(elements):
        h.update(k.encode())
        _feed_element(h, elements[k])
    return h.hexdigest()
