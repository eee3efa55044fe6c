"""Operator inequalities and spectral flow on finite traced block algebras."""

__version__ = "0.1.0"

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    abs_op,
    eig_hermitian,
    func_calc,
    hermitian,
    op_norm,
    phi_map,
    resolvent_half,
    schatten_norm,
    sgn_op,
    trace,
)
from .errors import LpflowError, NumericalFailure
from .reports import InequalityReport
from .schur import estimate_Kp, schur_transform, spectral_projection_family
from .singular import SingularValueFunction, mu, submajorizes

__all__ = [
    "AlgebraElement",
    "BlockAlgebra",
    "InequalityReport",
    "LpflowError",
    "NumericalFailure",
    "SingularValueFunction",
    "abs_op",
    "eig_hermitian",
    "estimate_Kp",
    "func_calc",
    "hermitian",
    "mu",
    "op_norm",
    "phi_map",
    "resolvent_half",
    "schatten_norm",
    "schur_transform",
    "sgn_op",
    "spectral_projection_family",
    "submajorizes",
    "trace",
]
