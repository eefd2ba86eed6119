"""Representer-theorem toolkit for Hilbert-space-valued learning.

Finite-dimensional Hilbert spaces and operators, subspace-valued maps,
orthomonotone regularizers, and kernel/feature learners whose solutions are
verified to lie in the predicted representer span.
"""

from .hilbert import SpaceSpec, SubspaceBasis, orthonormalize, orth_complement, project
from .kernels import KernelSpec, gram, kernel_eval
from .operators import OperatorRep, adjoint, evaluation_operator, explicit_basis_operator, derivative_operator
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "SpaceSpec",
    "SubspaceBasis",
    "orthonormalize",
    "orth_complement",
    "project",
    "KernelSpec",
    "gram",
    "kernel_eval",
    "OperatorRep",
    "adjoint",
    "evaluation_operator",
    "explicit_basis_operator",
    "derivative_operator",
    "Verdict",
]
