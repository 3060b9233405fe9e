"""Exact tools for the geometry and complexity of matrix multiplication."""

from .bilinear import Decomposition, assemble, catalog, matmul_tensor, verify_border, verify_exact
from .tensor_core import EpsScalar, EpsTensor, Tensor

__version__ = "0.1.0"

__all__ = ["Decomposition", "EpsScalar", "EpsTensor", "Tensor", "assemble", "catalog",
           "matmul_tensor", "verify_border", "verify_exact"]
