"""Batch incremental/decremental kernel ridge regression and Bayesian kernel regression."""

from . import kbr, kernels, krr_empirical, krr_intrinsic, linalg
from .edits import EditBatch, Guard
from .kernels import KernelSpec

__all__ = [
    "EditBatch",
    "Guard",
    "KernelSpec",
    "kbr",
    "kernels",
    "krr_empirical",
    "krr_intrinsic",
    "linalg",
]
__version__ = "0.1.0"
