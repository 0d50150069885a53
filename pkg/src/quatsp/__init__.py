"""Structure-preserving linear algebra and CG-type iterative solvers for
non-Hermitian quaternion linear systems, with problem generators for
three-dimensional signal filtering and colour image deblurring."""

from .quaternion import Quaternion, qconj, qinv, qmod, qmul
from .linalg import (QuatMatrix, QuatVector, inner, jrs_check, matvec,
                     matvec_adj, norm2, quat_givens, quat_givens_row,
                     real_rep, real_rep_col)

__all__ = [
    "Quaternion", "qmul", "qconj", "qmod", "qinv",
    "QuatVector", "QuatMatrix", "inner", "norm2", "matvec", "matvec_adj",
    "real_rep", "real_rep_col", "jrs_check", "quat_givens", "quat_givens_row",
]

__version__ = "0.1.0"
