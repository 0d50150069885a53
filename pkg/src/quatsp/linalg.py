"""Quaternion vectors and matrices stored as four real planes.

A quaternion matrix A = A0 + A1*i + A2*j + A3*k lives in
structure-of-arrays form: four real planes, each either a dense ndarray
or a scipy.sparse CSR matrix (each plane carries its own sparsity
pattern).  The 4m x 4n real representation

    R(A) = [ A0   A2   A1   A3 ]
           [-A2   A0   A3  -A1 ]
           [-A1  -A3   A0   A2 ]
           [-A3   A1  -A2   A0 ]

is a multiplication-preserving embedding whose image is exactly the set
of JRS-symmetric matrices (invariant under conjugation by the three
signed block permutations J, R, S).  R(A) is materialised ONLY for
tests and oracles; the production kernels below act on the four planes
directly -- a quaternion matvec is 16 real plane matvecs, never a
4n-dimensional expansion, which is where the structure-preserving
saving over the plain real formulation comes from.

There is a second, column-style real embedding

    Y(A) = [ A0  -A1  -A2  -A3 ]          Y(x) = [x0; x1; x2; x3]
           [ A1   A0  -A3   A2 ]
           [ A2   A3   A0  -A1 ]
           [ A3  -A2   A1   A0 ]

with Y(Ax) = Y(A) Y(x); it is the layout used by the dense real
direct-solve oracle that the tests check the iterative solvers against.

Scalar product conventions: vector-by-scalar products are RIGHT
multiplications (x * alpha means each component x_k alpha), and the
inner product is <x, y> = sum_k y_k^* x_k, which makes Q^n a right
quaternionic Hilbert space (right linearity in the first argument,
<x,y> = <y,x>^*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .quaternion import Quaternion, qconj, qinv, qmod, qmul

_EYE4 = np.eye(4)


def _right_mul_matrix(a: Quaternion) -> np.ndarray:
    """4x4 real matrix of v -> v*a acting on stacked (w,x,y,z) planes."""
    w, x, y, z = a.w, a.x, a.y, a.z
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


class QuatVector:
    """Quaternion vector of length n held as a (4, n) float64 array."""

    __slots__ = ("planes",)

    def __init__(self, planes: np.ndarray):
        planes = np.asarray(planes, dtype=float)
        if planes.ndim != 2 or planes.shape[0] != 4:
            raise ValueError("expected a (4, n) plane array")
        self.planes = planes

    @classmethod
    def zeros(cls, n: int) -> "QuatVector":
        return cls(np.zeros((4, n)))

    @classmethod
    def from_planes(cls, v0, v1=None, v2=None, v3=None) -> "QuatVector":
        v0 = np.asarray(v0, dtype=float)
        zero = np.zeros_like(v0)
        rows = [v0,
                zero if v1 is None else np.asarray(v1, dtype=float),
                zero if v2 is None else np.asarray(v2, dtype=float),
                zero if v3 is None else np.asarray(v3, dtype=float)]
        return cls(np.stack(rows))

    @classmethod
    def basis(cls, n: int, k: int) -> "QuatVector":
        v = cls.zeros(n)
        v.planes[0, k] = 1.0
        return v

    @property
    def n(self) -> int:
        return self.planes.shape[1]

    def copy(self) -> "QuatVector":
        return QuatVector(self.planes.copy())

    def __getitem__(self, k: int) -> Quaternion:
        return Quaternion(*self.planes[:, k])

    def __add__(self, other: "QuatVector") -> "QuatVector":
        return QuatVector(self.planes + other.planes)

    def __sub__(self, other: "QuatVector") -> "QuatVector":
        return QuatVector(self.planes - other.planes)

    def __neg__(self) -> "QuatVector":
        return QuatVector(-self.planes)

    def __mul__(self, alpha) -> "QuatVector":
        """Right scalar multiplication x*alpha (alpha real or quaternion)."""
        if isinstance(alpha, (int, float)):
            return QuatVector(self.planes * alpha)
        return QuatVector(_right_mul_matrix(alpha) @ self.planes)

    def __truediv__(self, s: float) -> "QuatVector":
        return QuatVector(self.planes / s)

    def conjugate(self) -> "QuatVector":
        out = self.planes.copy()
        out[1:] *= -1.0
        return QuatVector(out)

    def norm(self) -> float:
        return float(np.linalg.norm(self.planes))


def inner(x: QuatVector, y: QuatVector) -> Quaternion:
    """Right-Hilbert inner product <x, y> = sum_k y_k^* x_k."""
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")
    d = y.planes @ x.planes.T  # d[a, b] = <y_a, x_b> real dot products
    return Quaternion(
        d[0, 0] + d[1, 1] + d[2, 2] + d[3, 3],
        d[0, 1] - d[1, 0] - d[2, 3] + d[3, 2],
        d[0, 2] + d[1, 3] - d[2, 0] - d[3, 1],
        d[0, 3] - d[1, 2] + d[2, 1] - d[3, 0],
    )


def norm2(x: QuatVector) -> float:
    """Euclidean norm sqrt(sum |x_k|^2) = norm of the stacked planes."""
    return x.norm()


class QuatMatrix:
    """Quaternion m x n matrix as four real planes (dense or CSR).

    Instances are treated as immutable after construction and may be
    shared freely across threads; the operation counters below are
    best-effort debug state and the only mutable fields.
    """

    __slots__ = ("planes", "m", "n", "storage_kind", "nnz_total",
                 "matvec_count", "matvec_adj_count", "plane_entry_touches",
                 "_planes_T")

    def __init__(self, planes):
        if len(planes) != 4:
            raise ValueError("expected four planes")
        first = planes[0]
        self.m, self.n = first.shape
        self.storage_kind = "sparse" if sp.issparse(first) else "dense"
        fixed = []
        for p in planes:
            if sp.issparse(p):
                if self.storage_kind != "sparse":
                    raise ValueError("mixed dense/sparse planes")
                fixed.append(p.tocsr().astype(float))
            else:
                if self.storage_kind != "dense":
                    raise ValueError("mixed dense/sparse planes")
                fixed.append(np.asarray(p, dtype=float))
            if fixed[-1].shape != (self.m, self.n):
                raise ValueError("planes disagree on shape")
        self.planes = fixed
        if self.storage_kind == "sparse":
            self.nnz_total = int(sum(p.nnz for p in fixed))
        else:
            self.nnz_total = 4 * self.m * self.n
        self.matvec_count = 0
        self.matvec_adj_count = 0
        self.plane_entry_touches = 0
        self._planes_T = None

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "QuatMatrix":
        z = np.zeros((n, n))
        return cls([np.eye(n), z.copy(), z.copy(), z.copy()])

    @classmethod
    def zeros(cls, m: int, n: int) -> "QuatMatrix":
        return cls([np.zeros((m, n)) for _ in range(4)])

    @classmethod
    def from_real(cls, a0, s1: float = 0.0, s2: float = 0.0,
                  s3: float = 0.0) -> "QuatMatrix":
        """Matrix with planes (A0, s1*A0, s2*A0, s3*A0)."""
        if sp.issparse(a0):
            a0 = a0.tocsr()
            return cls([a0, a0 * s1, a0 * s2, a0 * s3])
        a0 = np.asarray(a0, dtype=float)
        return cls([a0, s1 * a0, s2 * a0, s3 * a0])

    @classmethod
    def from_columns(cls, cols: list[QuatVector]) -> "QuatMatrix":
        stacked = np.stack([c.planes for c in cols], axis=2)  # (4, n, m)
        return cls([stacked[k] for k in range(4)])

    # -- element access ------------------------------------------------

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion(*(float(p[i, j]) for p in self.planes))

    def col(self, j: int) -> QuatVector:
        if self.storage_kind == "sparse":
            return QuatVector(np.stack(
                [np.asarray(p[:, [j]].todense()).ravel() for p in self.planes]))
        return QuatVector(np.stack([p[:, j] for p in self.planes]))

    def to_dense(self) -> "QuatMatrix":
        if self.storage_kind == "dense":
            return self
        return QuatMatrix([np.asarray(p.todense()) for p in self.planes])

    def conjugate_transpose(self) -> "QuatMatrix":
        a0, a1, a2, a3 = self.planes
        if self.storage_kind == "sparse":
            return QuatMatrix([a0.T.tocsr(), (-a1.T).tocsr(),
                               (-a2.T).tocsr(), (-a3.T).tocsr()])
        return QuatMatrix([a0.T.copy(), -a1.T, -a2.T, -a3.T])

    def fro_norm(self) -> float:
        if self.storage_kind == "sparse":
            return math.sqrt(sum(float((p.multiply(p)).sum()) for p in self.planes))
        return math.sqrt(sum(float((p * p).sum()) for p in self.planes))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix([a + b for a, b in zip(self.planes, other.planes)])

    def __sub__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix([a - b for a, b in zip(self.planes, other.planes)])

    def scale(self, s: float) -> "QuatMatrix":
        return QuatMatrix([p * s for p in self.planes])

    def __matmul__(self, other):
        if isinstance(other, QuatVector):
            return matvec(self, other)
        if isinstance(other, QuatMatrix):
            return _matmat(self, other)
        return NotImplemented

    def _transposed_planes(self):
        if self._planes_T is None:
            if self.storage_kind == "sparse":
                self._planes_T = [p.T.tocsr() for p in self.planes]
            else:
                self._planes_T = [np.ascontiguousarray(p.T) for p in self.planes]
        return self._planes_T

    def reset_counters(self) -> None:
        self.matvec_count = 0
        self.matvec_adj_count = 0
        self.plane_entry_touches = 0


def matvec(a: QuatMatrix, x: QuatVector) -> QuatVector:
    """Structure-preserving product A x (16 real plane matvecs).

    Equivalent to applying R(A) to the first block column of R(x),
    i.e. the definitional sum y_i = sum_j A_ij x_j, without forming
    any 4n-dimensional object.  Each stored plane entry is touched
    exactly four times (once per output plane).
    """
    if a.n != x.n:
        raise ValueError(f"dimension mismatch: matrix is {a.m}x{a.n}, vector {x.n}")
    a0, a1, a2, a3 = a.planes
    x0, x1, x2, x3 = x.planes
    out = np.empty((4, a.m))
    out[0] = a0 @ x0 - a1 @ x1 - a2 @ x2 - a3 @ x3
    out[1] = a0 @ x1 + a1 @ x0 + a2 @ x3 - a3 @ x2
    out[2] = a0 @ x2 - a1 @ x3 + a2 @ x0 + a3 @ x1
    out[3] = a0 @ x3 + a1 @ x2 - a2 @ x1 + a3 @ x0
    a.matvec_count += 1
    a.plane_entry_touches += 4 * a.nnz_total
    return QuatVector(out)


def matvec_adj(a: QuatMatrix, x: QuatVector) -> QuatVector:
    """Adjoint product A^* x, realised as transposed-plane kernels.

    The planes of A^* are (A0^T, -A1^T, -A2^T, -A3^T); substituting
    them into the matvec sign pattern gives the formulas below, which
    amount to applying R(A)^T to the first block column of R(x).
    """
    if a.m != x.n:
        raise ValueError(f"dimension mismatch: matrix is {a.m}x{a.n}, vector {x.n}")
    t0, t1, t2, t3 = a._transposed_planes()
    x0, x1, x2, x3 = x.planes
    out = np.empty((4, a.n))
    out[0] = t0 @ x0 + t1 @ x1 + t2 @ x2 + t3 @ x3
    out[1] = t0 @ x1 - t1 @ x0 - t2 @ x3 + t3 @ x2
    out[2] = t0 @ x2 + t1 @ x3 - t2 @ x0 - t3 @ x1
    out[3] = t0 @ x3 - t1 @ x2 + t2 @ x1 - t3 @ x0
    a.matvec_adj_count += 1
    a.plane_entry_touches += 4 * a.nnz_total
    return QuatVector(out)


def _matmat(a: QuatMatrix, b: QuatMatrix) -> QuatMatrix:
    if a.n != b.m:
        raise ValueError("dimension mismatch in matrix product")
    a0, a1, a2, a3 = (a.to_dense().planes if a.storage_kind == "sparse"
                      else a.planes)
    b0, b1, b2, b3 = (b.to_dense().planes if b.storage_kind == "sparse"
                      else b.planes)
    return QuatMatrix([
        a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
        a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
        a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
        a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
    ])


# -- real representations ----------------------------------------------


def real_rep(a: QuatMatrix) -> np.ndarray:
    """Dense 4m x 4n real representation R(A).  Test/oracle use only."""
    a0, a1, a2, a3 = (np.asarray(p.todense()) if sp.issparse(p) else p
                      for p in a.planes)
    return np.block([
        [a0, a2, a1, a3],
        [-a2, a0, a3, -a1],
        [-a1, -a3, a0, a2],
        [-a3, a1, -a2, a0],
    ])


def real_rep_col(a) -> np.ndarray:
    """First block column of R(.): stacks [M0; -M2; -M1; -M3].

    Accepts a QuatMatrix (returns 4m x n) or a QuatVector (returns 4n,).
    """
    if isinstance(a, QuatVector):
        v0, v1, v2, v3 = a.planes
        return np.concatenate([v0, -v2, -v1, -v3])
    a0, a1, a2, a3 = (np.asarray(p.todense()) if sp.issparse(p) else p
                      for p in a.planes)
    return np.vstack([a0, -a2, -a1, -a3])


def real_rep_col_inv(y: np.ndarray, n: int) -> QuatVector:
    """Inverse of real_rep_col on vectors: [v0; -v2; -v1; -v3] -> v."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != 4 * n:
        raise ValueError("length is not 4n")
    return QuatVector(np.stack([y[:n], -y[2 * n:3 * n], -y[n:2 * n], -y[3 * n:]]))


def upsilon_rep(a: QuatMatrix) -> np.ndarray:
    """Column-style real embedding Y(A) with Y(Ax) = Y(A) Y(x)."""
    a0, a1, a2, a3 = (np.asarray(p.todense()) if sp.issparse(p) else p
                      for p in a.planes)
    return np.block([
        [a0, -a1, -a2, -a3],
        [a1, a0, -a3, a2],
        [a2, a3, a0, -a1],
        [a3, -a2, a1, a0],
    ])


def upsilon_vec(x: QuatVector) -> np.ndarray:
    return x.planes.reshape(-1).copy()


def upsilon_unvec(y: np.ndarray, n: int) -> QuatVector:
    return QuatVector(np.asarray(y, dtype=float).reshape(4, n).copy())


def direct_solve_dense(a: QuatMatrix, b: QuatVector) -> QuatVector:
    """Oracle: solve A x = b by dense LU on the 4n x 4n real system."""
    if a.m != a.n or a.n != b.n:
        raise ValueError("direct solve needs a square system")
    y = np.linalg.solve(upsilon_rep(a), upsilon_vec(b))
    return upsilon_unvec(y, a.n)


# Signed block permutations of Def-style JRS symmetry: conjugating a
# 4m x 4n block matrix by J (or R, S) permutes block rows/columns with
# signs; the maps below give (source block, sign) per target block.
_JRS_PATTERNS = {
    "J": ((2, -1.0), (3, -1.0), (0, 1.0), (1, 1.0)),
    "R": ((1, -1.0), (0, 1.0), (3, 1.0), (2, -1.0)),
    "S": ((3, -1.0), (2, 1.0), (1, -1.0), (0, 1.0)),
}


def _jrs_conjugate(w: np.ndarray, pattern) -> np.ndarray:
    m4, n4 = w.shape
    m, n = m4 // 4, n4 // 4
    rows = np.vstack([sgn * w[src * m:(src + 1) * m, :] for src, sgn in pattern])
    return np.hstack([sgn * rows[:, src * n:(src + 1) * n] for src, sgn in pattern])


def jrs_check(w: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff W is JRS-symmetric, i.e. the real representation of some
    quaternion matrix.  J, R, S act as signed index permutations; no
    4m x 4m operator matrices are formed."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] % 4 or w.shape[1] % 4:
        raise ValueError("dimensions must be multiples of 4")
    return all(
        float(np.max(np.abs(_jrs_conjugate(w, pat) - w))) <= tol
        for pat in _JRS_PATTERNS.values()
    )


# -- quaternion Givens rotations ----------------------------------------


@dataclass(frozen=True)
class GivensQ:
    """2x2 unitary [c, s; -s*, c] with real c in [0,1] and quaternion s,
    c^2 + |s|^2 = 1."""

    c: float
    s: Quaternion

    def apply(self, x1: Quaternion, x2: Quaternion):
        """Column action: returns ([c, s; -s*, c]) (x1, x2)^T."""
        return (x1 * self.c + qmul(self.s, x2),
                -qmul(qconj(self.s), x1) + x2 * self.c)

    def as_matrix(self) -> QuatMatrix:
        m = QuatMatrix.zeros(2, 2)
        cs = qconj(self.s)
        m.planes[0][0, 0] = self.c
        m.planes[0][1, 1] = self.c
        for k, comp in enumerate(("w", "x", "y", "z")):
            m.planes[k][0, 1] = getattr(self.s, comp)
            m.planes[k][1, 0] = -getattr(cs, comp)
        return m


def quat_givens(x1: Quaternion, x2: Quaternion):
    """Column rotation: G (x1, x2)^T = (xi, 0)^T.

    For x1 != 0:  c = |x1|/r,  s = (x1/|x1|)(x2*/r),  xi = (x1/|x1|) r,
    with r = sqrt(|x1|^2 + |x2|^2).  For x1 = 0 the fixed convention is
    c = 0, s = 1, xi = x2, which keeps factorisations deterministic.
    """
    m1, m2 = qmod(x1), qmod(x2)
    if m1 == 0.0 and m2 == 0.0:
        raise ValueError("Givens rotation of the zero vector is undefined")
    if m1 == 0.0:
        return GivensQ(0.0, Quaternion(1.0)), x2
    r = math.hypot(m1, m2)
    phase = x1 / m1
    s = qmul(phase, qconj(x2)) / r
    return GivensQ(m1 / r, s), phase * r


def quat_givens_row(y1: Quaternion, y2: Quaternion):
    """Row rotation: [y1, y2] [c', s'; s'*, -c'] = [xi, 0].

    For y1 != 0:  c' = |y1|/r,  s' = (y1*/|y1|)(y2/r),  xi = (y1/|y1|) r.
    For y1 = 0 the convention mirrors the column case: c' = 0, s' = 1,
    xi = y2.
    """
    m1, m2 = qmod(y1), qmod(y2)
    if m1 == 0.0 and m2 == 0.0:
        raise ValueError("Givens rotation of the zero vector is undefined")
    if m1 == 0.0:
        return 0.0, Quaternion(1.0), y2
    r = math.hypot(m1, m2)
    s = qmul(qconj(y1) / m1, y2) / r
    return m1 / r, s, (y1 / m1) * r
