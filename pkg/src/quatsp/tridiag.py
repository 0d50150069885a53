"""Coupled-recurrence tridiagonalization of quaternion matrices.

Two coupled three-term recurrences (the quaternion analogue of the
Saunders/Simon/Yip tridiagonalization of unsymmetric real matrices,
SIAM J. Numer. Anal. 25 (1988) 927-940) build partially unitary bases
P_m = [p_1..p_m], Q_m = [q_1..q_m] with

    A  Q_m = P_m T_m + beta_m  p_{m+1} e_m^*,
    A* P_m = Q_m T_m^* + gamma_m q_{m+1} e_m^*,

where T_m is STRICTLY tridiagonal: quaternion diagonal alpha_i,
nonnegative real sub-diagonal beta_i and super-diagonal gamma_i.  This
is a two-sided unitary equivalence (it preserves singular values), not
a similarity, and the generated subspaces are unions of Krylov spaces
of the normal-equation operators A A* / A* A rather than Krylov spaces
of A itself.  For Hermitian A with p_1 = q_1 the two recurrences
coincide and the procedure reduces to the Hermitian quaternion Lanczos
iteration (real symmetric T).

The incremental driver (ssy_init / ssy_step) keeps only the last two
basis vectors per side, so solvers built on it run in O(n) memory;
basis retention is opt-in for tests and diagnostics.  `dense_ssy_reduce`
is the unconditional dense reduction: per leading index it realifies
the current column/row with unit-quaternion phase rotations (the
four-plane form of generalized symplectic Givens rotations) and
compresses with real Householder reflectors applied identically to all
four planes (direct sums H+H+H+H in the real representation), both of
which preserve JRS symmetry exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (QuatMatrix, QuatVector, inner, matvec, matvec_adj,
                     norm2, real_rep, real_rep_col, real_rep_col_inv)
from .quaternion import Quaternion, qconj, qmod

DEFAULT_BREAKDOWN_TOL = 1e-13


@dataclass
class StrictTridiagonal:
    """Tridiagonal with quaternion diagonal and nonnegative real
    off-diagonals; `augmented` appends the extra row beta_m e_m^*."""

    alpha: list[Quaternion]
    beta: np.ndarray   # sub-diagonal; carries the trailing beta_m when augmented
    gamma: np.ndarray  # super-diagonal
    augmented: bool = False

    @property
    def m(self) -> int:
        return len(self.alpha)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m + 1, self.m) if self.augmented else (self.m, self.m)

    def to_matrix(self) -> QuatMatrix:
        rows, cols = self.shape
        t = QuatMatrix.zeros(rows, cols)
        for i, a in enumerate(self.alpha):
            for k, comp in enumerate((a.w, a.x, a.y, a.z)):
                t.planes[k][i, i] = comp
        for i in range(self.m - 1):
            t.planes[0][i + 1, i] = self.beta[i]
            t.planes[0][i, i + 1] = self.gamma[i]
        if self.augmented:
            t.planes[0][self.m, self.m - 1] = self.beta[self.m - 1]
        return t

    def conjugate(self) -> "StrictTridiagonal":
        """T^* of the square part: diagonal conjugated, off-diagonals swap."""
        if self.augmented:
            raise ValueError("conjugate of an augmented tridiagonal is undefined")
        return StrictTridiagonal([qconj(a) for a in self.alpha],
                                 self.gamma.copy(), self.beta.copy())

    def imag_max(self) -> float:
        return max((a.imag_max() for a in self.alpha), default=0.0)


@dataclass
class StepResult:
    kind: str  # advanced | breakdown_p | breakdown_q
    alpha_i: Quaternion
    beta_i: float
    gamma_i: float


@dataclass
class SSYState:
    """Incremental state: matrix handle, the rolling two basis pairs,
    the recurrence coefficients, and the breakdown tolerance."""

    a: QuatMatrix
    p_prev: QuatVector
    p_curr: QuatVector
    q_prev: QuatVector
    q_curr: QuatVector
    beta0: float
    gamma0: float
    tau_b: float
    alphas: list[Quaternion] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    gammas: list[float] = field(default_factory=list)
    i: int = 0
    finished: bool = False
    op_scale: float = 1.0  # running max of ||A q_i||, floors the breakdown test
    basis_p: list[QuatVector] | None = None
    basis_q: list[QuatVector] | None = None

    def breakdown_threshold(self) -> float:
        return self.tau_b * max(1.0, self.op_scale)


def ssy_init(a: QuatMatrix, b: QuatVector, c: QuatVector,
             tau_b: float = DEFAULT_BREAKDOWN_TOL,
             retain_basis: bool = False) -> SSYState:
    """Start the recurrences from p_1 = b/||b||, q_1 = c/||c||."""
    if a.m != a.n:
        raise ValueError("matrix must be square")
    if b.n != a.n or c.n != a.n:
        raise ValueError("dimension mismatch between matrix and start vectors")
    beta0, gamma0 = norm2(b), norm2(c)
    if beta0 == 0.0 or gamma0 == 0.0:
        raise ValueError("start vectors must be nonzero")
    p1, q1 = b / beta0, c / gamma0
    state = SSYState(a=a, p_prev=QuatVector.zeros(a.n), p_curr=p1,
                     q_prev=QuatVector.zeros(a.n), q_curr=q1,
                     beta0=beta0, gamma0=gamma0, tau_b=tau_b)
    if retain_basis:
        state.basis_p = [p1.copy()]
        state.basis_q = [q1.copy()]
    return state


def ssy_step(state: SSYState) -> StepResult:
    """Advance one step; appends alpha_i, beta_i, gamma_i.

    All scalar products of vectors are right multiplications.  The step
    reports a breakdown when beta_i or gamma_i falls below the
    scale-relative tolerance, after recording the coefficients.
    """
    if state.finished:
        raise RuntimeError("tridiagonalization already broke down")
    a = state.a
    v = matvec(a, state.q_curr)
    state.op_scale = max(state.op_scale, norm2(v))
    alpha = inner(v, state.p_curr)
    p_t = v - state.p_curr * alpha
    if state.i > 0:
        p_t = p_t - state.p_prev * state.gammas[-1]
    u = matvec_adj(a, state.p_curr)
    q_t = u - state.q_curr * qconj(alpha)
    if state.i > 0:
        q_t = q_t - state.q_prev * state.betas[-1]
    beta, gamma = norm2(p_t), norm2(q_t)

    state.alphas.append(alpha)
    state.betas.append(beta)
    state.gammas.append(gamma)
    state.i += 1

    tol = state.breakdown_threshold()
    if beta <= tol or gamma <= tol:
        state.finished = True
        kind = "breakdown_p" if beta <= tol else "breakdown_q"
        return StepResult(kind, alpha, beta, gamma)

    state.p_prev, state.p_curr = state.p_curr, p_t / beta
    state.q_prev, state.q_curr = state.q_curr, q_t / gamma
    if state.basis_p is not None:
        state.basis_p.append(state.p_curr.copy())
        state.basis_q.append(state.q_curr.copy())
    return StepResult("advanced", alpha, beta, gamma)


def assemble_T(state: SSYState, m: int, augmented: bool = False) -> StrictTridiagonal:
    """Leading m x m tridiagonal (or its (m+1) x m augmented form)."""
    if m > state.i or m < 1:
        raise ValueError(f"only {state.i} steps taken, cannot assemble T_{m}")
    beta = np.array(state.betas[:m] if augmented else state.betas[:m - 1])
    return StrictTridiagonal(list(state.alphas[:m]),
                             beta, np.array(state.gammas[:m - 1]),
                             augmented=augmented)


def check_factorization(state: SSYState, m: int):
    """Residuals of both coupling identities plus basis orthogonality.

    Returns (res1, res2, orthP, orthQ) with
      res1 = ||A Q_m - P_m T_m - beta_m p_{m+1} e_m^*||_F
      res2 = ||A* P_m - Q_m T_m^* - gamma_m q_{m+1} e_m^*||_F
      orthP = ||P_m^* P_m - I||_max   (orthQ likewise).
    """
    if state.basis_p is None:
        raise ValueError("factorization check needs retain_basis=True")
    if m > state.i:
        raise ValueError(f"only {state.i} steps taken")
    pm = QuatMatrix.from_columns(state.basis_p[:m])
    qm = QuatMatrix.from_columns(state.basis_q[:m])
    t = assemble_T(state, m)
    tm = t.to_matrix()

    e1 = (state.a @ qm) - (pm @ tm)
    if len(state.basis_p) > m:  # rank-one residual term, absent at breakdown
        e1.planes[0][:, m - 1] -= state.betas[m - 1] * state.basis_p[m].planes[0]
        for k in range(1, 4):
            e1.planes[k][:, m - 1] -= state.betas[m - 1] * state.basis_p[m].planes[k]
    res1 = e1.fro_norm()

    e2 = (state.a.conjugate_transpose() @ pm) - (qm @ t.conjugate().to_matrix())
    if len(state.basis_q) > m:
        for k in range(4):
            e2.planes[k][:, m - 1] -= state.gammas[m - 1] * state.basis_q[m].planes[k]
    res2 = e2.fro_norm()

    def orth_defect(basis: QuatMatrix) -> float:
        g = basis.conjugate_transpose() @ basis
        g.planes[0][np.diag_indices(m)] -= 1.0
        return max(float(np.max(np.abs(p))) for p in g.planes)

    return res1, res2, orth_defect(pm), orth_defect(qm)


# ----------------------------------------------------------------------
# Dense unconditional reduction
# ----------------------------------------------------------------------


def _lmul_row(mm: np.ndarray, i: int, u: Quaternion) -> None:
    """Row i of the plane stack <- u * row (left scalar multiplication)."""
    r0, r1, r2, r3 = mm[0, i].copy(), mm[1, i].copy(), mm[2, i].copy(), mm[3, i].copy()
    mm[0, i] = u.w * r0 - u.x * r1 - u.y * r2 - u.z * r3
    mm[1, i] = u.w * r1 + u.x * r0 + u.y * r3 - u.z * r2
    mm[2, i] = u.w * r2 - u.x * r3 + u.y * r0 + u.z * r1
    mm[3, i] = u.w * r3 + u.x * r2 - u.y * r1 + u.z * r0


def _rmul_col(mm: np.ndarray, j: int, u: Quaternion) -> None:
    """Column j of the plane stack <- column * u (right multiplication)."""
    c0, c1, c2, c3 = (mm[k, :, j].copy() for k in range(4))
    mm[0, :, j] = c0 * u.w - c1 * u.x - c2 * u.y - c3 * u.z
    mm[1, :, j] = c0 * u.x + c1 * u.w + c2 * u.z - c3 * u.y
    mm[2, :, j] = c0 * u.y - c1 * u.z + c2 * u.w + c3 * u.x
    mm[3, :, j] = c0 * u.z + c1 * u.y - c2 * u.x + c3 * u.w


def _entry(mm: np.ndarray, i: int, j: int) -> Quaternion:
    return Quaternion(mm[0, i, j], mm[1, i, j], mm[2, i, j], mm[3, i, j])


def _house_left(mm: np.ndarray, a: int, v: np.ndarray) -> None:
    for k in range(4):
        mm[k, a:, :] -= 2.0 * np.outer(v, v @ mm[k, a:, :])


def _house_right(mm: np.ndarray, a: int, v: np.ndarray) -> None:
    for k in range(4):
        mm[k, :, a:] -= 2.0 * np.outer(mm[k, :, a:] @ v, v)


def dense_ssy_reduce(m: QuatMatrix):
    """Unconditional dense reduction P^* M Q = T.

    Per leading index l: unit phases realify the below-diagonal part of
    column l and (after a real Householder direct sum compresses it to
    one entry) the rest of row l; trailing sign flips make the two
    surviving off-diagonal entries nonnegative.  Every factor is a
    unitary quaternion matrix whose real representation is orthogonally
    JRS-symplectic, so T inherits the singular values of M.  Meant for
    verification scale (n <= 128); solvers use the incremental
    recurrences instead.

    Returns (P, Q, T) with P, Q unitary and T strictly tridiagonal.
    """
    if m.m != m.n:
        raise ValueError("matrix must be square")
    n = m.n
    md = m.to_dense()
    mm = np.stack([p.copy() for p in md.planes])
    pp = np.stack([np.eye(n), np.zeros((n, n)), np.zeros((n, n)), np.zeros((n, n))])
    qq = pp.copy()

    for l in range(n - 1):
        # -- column l: realify below the diagonal, then compress ------
        for i in range(l + 1, n):
            e = _entry(mm, i, l)
            mod = qmod(e)
            if mod > 0.0 and e.imag_max() != 0.0:
                u = qconj(e) / mod
                _lmul_row(mm, i, u)
                _rmul_col(pp, i, qconj(u))
        tail = mm[0, l + 1:, l].copy()
        if tail.size > 1:
            nx = float(np.linalg.norm(tail))
            if nx > 0.0:
                v = tail
                v[0] += nx  # tail[0] >= 0 after the phases: stable reflector
                v /= np.linalg.norm(v)
                _house_left(mm, l + 1, v)
                _house_right(pp, l + 1, v)
                # reflector lands on -nx; flip the row sign to keep beta >= 0
                mm[:, l + 1, :] *= -1.0
                pp[:, :, l + 1] *= -1.0
        elif tail.size == 1 and mm[0, l + 1, l] < 0.0:
            mm[:, l + 1, :] *= -1.0
            pp[:, :, l + 1] *= -1.0

        # -- row l: realify right of the diagonal, then compress ------
        for j in range(l + 1, n):
            e = _entry(mm, l, j)
            mod = qmod(e)
            if mod > 0.0 and e.imag_max() != 0.0:
                u = qconj(e) / mod
                _rmul_col(mm, j, u)
                _rmul_col(qq, j, u)
        tail = mm[0, l, l + 1:].copy()
        if tail.size > 1:
            nx = float(np.linalg.norm(tail))
            if nx > 0.0:
                v = tail
                v[0] += nx
                v /= np.linalg.norm(v)
                _house_right(mm, l + 1, v)
                _house_right(qq, l + 1, v)
                mm[:, :, l + 1] *= -1.0
                qq[:, :, l + 1] *= -1.0
        elif tail.size == 1 and mm[0, l, l + 1] < 0.0:
            mm[:, :, l + 1] *= -1.0
            qq[:, :, l + 1] *= -1.0

    alpha = [_entry(mm, i, i) for i in range(n)]
    beta = np.maximum(mm[0].diagonal(-1).copy(), 0.0)
    gamma = np.maximum(mm[0].diagonal(1).copy(), 0.0)
    t = StrictTridiagonal(alpha, beta, gamma)
    return (QuatMatrix(list(pp)), QuatMatrix(list(qq)), t)


# ----------------------------------------------------------------------
# Symmetry-restoring start vector
# ----------------------------------------------------------------------


def symmetric_initial_q1(a: QuatMatrix, p1: QuatVector,
                         max_iter: int = 100, tol: float = 1e-13) -> QuatVector:
    """Start vector that makes the reduced tridiagonal real symmetric.

    Returns q_1 = W p_1 where W is the unitary polar factor of A^*
    (for A = U S V^*, W = V U^*, so running the recurrences from
    (p_1, q_1) mirrors a Hermitian Lanczos pass on sqrt(A^* A)).  W is
    computed by the scaled Newton iteration X <- (g X + g^-1 X^-T)/2 on
    the real representation of A^*; the polar factor of an invertible
    JRS-symmetric matrix is JRS-symmetric by uniqueness, so mapping the
    first block column back yields a genuine quaternion vector.
    Verification-scale utility (n <= 64).
    """
    if a.m != a.n or p1.n != a.n:
        raise ValueError("need a square matrix and a matching vector")
    x = real_rep(a).T.copy()
    for _ in range(max_iter):
        try:
            xinv = np.linalg.inv(x)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("polar iteration hit a singular iterate") from exc
        g = np.sqrt(np.linalg.norm(xinv, "fro") / np.linalg.norm(x, "fro"))
        xn = 0.5 * (g * x + xinv.T / g)
        delta = np.linalg.norm(xn - x, "fro") / np.linalg.norm(xn, "fro")
        x = xn
        if delta < tol:
            break
    else:
        raise RuntimeError(f"polar iteration did not converge in {max_iter} steps")
    return real_rep_col_inv(x @ real_rep_col(p1), a.n)
