"""CG-type iterative solvers for non-Hermitian quaternion systems.

Both solvers drive the coupled three-term tridiagonalization (tridiag
module) started from p_1 = r_0/||r_0|| and extract iterates from the
growing strictly tridiagonal T_m with constant work per step, following
the SYMMLQ / MINRES implementation pattern of Paige & Saunders (SIAM J.
Numer. Anal. 12 (1975)) transplanted to quaternion arithmetic:

* ``qnherlq_solve`` imposes the Galerkin condition r_m _|_ span(p_1..p_m),
  i.e. solves T_m y = beta e_1 through a rolling LQ factorisation built
  from row Givens rotations.  Since the leading factor can be singular
  mid-sweep, the stable quantity is the auxiliary iterate x~_m; the
  Galerkin iterate x_m is re-derived from it each step.

* ``qnherqr_solve`` minimises ||b - A x|| over the same affine subspace,
  i.e. solves the (m+1) x m least squares problem with the augmented
  tridiagonal through a rolling QR factorisation built from column
  Givens rotations; |rho_m| equals the true residual norm in exact
  arithmetic and decreases monotonically.

Every vector-by-scalar product is a right multiplication, matching the
right quaternionic Hilbert space conventions of the linalg module.
Per iteration each solver performs exactly one structure-preserving
matvec and one adjoint matvec (the LQ solver adds one more in its
default listing-faithful mode, which recomputes b - A x_m each step),
and holds a fixed number of length-n vectors regardless of the
iteration count.

On breakdown of the underlying recurrence (beta_m or gamma_m below the
scale-relative tolerance) the subspace cannot grow; a vanishing beta_m
certifies x_m as the exact solution of A x = b, a vanishing gamma_m
certifies the companion iterate of the adjoint system A* z = c (see
``solve_adjoint_pair``).  The solvers form the step-m iterate, verify
its true residual, and report status ``breakdown_exact``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import (QuatMatrix, QuatVector, inner, matvec, matvec_adj,
                     norm2, quat_givens, quat_givens_row)
from .quaternion import Quaternion, qconj, qinv, qmod, qmul
from .tridiag import DEFAULT_BREAKDOWN_TOL, SSYState, ssy_init, ssy_step

_QONE = Quaternion(1.0)
_QZERO = Quaternion()


@dataclass
class SolveOptions:
    """Knobs shared by all solvers.

    residual_mode: "recomputed" evaluates ||b - A x_m|| every step
    (listing-faithful for the LQ method, one extra matvec); "recurrence"
    monitors the rotation-recurrence estimate and confirms with a single
    recomputation at termination (default for the QR method).  None
    picks the per-solver default.
    """

    tol: float = 1e-6
    maxit: int = 5000
    x0: QuatVector | None = None
    tau_b: float = DEFAULT_BREAKDOWN_TOL
    residual_mode: str | None = None
    q1: QuatVector | None = None

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.maxit < 1:
            raise ValueError("maxit must be at least 1")
        if self.residual_mode not in (None, "recomputed", "recurrence"):
            raise ValueError(f"unknown residual_mode {self.residual_mode!r}")


@dataclass
class SolveReport:
    x: QuatVector
    status: str  # converged | breakdown_exact | maxit
    iters: int
    rr_history: list[float]
    wall_seconds: float


def lq_rotation(nu_prime: Quaternion, gamma: float):
    """Row rotation zeroing the super-diagonal entry: [nu', gamma] times
    [c, s; s*, -c] equals [nu, 0].

    c = |nu'|/r, s = (nu'^*/|nu'|)(gamma/r), nu = (nu'/|nu'|) r with
    r = sqrt(|nu'|^2 + gamma^2); for nu' = 0 the fixed zero branch is
    c = 0, s = 1, nu = gamma, mirroring the QR side's convention.
    """
    return quat_givens_row(nu_prime, Quaternion(gamma))


class LQState:
    """Rolling LQ solve of T_m y = beta e_1 (Galerkin condition).

    Carries the pending band scalars, the last rotation, the direction
    vectors w~ and the stable iterate x~; ``x`` is the Galerkin iterate,
    undefined (``x_valid`` False) exactly when the current rotation has
    c = 0, i.e. the leading tridiagonal is singular at this dimension.
    The residual norm of x_m is available without forming it as
    beta_m |e_m^* y_m| (``residual_estimate``).
    """

    __slots__ = ("c_prev", "s_prev", "dt_pending", "eta_pending",
                 "zeta_mm", "zeta_m", "chi", "wt", "xt", "x", "x_valid",
                 "residual_estimate")

    def __init__(self, x0: QuatVector, q1: QuatVector, beta: float):
        # c_0 = -1 folds the first-step initialisation (nu'_1 = alpha_1,
        # dt_2 = beta_1, zeta_1 = nu_1^{-1} beta) into the generic update
        self.c_prev = -1.0
        self.s_prev = _QZERO
        self.dt_pending = 0.0
        self.eta_pending = Quaternion(-1.0)
        self.zeta_mm = Quaternion(beta)
        self.zeta_m = _QZERO
        self.chi = _QZERO
        self.wt = q1.copy()
        self.xt = x0.copy()
        self.x = x0.copy()
        self.x_valid = True
        self.residual_estimate = beta

    def workspace_vectors(self) -> int:
        return 3  # wt, xt, x

    def update(self, alpha: Quaternion, beta: float, gamma: float,
               q_k: QuatVector, q_next: QuatVector | None) -> None:
        # band extension with the previous rotation
        delta = Quaternion(self.dt_pending * self.c_prev) + qmul(alpha, qconj(self.s_prev))
        nu_prime = self.s_prev * self.dt_pending - alpha * self.c_prev
        dt_next = -beta * self.c_prev
        eta_next = qconj(self.s_prev) * beta

        c, s, nu = lq_rotation(nu_prime, gamma)

        zeta = -qmul(qinv(nu), qmul(self.eta_pending, self.zeta_mm)
                     + qmul(delta, self.zeta_m))
        # residual of the Galerkin iterate: beta_k |e_k^* y_k|, tracked by
        # a two-term recurrence on the last component of y
        if c > 0.0:
            zeta_t = zeta / c
            phi = qmul(qconj(self.s_prev), self.chi) - zeta_t * self.c_prev
            self.x = self.xt + self.wt * zeta_t
            self.x_valid = True
            self.residual_estimate = beta * qmod(phi)
        else:
            self.x_valid = False
            self.residual_estimate = np.inf
        self.chi = qmul(qconj(self.s_prev), self.chi) - zeta * self.c_prev

        if q_next is not None:
            w = self.wt * c + q_next * qconj(s)
            self.xt = self.xt + w * zeta
            self.wt = self.wt * s - q_next * c

        self.c_prev, self.s_prev = c, s
        self.zeta_mm, self.zeta_m = self.zeta_m, zeta
        self.dt_pending, self.eta_pending = dt_next, eta_next


class QRState:
    """Rolling QR solve of the augmented least squares problem
    min ||beta e_1 - T~_m y|| (minimum residual condition).

    Keeps the last two rotations, the band entries they produce, the
    right-hand recurrences tau/rho and the last two columns of
    N_m = Q_m R_m^{-1}; |rho_m| is the residual norm and is tracked by a
    monotone scalar product so the reported sequence never increases.
    """

    __slots__ = ("c_pp", "s_pp", "c_p", "s_p", "gamma_prev", "rho",
                 "abs_rho", "n_pp", "n_p", "x", "x_valid",
                 "residual_estimate", "band")

    def __init__(self, x0: QuatVector, q1: QuatVector, beta: float,
                 keep_band: bool = False):
        self.c_pp, self.s_pp = 1.0, _QZERO
        self.c_p, self.s_p = 1.0, _QZERO
        self.gamma_prev = 0.0
        self.rho = Quaternion(beta)
        self.abs_rho = beta
        self.n_pp = QuatVector.zeros(q1.n)
        self.n_p = QuatVector.zeros(q1.n)
        self.x = x0.copy()
        self.x_valid = True
        self.residual_estimate = beta
        self.band = {"sigma": [], "delta": [], "eps": []} if keep_band else None

    def workspace_vectors(self) -> int:
        return 3  # n_pp, n_p, x

    def update(self, alpha: Quaternion, beta: float, gamma: float,
               q_k: QuatVector, q_next: QuatVector | None) -> bool:
        eps, delta, sigma, c, s = qr_update(self, alpha, beta)
        self.gamma_prev = gamma
        if qmod(sigma) == 0.0:
            #  alpha~ = 0 and beta = 0: the augmented column vanished and
            #  the iterate cannot be extended
            self.x_valid = False
            return False
        tau = self.rho * c
        self.rho = -qmul(qconj(s), self.rho)
        self.abs_rho *= min(1.0, qmod(s))
        self.residual_estimate = self.abs_rho

        n_k = (q_k - self.n_pp * eps - self.n_p * delta) * qinv(sigma)
        self.x = self.x + n_k * tau
        self.n_pp, self.n_p = self.n_p, n_k
        return True


def qr_update(state: QRState, alpha: Quaternion, beta: float):
    """Extend the rolling QR band by one column.

    Applies the two previous rotations to the new tridiagonal column
    (gamma_{k-1}, alpha_k, beta_k), producing the band entries
    eps_{k-2} = s_{k-2} gamma_{k-1}, delta_{k-1}, sigma_k, and the new
    rotation (c_k, s_k) that zeroes beta_k; the zero branch for a
    vanishing rotated diagonal is c = 0, s = 1, sigma = beta.
    """
    gamma = state.gamma_prev
    eps = state.s_pp * gamma
    ghat = state.c_pp * gamma
    delta = Quaternion(state.c_p * ghat) + qmul(state.s_p, alpha)
    alpha_t = qconj(state.s_p) * (-ghat) + alpha * state.c_p
    if qmod(alpha_t) == 0.0 and beta == 0.0:
        c, s, sigma = 0.0, _QONE, _QZERO
    else:
        g, sigma = quat_givens(alpha_t, Quaternion(beta))
        c, s = g.c, g.s
    state.c_pp, state.s_pp = state.c_p, state.s_p
    state.c_p, state.s_p = c, s
    if state.band is not None:
        state.band["sigma"].append(sigma)
        state.band["delta"].append(delta)
        state.band["eps"].append(eps)
    return eps, delta, sigma, c, s


# ----------------------------------------------------------------------
# Drivers
# ----------------------------------------------------------------------


def _true_rr(a: QuatMatrix, b: QuatVector, x: QuatVector, bnorm: float) -> float:
    return norm2(b - matvec(a, x)) / bnorm


def _finish(report_x, status, iters, history, t0):
    return SolveReport(report_x, status, iters, history,
                       time.perf_counter() - t0)


def _drive(a: QuatMatrix, b: QuatVector, opts: SolveOptions, engine_cls,
           default_mode: str, diag: dict | None = None) -> SolveReport:
    t0 = time.perf_counter()
    mode = opts.residual_mode or default_mode
    n = a.n
    if b.n != n or a.m != n:
        raise ValueError("solver needs a square system")
    x0 = opts.x0 if opts.x0 is not None else QuatVector.zeros(n)
    bnorm = norm2(b)
    if bnorm == 0.0:
        return _finish(QuatVector.zeros(n), "converged", 0, [0.0], t0)
    r0 = b - matvec(a, x0) if opts.x0 is not None else b.copy()
    beta = norm2(r0)
    history = [beta / bnorm]
    if history[0] <= opts.tol:
        return _finish(x0.copy(), "converged", 0, history, t0)

    c_start = opts.q1 if opts.q1 is not None else r0
    state = ssy_init(a, r0, c_start, tau_b=opts.tau_b)
    engine = engine_cls(x0, state.q_curr, beta)

    if diag is not None:
        diag.setdefault("rr_estimate", [])
        diag.setdefault("rr_true", [])
        diag.setdefault("matvecs_per_iter", [])
        diag.setdefault("iter_wall", [])
        diag["workspace_vectors"] = engine.workspace_vectors() + 4
        diag["basis_retained"] = state.basis_p is not None
        if diag.get("record_iterates"):
            diag["iterates"] = []

    status, iters = "maxit", 0
    for it in range(1, opts.maxit + 1):
        iters = it
        mv0 = a.matvec_count + a.matvec_adj_count
        q_k = state.q_curr
        step = ssy_step(state)
        broke = step.kind != "advanced"
        q_next = None if broke else state.q_curr
        ok = engine.update(step.alpha_i, step.beta_i, step.gamma_i, q_k, q_next)
        stalled = ok is False

        if mode == "recomputed" and engine.x_valid and not broke and not stalled:
            rr = _true_rr(a, b, engine.x, bnorm)
        elif broke or stalled:
            rr = (_true_rr(a, b, engine.x, bnorm) if engine.x_valid
                  else history[-1])
        else:
            rr = engine.residual_estimate / bnorm
        history.append(rr if np.isfinite(rr) else history[-1])

        if diag is not None:
            diag["rr_estimate"].append(engine.residual_estimate / bnorm)
            if mode == "recomputed" and engine.x_valid:
                diag["rr_true"].append(rr)
            diag["matvecs_per_iter"].append(
                a.matvec_count + a.matvec_adj_count - mv0)
            diag["iter_wall"].append(time.perf_counter() - t0)
            if diag.get("record_iterates") and engine.x_valid:
                diag["iterates"].append(engine.x.copy())

        if broke or stalled:
            status = "breakdown_exact"
            break
        if rr <= opts.tol:
            if mode == "recomputed":
                status = "converged"
                break
            confirmed = _true_rr(a, b, engine.x, bnorm)
            if diag is not None:
                diag["rr_true_final"] = confirmed
            if confirmed <= opts.tol:
                status = "converged"
                break
            # estimate drifted below the true residual: keep iterating

    return _finish(engine.x.copy(), status, iters, history, t0)


def qnherlq_solve(a: QuatMatrix, b: QuatVector,
                  opts: SolveOptions | None = None,
                  diag: dict | None = None) -> SolveReport:
    """Galerkin-condition solver (rolling LQ factorisation of T_m)."""
    return _drive(a, b, opts or SolveOptions(), LQState, "recomputed", diag)


def qnherqr_solve(a: QuatMatrix, b: QuatVector,
                  opts: SolveOptions | None = None,
                  diag: dict | None = None) -> SolveReport:
    """Minimum-residual solver (rolling QR of the augmented T~_m)."""
    return _drive(a, b, opts or SolveOptions(), QRState, "recurrence", diag)


def solve_adjoint_pair(a: QuatMatrix, b: QuatVector, c: QuatVector,
                       opts: SolveOptions | None = None,
                       method: str = "galerkin"):
    """Simultaneously approximate A x = b and A* z = c.

    One tridiagonalization pass, started from p_1 = r_0/||r_0|| and
    q_1 = (c - A* z_0)/||.||, feeds two rotation engines: the adjoint
    side consumes the conjugated coefficients with the roles of beta
    and gamma swapped (the coupling identity transposes T_m) and builds
    its iterate from the p basis.  A vanishing beta certifies the
    primal iterate exact, a vanishing gamma the adjoint one; the other
    side then reports whatever its true residual supports.

    Returns (report for A x = b, report for A* z = c).
    """
    opts = opts or SolveOptions()
    if method not in ("galerkin", "minres"):
        raise ValueError(f"unknown method {method!r}")
    engine_cls = LQState if method == "galerkin" else QRState
    t0 = time.perf_counter()
    n = a.n
    x0 = opts.x0 if opts.x0 is not None else QuatVector.zeros(n)
    z0 = QuatVector.zeros(n)
    bnorm, cnorm = norm2(b), norm2(c)
    if bnorm == 0.0 or cnorm == 0.0:
        raise ValueError("both right-hand sides must be nonzero")
    r0 = b - matvec(a, x0) if opts.x0 is not None else b.copy()
    s0 = c.copy()  # z0 = 0
    beta, gamma = norm2(r0), norm2(s0)
    hist_x, hist_z = [beta / bnorm], [gamma / cnorm]

    state = ssy_init(a, r0, s0, tau_b=opts.tau_b)
    eng_x = engine_cls(x0, state.q_curr, beta)
    eng_z = engine_cls(z0, state.p_curr, gamma)

    status_x = status_z = "maxit"
    iters = 0
    for it in range(1, opts.maxit + 1):
        iters = it
        p_k, q_k = state.p_curr, state.q_curr
        step = ssy_step(state)
        broke = step.kind != "advanced"
        p_next = None if broke else state.p_curr
        q_next = None if broke else state.q_curr
        ok_x = eng_x.update(step.alpha_i, step.beta_i, step.gamma_i, q_k, q_next)
        ok_z = eng_z.update(qconj(step.alpha_i), step.gamma_i, step.beta_i,
                            p_k, p_next)
        stalled = ok_x is False or ok_z is False

        rr_x = (eng_x.residual_estimate / bnorm if np.isfinite(eng_x.residual_estimate)
                else hist_x[-1])
        rr_z = (eng_z.residual_estimate / cnorm if np.isfinite(eng_z.residual_estimate)
                else hist_z[-1])
        hist_x.append(rr_x)
        hist_z.append(rr_z)

        if broke or stalled:
            status_x = status_z = "breakdown_exact"
            break
        if rr_x <= opts.tol and rr_z <= opts.tol:
            true_x = _true_rr(a, b, eng_x.x, bnorm) if eng_x.x_valid else np.inf
            true_z = (norm2(c - matvec_adj(a, eng_z.x)) / cnorm
                      if eng_z.x_valid else np.inf)
            if true_x <= opts.tol and true_z <= opts.tol:
                status_x = status_z = "converged"
                hist_x[-1], hist_z[-1] = true_x, true_z
                break

    if status_x == "breakdown_exact":
        if eng_x.x_valid:
            hist_x[-1] = _true_rr(a, b, eng_x.x, bnorm)
            if status_x != "converged" and hist_x[-1] <= opts.tol:
                pass  # breakdown_exact already implies an exact certificate
        if eng_z.x_valid:
            hist_z[-1] = norm2(c - matvec_adj(a, eng_z.x)) / cnorm

    wall = time.perf_counter() - t0
    rep_x = SolveReport(eng_x.x.copy(), status_x, iters, hist_x, wall)
    rep_z = SolveReport(eng_z.x.copy(), status_z, iters, hist_z, wall)
    return rep_x, rep_z


def qgmres_solve(a: QuatMatrix, b: QuatVector,
                 opts: SolveOptions | None = None,
                 diag: dict | None = None) -> SolveReport:
    """Minimum-residual baseline over the plain Krylov subspace of A.

    Quaternion Arnoldi (modified Gram-Schmidt, real nonnegative
    subdiagonal) plus a rolling Givens reduction of the upper Hessenberg
    least squares problem; no restarting, so memory grows with the
    iteration count.  Used as a reference method in the experiment
    driver, not as a production solver.
    """
    opts = opts or SolveOptions()
    t0 = time.perf_counter()
    n = a.n
    x0 = opts.x0 if opts.x0 is not None else QuatVector.zeros(n)
    bnorm = norm2(b)
    if bnorm == 0.0:
        return _finish(QuatVector.zeros(n), "converged", 0, [0.0], t0)
    r0 = b - matvec(a, x0) if opts.x0 is not None else b.copy()
    beta = norm2(r0)
    history = [beta / bnorm]
    if history[0] <= opts.tol:
        return _finish(x0.copy(), "converged", 0, history, t0)

    vs = [r0 / beta]
    r_cols: list[list[Quaternion]] = []
    rotations: list = []
    taus: list[Quaternion] = []
    rho = Quaternion(beta)
    abs_rho = beta
    op_scale = 1.0
    status, iters = "maxit", 0

    for j in range(1, opts.maxit + 1):
        iters = j
        w = matvec(a, vs[-1])
        op_scale = max(op_scale, norm2(w))
        col = []
        for v in vs:
            h = inner(w, v)
            w = w - v * h
            col.append(h)
        hnext = norm2(w)
        for g in rotations:
            i = rotations.index(g)
            col[i], col[i + 1] = g.apply(col[i], col[i + 1])
        lucky = hnext <= opts.tau_b * max(1.0, op_scale)
        g, sigma = quat_givens(col[-1], Quaternion(hnext))
        rotations.append(g)
        col[-1] = sigma
        r_cols.append(col)
        taus.append(rho * g.c)
        rho = -qmul(qconj(g.s), rho)
        abs_rho *= min(1.0, qmod(g.s))
        history.append(abs_rho / bnorm)
        if abs_rho / bnorm <= opts.tol or lucky:
            status = "converged" if abs_rho / bnorm <= opts.tol else "breakdown_exact"
            break
        vs.append(w / hnext)

    # back substitution R y = t (left division by the diagonal entries)
    m = len(r_cols)
    ys: list[Quaternion] = [Quaternion()] * m
    for i in range(m - 1, -1, -1):
        acc = taus[i]
        for jj in range(i + 1, m):
            acc = acc - qmul(r_cols[jj][i], ys[jj])
        ys[i] = qmul(qinv(r_cols[i][i]), acc)
    x = x0.copy()
    for v, y in zip(vs[:m], ys):
        x = x + v * y
    final = _true_rr(a, b, x, bnorm)
    if diag is not None:
        diag["rr_true_final"] = final
        diag["krylov_dim"] = m
    if status == "converged" and final > opts.tol:
        status = "maxit"
    history[-1] = final
    return _finish(x, status, iters, history, t0)
