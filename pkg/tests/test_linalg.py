import math

import numpy as np
import pytest

from quatsp.quaternion import I, J, K, ONE, Quaternion, qconj, qmod, qmul
from quatsp.linalg import (GivensQ, QuatMatrix, QuatVector, direct_solve_dense,
                           inner, jrs_check, matvec, matvec_adj, norm2,
                           quat_givens, quat_givens_row, real_rep,
                           real_rep_col, real_rep_col_inv, upsilon_rep,
                           upsilon_vec)

from conftest import (assert_quat_close, random_matrix, random_quaternion,
                      random_sparse_matrix, random_vector)


def brute_matvec(a: QuatMatrix, x: QuatVector) -> QuatVector:
    """Definitional oracle: elementwise quaternion multiply-accumulate."""
    ad = a.to_dense()
    out = QuatVector.zeros(a.m)
    for i in range(a.m):
        acc = Quaternion()
        for j in range(a.n):
            acc = acc + qmul(ad.entry(i, j), x[j])
        out.planes[:, i] = (acc.w, acc.x, acc.y, acc.z)
    return out


def brute_matvec_adj(a: QuatMatrix, x: QuatVector) -> QuatVector:
    ad = a.to_dense()
    out = QuatVector.zeros(a.n)
    for i in range(a.n):
        acc = Quaternion()
        for j in range(a.m):
            acc = acc + qmul(qconj(ad.entry(j, i)), x[j])
        out.planes[:, i] = (acc.w, acc.x, acc.y, acc.z)
    return out


class TestInner:
    def test_unit_vectors(self):
        e1 = QuatVector.basis(3, 0)
        e2 = QuatVector.basis(3, 1)
        assert inner(e1, e1) == ONE
        assert inner(e1, e2) == Quaternion()

    def test_right_linearity(self, rng):
        for _ in range(25):
            x, y = random_vector(rng, 6), random_vector(rng, 6)
            a = random_quaternion(rng)
            lhs = inner(x * a, y)
            rhs = qmul(inner(x, y), a)
            assert_quat_close(lhs, rhs, ulps=64,
                              scale=norm2(x) * norm2(y) * qmod(a))

    def test_hermiticity(self, rng):
        x, y = random_vector(rng, 5), random_vector(rng, 5)
        assert_quat_close(inner(x, y), qconj(inner(y, x)), ulps=4,
                          scale=norm2(x) * norm2(y))

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            inner(QuatVector.zeros(3), QuatVector.zeros(4))


class TestNorm2:
    def test_zero(self):
        assert norm2(QuatVector.zeros(4)) == 0.0

    def test_unit_example(self):
        x = QuatVector.zeros(2)
        x.planes[:, 0] = 1.0  # first entry 1+i+j+k
        assert norm2(x) == 2.0

    def test_matches_stacked_euclidean(self, rng):
        x = random_vector(rng, 9)
        assert norm2(x) == np.linalg.norm(x.planes)

    def test_matches_inner(self, rng):
        x = random_vector(rng, 7)
        assert norm2(x) == pytest.approx(math.sqrt(inner(x, x).w), rel=1e-14)


class TestRealRep:
    def test_scalar_one(self):
        m = QuatMatrix.from_real(np.array([[1.0]]))
        assert np.array_equal(real_rep(m), np.eye(4))

    def test_scalar_i_block_layout(self):
        m = QuatMatrix.zeros(1, 1)
        m.planes[1][0, 0] = 1.0
        expected = np.array([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ])
        assert np.array_equal(real_rep(m), expected)

    def test_homomorphism(self, rng):
        a, b = random_matrix(rng, 3), random_matrix(rng, 3)
        assert np.max(np.abs(real_rep(a @ b) - real_rep(a) @ real_rep(b))) < 1e-12
        assert np.max(np.abs(real_rep(a + b) - (real_rep(a) + real_rep(b)))) == 0.0

    def test_adjoint_is_transpose(self, rng):
        a = random_matrix(rng, 4)
        assert np.array_equal(real_rep(a.conjugate_transpose()), real_rep(a).T)


class TestRealRepCol:
    def test_scalar_one(self):
        m = QuatMatrix.from_real(np.array([[1.0]]))
        assert np.array_equal(real_rep_col(m).ravel(), [1, 0, 0, 0])

    def test_scalar_i(self):
        m = QuatMatrix.zeros(1, 1)
        m.planes[1][0, 0] = 1.0
        assert np.array_equal(real_rep_col(m).ravel(), [0, 0, -1, 0])

    def test_first_columns_of_full_rep(self, rng):
        a = random_matrix(rng, 3, 5)
        assert np.array_equal(real_rep(a)[:, :5], real_rep_col(a))

    def test_vector_roundtrip(self, rng):
        x = random_vector(rng, 6)
        back = real_rep_col_inv(real_rep_col(x), 6)
        assert np.array_equal(back.planes, x.planes)

    def test_matvec_via_real_rep(self, rng):
        # R(Ax)_c = R(A) R(x)_c: the identity the plane kernel realises
        a, x = random_matrix(rng, 4), random_vector(rng, 4)
        lhs = real_rep_col(matvec(a, x))
        rhs = real_rep(a) @ real_rep_col(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestMatvec:
    def test_identity(self, rng):
        x = random_vector(rng, 5)
        y = matvec(QuatMatrix.identity(5), x)
        assert np.allclose(y.planes, x.planes)

    def test_scalar_ij(self):
        a = QuatMatrix.zeros(1, 1)
        a.planes[1][0, 0] = 1.0  # A = i
        x = QuatVector.zeros(1)
        x.planes[2][0] = 1.0  # x = j
        y = matvec(a, x)
        assert y[0] == K

    def test_sparse_vs_brute_force(self, rng):
        a = random_sparse_matrix(rng, 20)
        x = random_vector(rng, 20)
        got = matvec(a, x)
        want = brute_matvec(a, x)
        assert np.max(np.abs(got.planes - want.planes)) < 1e-13

    def test_dense_vs_brute_force(self, rng):
        a = random_matrix(rng, 9)
        x = random_vector(rng, 9)
        assert np.max(np.abs(matvec(a, x).planes -
                             brute_matvec(a, x).planes)) < 1e-13

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="dimension"):
            matvec(QuatMatrix.identity(3), QuatVector.zeros(4))

    def test_upsilon_consistency(self, rng):
        a, x = random_matrix(rng, 6), random_vector(rng, 6)
        lhs = upsilon_vec(matvec(a, x))
        rhs = upsilon_rep(a) @ upsilon_vec(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestMatvecAdj:
    def test_identity(self, rng):
        x = random_vector(rng, 5)
        y = matvec_adj(QuatMatrix.identity(5), x)
        assert np.allclose(y.planes, x.planes)

    def test_scalar_case(self):
        a = QuatMatrix.zeros(1, 1)
        a.planes[1][0, 0] = 1.0  # A = i, so A* = -i
        x = QuatVector.zeros(1)
        x.planes[3][0] = 1.0  # x = k
        assert matvec_adj(a, x)[0] == qmul(-I, K)
        assert qmul(-I, K) == J

    def test_vs_brute_force(self, rng):
        a = random_matrix(rng, 15)
        x = random_vector(rng, 15)
        assert np.max(np.abs(matvec_adj(a, x).planes -
                             brute_matvec_adj(a, x).planes)) < 1e-13

    def test_adjointness(self, rng):
        for _ in range(10):
            a = random_matrix(rng, 7)
            x, y = random_vector(rng, 7), random_vector(rng, 7)
            lhs = inner(matvec(a, x), y)
            rhs = inner(x, matvec_adj(a, y))
            scale = a.fro_norm() * norm2(x) * norm2(y)
            assert qmod(lhs - rhs) < 1e-12 * scale


class TestJrsCheck:
    def test_real_rep_passes(self, rng):
        assert jrs_check(real_rep(random_matrix(rng, 3, 5)))
        assert jrs_check(real_rep(random_sparse_matrix(rng, 6)))

    def test_identity_passes(self):
        assert jrs_check(np.eye(4))

    def test_perturbation_fails(self, rng):
        w = real_rep(random_matrix(rng, 3))
        w[1, 2] += 1.0
        assert not jrs_check(w)

    def test_bad_shape(self):
        with pytest.raises(ValueError, match="multiples of 4"):
            jrs_check(np.eye(6))


class TestQuatGivens:
    def test_trivial(self):
        g, xi = quat_givens(ONE, Quaternion())
        assert g.c == 1.0 and g.s == Quaternion() and xi == ONE

    def test_zero_first_branch(self):
        x2 = Quaternion(0.5, -1.0, 2.0, 0.25)
        g, xi = quat_givens(Quaternion(), x2)
        assert g.c == 0.0 and g.s == ONE and xi == x2

    def test_real_specialisation(self):
        g, xi = quat_givens(Quaternion(3.0), Quaternion(4.0))
        assert g.c == pytest.approx(0.6)
        assert g.s.w == pytest.approx(0.8)
        assert xi.w == pytest.approx(5.0)

    def test_annihilates_and_preserves_norm(self, rng):
        for _ in range(50):
            x1, x2 = random_quaternion(rng), random_quaternion(rng)
            g, xi = quat_givens(x1, x2)
            top, bottom = g.apply(x1, x2)
            assert qmod(bottom) < 1e-14 * math.hypot(qmod(x1), qmod(x2))
            assert_quat_close(top, xi, ulps=32, scale=qmod(xi))
            assert qmod(xi) == pytest.approx(math.hypot(qmod(x1), qmod(x2)),
                                             rel=1e-14)
            assert g.c ** 2 + g.s.norm_sq() == pytest.approx(1.0, abs=1e-14)

    def test_both_zero_raises(self):
        with pytest.raises(ValueError):
            quat_givens(Quaternion(), Quaternion())

    def test_unitarity_bridge(self, rng):
        # the embedded rotation has an orthogonal, JRS-symmetric real rep
        g, _ = quat_givens(random_quaternion(rng), random_quaternion(rng))
        m = real_rep(g.as_matrix())
        assert np.max(np.abs(m.T @ m - np.eye(8))) < 1e-13
        assert jrs_check(m, tol=1e-13)


class TestQuatGivensRow:
    def test_trivial(self):
        c, s, xi = quat_givens_row(ONE, Quaternion())
        assert c == 1.0 and s == Quaternion() and xi == ONE

    def test_zero_first_branch(self):
        c, s, xi = quat_givens_row(Quaternion(), ONE)
        assert c == 0.0 and s == ONE and xi == ONE

    def test_real_specialisation(self):
        c, s, xi = quat_givens_row(Quaternion(3.0), Quaternion(4.0))
        assert c == pytest.approx(0.6)
        assert s.w == pytest.approx(0.8)
        assert xi.w == pytest.approx(5.0)

    def test_row_action(self, rng):
        for _ in range(50):
            y1, y2 = random_quaternion(rng), random_quaternion(rng)
            c, s, xi = quat_givens_row(y1, y2)
            # [y1, y2] [c, s; s*, -c]
            left = y1 * c + qmul(y2, qconj(s))
            right = qmul(y1, s) - y2 * c
            assert qmod(right) < 1e-14 * math.hypot(qmod(y1), qmod(y2))
            assert_quat_close(left, xi, ulps=32, scale=qmod(xi))


class TestKernelCost:
    def test_plane_touch_counter(self, rng):
        a = random_sparse_matrix(rng, 12, density=0.25)
        x = random_vector(rng, 12)
        a.reset_counters()
        matvec(a, x)
        assert a.matvec_count == 1
        assert a.plane_entry_touches == 4 * a.nnz_total
        matvec_adj(a, x)
        assert a.matvec_adj_count == 1
        assert a.plane_entry_touches == 8 * a.nnz_total


class TestDirectSolve:
    def test_roundtrip(self, rng):
        from conftest import random_well_conditioned_matrix
        a = random_well_conditioned_matrix(rng, 8)
        x = random_vector(rng, 8)
        b = matvec(a, x)
        got = direct_solve_dense(a, b)
        assert np.max(np.abs(got.planes - x.planes)) < 1e-10
