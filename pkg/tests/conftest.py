"""Shared helpers: seeded random quaternion data and ulp-scale assertions."""

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from quatsp.quaternion import Quaternion, qmod
from quatsp.linalg import QuatMatrix, QuatVector

EPS = np.finfo(float).eps

finite_components = st.floats(min_value=-1e3, max_value=1e3,
                              allow_nan=False, allow_infinity=False)

quaternions = st.builds(Quaternion, finite_components, finite_components,
                        finite_components, finite_components)

nonzero_quaternions = quaternions.filter(lambda q: qmod(q) > 1e-6)


def assert_quat_close(a: Quaternion, b: Quaternion, ulps: float = 16,
                      scale: float | None = None):
    """|a - b| <= ulps * eps * scale, scale defaulting to max magnitude."""
    if scale is None:
        scale = max(qmod(a), qmod(b), 1e-30)
    err = qmod(a - b)
    assert err <= ulps * EPS * scale, f"{a} vs {b}: err={err:.3e} scale={scale:.3e}"


def assert_real_close(a: float, b: float, ulps: float = 16,
                      scale: float | None = None):
    if scale is None:
        scale = max(abs(a), abs(b), 1e-30)
    assert abs(a - b) <= ulps * EPS * scale, f"{a} vs {b}"


def random_quaternion(rng) -> Quaternion:
    return Quaternion(*rng.standard_normal(4))


def random_vector(rng, n: int) -> QuatVector:
    return QuatVector(rng.standard_normal((4, n)))


def random_matrix(rng, m: int, n: int | None = None) -> QuatMatrix:
    n = m if n is None else n
    return QuatMatrix(list(rng.standard_normal((4, m, n))))


def random_sparse_matrix(rng, m: int, n: int | None = None,
                         density: float = 0.3) -> QuatMatrix:
    import scipy.sparse as sp
    n = m if n is None else n
    planes = []
    for _ in range(4):
        mask = rng.random((m, n)) < density
        vals = rng.standard_normal((m, n)) * mask
        planes.append(sp.csr_matrix(vals))
    return QuatMatrix(planes)


def random_well_conditioned_matrix(rng, n: int, shift: float = 2.0) -> QuatMatrix:
    planes = list(rng.standard_normal((4, n, n)) * (0.5 / math.sqrt(n)))
    planes[0] = planes[0] + shift * np.eye(n)
    return QuatMatrix(planes)


def random_hermitian_matrix(rng, n: int) -> QuatMatrix:
    a = random_matrix(rng, n)
    h = a + a.conjugate_transpose()
    return QuatMatrix([0.5 * p for p in h.planes])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
