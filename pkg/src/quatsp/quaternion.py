"""Scalar quaternion arithmetic over the basis {1, i, j, k}.

A quaternion q = w + x*i + y*j + z*k is stored as four doubles in the
component order (w, x, y, z).  Multiplication follows Hamilton's rules
i^2 = j^2 = k^2 = ijk = -1, so for p = (pw, px, py, pz) and
q = (qw, qx, qy, qz),

    [w]   [pw  -px  -py  -pz] [qw]
    [x] = [px   pw  -pz   py] [qx]
    [y]   [py   pz   pw  -px] [qy]
    [z]   [pz  -py   px   pw] [qz]

The product is associative but not commutative (i*j = k, j*i = -k), the
conjugate reverses products ((pq)* = q* p*), and the modulus is
multiplicative (|pq| = |p||q|).

Values are immutable plain doubles; every operation here is reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Quaternion:
    """One quaternion scalar with components in (w, x, y, z) order."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        return qmul(self, other)

    def __rmul__(self, other):
        # real scalars commute with quaternions
        if isinstance(other, (int, float)):
            return self * other
        return qmul(_coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other,
                              self.y / other, self.z / other)
        return qmul(self, qinv(other))

    def __abs__(self):
        return qmod(self)

    def conjugate(self):
        return qconj(self)

    def inverse(self):
        return qinv(self)

    def norm_sq(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def real(self):
        return self.w

    def imag_max(self):
        """Largest imaginary component in absolute value."""
        return max(abs(self.x), abs(self.y), abs(self.z))

    def is_zero(self):
        return self.w == 0.0 and self.x == 0.0 and self.y == 0.0 and self.z == 0.0

    def __str__(self):
        return f"{self.w:g}{self.x:+g}i{self.y:+g}j{self.z:+g}k"


ZERO = Quaternion()
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def _coerce(value) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float)):
        return Quaternion(float(value))
    raise TypeError(f"cannot interpret {type(value).__name__} as a quaternion")


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b (noncommutative)."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def qconj(q: Quaternion) -> Quaternion:
    """Conjugate: negates the three imaginary components."""
    return Quaternion(q.w, -q.x, -q.y, -q.z)


def qmod(q: Quaternion) -> float:
    """Modulus sqrt(w^2 + x^2 + y^2 + z^2)."""
    return math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z)


def qinv(q: Quaternion) -> Quaternion:
    """Inverse q* / |q|^2 of a nonzero quaternion."""
    m2 = q.norm_sq()
    if m2 == 0.0:
        raise ValueError("non-invertible quaternion: zero modulus")
    return Quaternion(q.w / m2, -q.x / m2, -q.y / m2, -q.z / m2)
