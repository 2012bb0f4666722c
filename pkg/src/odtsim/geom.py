"""3-vectors and unit quaternions.

Coordinate convention used everywhere in the package: right-handed, Y is up,
the walking surface is the X-Z plane. Quaternions are stored (w, x, y, z) and
rotate vectors actively, ``v' = q * (0, v) * q^-1``.
"""

from __future__ import annotations

import math
from typing import Iterator


class GeometryError(ValueError):
    pass


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError("non-finite operand")


class Vec3:
    """Immutable 3-vector of floats."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    @classmethod
    def from_seq(cls, seq) -> "Vec3":
        if len(seq) == 2:
            # planar shorthand: (x, z)
            return cls(seq[0], 0.0, seq[1])
        x, y, z = seq
        return cls(x, y, z)

    @classmethod
    def planar(cls, x: float, z: float) -> "Vec3":
        return cls(x, 0.0, z)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def __repr__(self) -> str:
        return f"Vec3({self.x!r}, {self.y!r}, {self.z!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vec3):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.z == other.z

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.z))

    def __add__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Vec3":
        return Vec3(self.x / s, self.y / s, self.z / s)

    def dot(self, o: "Vec3") -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o: "Vec3") -> "Vec3":
        return Vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def xz(self) -> "Vec3":
        """Projection onto the walking plane (Y zeroed)."""
        return Vec3(self.x, 0.0, self.z)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


ZERO = Vec3()


class UnitQuat:
    """Unit quaternion (w, x, y, z). The constructor renormalizes."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w: float = 1.0, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        _check_finite(w, x, y, z)
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n == 0.0:
            raise GeometryError("zero-norm quaternion")
        self.w = w / n
        self.x = x / n
        self.y = y / n
        self.z = z / n

    @classmethod
    def identity(cls) -> "UnitQuat":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Vec3, angle: float) -> "UnitQuat":
        n = axis.norm()
        if n == 0.0:
            raise GeometryError("zero rotation axis")
        s = math.sin(angle / 2.0) / n
        return cls(math.cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s)

    @classmethod
    def from_yaw(cls, angle: float) -> "UnitQuat":
        """Rotation about +Y (heading on the walking plane)."""
        return cls(math.cos(angle / 2.0), 0.0, math.sin(angle / 2.0), 0.0)

    def __iter__(self) -> Iterator[float]:
        yield self.w
        yield self.x
        yield self.y
        yield self.z

    def __repr__(self) -> str:
        return f"UnitQuat({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def __mul__(self, o: "UnitQuat") -> "UnitQuat":
        return UnitQuat(*_hamilton(tuple(self), tuple(o)))

    def inverse(self) -> "UnitQuat":
        return quat_inverse(self)

    def rotate(self, v: Vec3) -> Vec3:
        return quat_rotate(self, v)


def _hamilton(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_inverse(q: UnitQuat) -> UnitQuat:
    _check_finite(q.w, q.x, q.y, q.z)
    return UnitQuat(q.w, -q.x, -q.y, -q.z)


def quat_rotate(q: UnitQuat, v: Vec3) -> Vec3:
    """Rotate ``v`` by ``q`` using the sandwich product ``q * (0, v) * q^-1``."""
    _check_finite(q.w, q.x, q.y, q.z, v.x, v.y, v.z)
    qv = _hamilton((q.w, q.x, q.y, q.z), (0.0, v.x, v.y, v.z))
    _, x, y, z = _hamilton(qv, (q.w, -q.x, -q.y, -q.z))
    return Vec3(x, y, z)


def rotate_about_y(v: Vec3, angle: float) -> Vec3:
    """Right-handed rotation about +Y; (1, 0, 0) at 90 deg goes to (0, 0, -1)."""
    c = math.cos(angle)
    s = math.sin(angle)
    return Vec3(c * v.x + s * v.z, v.y, -s * v.x + c * v.z)
