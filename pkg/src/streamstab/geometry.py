"""Quaternion and pose primitives shared by every other module.

Quaternions are scalar-first (w, x, y, z) internally; the file I/O layer
converts to/from on-disk conventions. All operations are pure functions on
immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGamma, NonUnitQuaternion, ZeroQuaternion

_UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a) -> "Quaternion":
        return Quaternion(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @staticmethod
    def identity() -> "Quaternion":
        return Quaternion(1.0, 0.0, 0.0, 0.0)

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def dot(self, other: "Quaternion") -> float:
        return (self.w * other.w + self.x * other.x
                + self.y * other.y + self.z * other.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def multiply(self, other: "Quaternion") -> "Quaternion":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Quaternion(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def to_matrix(self) -> np.ndarray:
        """Rotation matrix of a unit quaternion."""
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])


@dataclass(frozen=True)
class Pose:
    t: np.ndarray  # 3-vector translation
    q: Quaternion
    timestamp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(3))


@dataclass
class Trajectory:
    poses: list[Pose] = field(default_factory=list)

    def __post_init__(self):
        ts = [p.timestamp for p in self.poses]
        for a, b in zip(ts, ts[1:]):
            if not b > a:
                raise ValueError(
                    f"timestamps must be strictly increasing ({a} -> {b})")

    def __len__(self) -> int:
        return len(self.poses)

    def __iter__(self):
        return iter(self.poses)

    def __getitem__(self, i):
        return self.poses[i]

    def translations(self) -> np.ndarray:
        return np.array([p.t for p in self.poses]).reshape(-1, 3)

    def quaternions(self) -> np.ndarray:
        return np.array([p.q.as_array() for p in self.poses]).reshape(-1, 4)

    def timestamps(self) -> np.ndarray:
        return np.array([p.timestamp for p in self.poses])


@dataclass(frozen=True)
class PointSet:
    """Point cloud with optional per-point positive confidences."""

    points: np.ndarray  # (n, 3)
    confidences: np.ndarray | None = None  # (n,)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "points", pts)
        if self.confidences is not None:
            conf = np.asarray(self.confidences, dtype=float).reshape(-1)
            if conf.shape[0] != pts.shape[0]:
                raise ValueError("confidences length must match points")
            object.__setattr__(self, "confidences", conf)

    def __len__(self) -> int:
        return self.points.shape[0]


def quat_normalize(q: Quaternion) -> Quaternion:
    n = q.norm()
    if n < 1e-12:
        raise ZeroQuaternion("cannot normalize a zero quaternion")
    return Quaternion(q.w / n, q.x / n, q.y / n, q.z / n)


def _require_unit(q: Quaternion, name: str = "quaternion"):
    if abs(q.norm() - 1.0) > _UNIT_TOL:
        raise NonUnitQuaternion(f"{name} has norm {q.norm()}, expected 1")


def quat_geodesic_angle(a: Quaternion, b: Quaternion) -> float:
    """Rotation angle in [0, pi] between two unit quaternions.

    Uses |a.b| so q and -q (same rotation) give angle 0.
    """
    _require_unit(a, "a")
    _require_unit(b, "b")
    return 2.0 * math.acos(min(1.0, abs(a.dot(b))))


def slerp(a: Quaternion, b: Quaternion, gamma: float) -> Quaternion:
    """Spherical linear interpolation from a to b at fraction gamma.

    b is hemisphere-aligned to a first; near-parallel inputs fall back to
    normalized linear interpolation.
    """
    if not 0.0 <= gamma <= 1.0:
        raise InvalidGamma(f"gamma {gamma} outside [0, 1]")
    av, bv = a.as_array(), b.as_array()
    dot = float(np.dot(av, bv))
    if dot < 0.0:
        bv = -bv
        dot = -dot
    dot = min(1.0, dot)
    theta = math.acos(dot)
    sin_theta = math.sin(theta)
    if sin_theta < 1e-6:
        out = (1.0 - gamma) * av + gamma * bv
    else:
        out = (math.sin((1.0 - gamma) * theta) * av
               + math.sin(gamma * theta) * bv) / sin_theta
    out = out / np.linalg.norm(out)
    return Quaternion.from_array(out)


def relative_pose(prev: Pose, cur: Pose) -> tuple[np.ndarray, float]:
    """Translation difference and geodesic rotation angle between two poses."""
    delta_t = cur.t - prev.t
    delta_angle = quat_geodesic_angle(prev.q, cur.q)
    return delta_t, delta_angle
