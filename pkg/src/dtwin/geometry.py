"""Shared 3D math: rotations, rigid transforms, lines, joints, meshes, point sets.

Conventions: points are float64 arrays of shape (3,) or (N, 3); objects are
normalized into the unit cube centered at the origin; revolute states are
radians in (-pi, pi]. All functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-6


class OnAxisError(ValueError):
    """Query point lies (numerically) on the axis line; caller should resample."""


def as_unit(v, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate and return a unit-norm float64 3-vector."""
    v = np.asarray(v, dtype=np.float64).reshape(3)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or abs(n - 1.0) > tol:
        raise ValueError(f"expected unit vector, got norm {n!r}")
    return v


def normalized(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(3)
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero vector")
    return v / n


@dataclass(frozen=True)
class RigidTransform:
    """Rotation (3x3, det +1) followed by translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if np.linalg.norm(R @ R.T - np.eye(3)) > 1e-6 or abs(np.linalg.det(R) - 1.0) > 1e-6:
            raise ValueError("rotation must be orthonormal with determinant +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    def apply(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self @ other)(p) = self(other(p))."""
        return RigidTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)


@dataclass(frozen=True)
class Line:
    """Infinite line through `point` along unit `direction`."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=np.float64).reshape(3))
        object.__setattr__(self, "direction", as_unit(self.direction))


@dataclass(frozen=True)
class PrismaticJoint:
    axis: np.ndarray            # unit translation direction
    state: float = 0.0          # translation distance between the two observations

    def __post_init__(self):
        object.__setattr__(self, "axis", as_unit(self.axis))
        object.__setattr__(self, "state", float(self.state))


@dataclass(frozen=True)
class RevoluteJoint:
    axis: np.ndarray            # unit rotation axis direction
    pivot: np.ndarray           # any point on the axis line
    state: float = 0.0          # rotation angle (radians) between the two observations

    def __post_init__(self):
        object.__setattr__(self, "axis", as_unit(self.axis))
        object.__setattr__(self, "pivot", np.asarray(self.pivot, dtype=np.float64).reshape(3))
        s = float(self.state)
        if not -np.pi < s <= np.pi + 1e-12:
            raise ValueError(f"revolute state {s} outside (-pi, pi]")
        object.__setattr__(self, "state", s)

    def axis_line(self) -> Line:
        return Line(self.pivot, self.axis)


JointModel = PrismaticJoint | RevoluteJoint


def joint_with_state(joint: JointModel, state: float) -> JointModel:
    if isinstance(joint, PrismaticJoint):
        return PrismaticJoint(joint.axis, state)
    return RevoluteJoint(joint.axis, joint.pivot, state)


@dataclass
class TriangleMesh:
    """Indexed triangle mesh; vertices (V, 3) float64, triangles (T, 3) int."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.triangles) and self.triangles.max() >= len(self.vertices):
            raise ValueError("triangle index out of range")
        if len(self.triangles) and self.triangles.min() < 0:
            raise ValueError("negative triangle index")

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    def corners(self):
        """Per-triangle corner arrays (a, b, c), each (T, 3)."""
        v, t = self.vertices, self.triangles
        return v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]

    def areas(self) -> np.ndarray:
        a, b, c = self.corners()
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def transformed(self, tf: RigidTransform) -> "TriangleMesh":
        return TriangleMesh(tf.apply(self.vertices), self.triangles.copy())

    def merged(self, other: "TriangleMesh") -> "TriangleMesh":
        verts = np.vstack([self.vertices, other.vertices])
        tris = np.vstack([self.triangles, other.triangles + len(self.vertices)])
        return TriangleMesh(verts, tris)


def rodrigues(axis, angle: float) -> RigidTransform:
    """Pure rotation about a unit axis through the origin by `angle` radians."""
    u = as_unit(axis)
    c, s = np.cos(angle), np.sin(angle)
    K = np.array([[0.0, -u[2], u[1]],
                  [u[2], 0.0, -u[0]],
                  [-u[1], u[0], 0.0]])
    R = np.eye(3) + s * K + (1.0 - c) * (K @ K)
    return RigidTransform(R, np.zeros(3))


def joint_transform(joint: JointModel) -> RigidTransform:
    """Rigid displacement of the mobile part implied by the joint at its state.

    Prismatic: p -> p + state * axis. Revolute: p -> R (p - pivot) + pivot.
    """
    if isinstance(joint, PrismaticJoint):
        return RigidTransform(np.eye(3), joint.state * joint.axis)
    rot = rodrigues(joint.axis, joint.state)
    t = joint.pivot - rot.rotation @ joint.pivot
    return RigidTransform(rot.rotation, t)


def project_point_to_line(p, line: Line, on_axis_tol: float = 1e-9):
    """Decompose p relative to a line: unit direction d and distance h >= 0 with
    p + h*d on the line and d perpendicular to the line direction.

    Raises OnAxisError when p is within `on_axis_tol` of the line.
    """
    p = np.asarray(p, dtype=np.float64).reshape(3)
    rel = p - line.point
    foot = line.point + (rel @ line.direction) * line.direction
    delta = foot - p
    h = np.linalg.norm(delta)
    if h <= on_axis_tol:
        raise OnAxisError(f"point within {on_axis_tol} of the axis line")
    return delta / h, float(h)


def line_line_distance(a: Line, b: Line) -> float:
    """Minimum Euclidean distance between two infinite lines (parallel-safe)."""
    n = np.cross(a.direction, b.direction)
    diff = b.point - a.point
    n_norm = np.linalg.norm(n)
    if n_norm < 1e-9:  # parallel: distance from b.point to line a
        return float(np.linalg.norm(diff - (diff @ a.direction) * a.direction))
    return float(abs(diff @ n) / n_norm)


def axis_angle_error(u, v) -> float:
    """Angle between two axis directions, modulo sign flip: min(theta, pi - theta)."""
    u = as_unit(u)
    v = as_unit(v)
    theta = np.arccos(np.clip(u @ v, -1.0, 1.0))
    return float(min(theta, np.pi - theta))


def sample_mesh_surface(mesh: TriangleMesh, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform area-weighted surface samples, (n, 3)."""
    if mesh.is_empty:
        raise ValueError("cannot sample an empty mesh")
    areas = mesh.areas()
    total = areas.sum()
    if total <= 0:
        raise ValueError("mesh has zero total area")
    tri_idx = rng.choice(len(areas), size=n, p=areas / total)
    a, b, c = mesh.corners()
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    w0 = 1.0 - r1
    w1 = r1 * (1.0 - r2)
    w2 = r1 * r2
    return (w0[:, None] * a[tri_idx] + w1[:, None] * b[tri_idx] + w2[:, None] * c[tri_idx])


def edge_use_counts(mesh: TriangleMesh) -> dict[tuple[int, int], int]:
    """Undirected edge -> number of incident triangles."""
    counts: dict[tuple[int, int], int] = {}
    for tri in mesh.triangles:
        for i in range(3):
            e = (int(tri[i]), int(tri[(i + 1) % 3]))
            key = (min(e), max(e))
            counts[key] = counts.get(key, 0) + 1
    return counts


def is_edge_manifold(mesh: TriangleMesh) -> bool:
    """Every undirected edge is shared by exactly two triangles (closed surface)."""
    if mesh.is_empty:
        return False
    return all(c == 2 for c in edge_use_counts(mesh).values())
