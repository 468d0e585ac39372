"""Desk scene reconstruction.

Turns depth images and instance masks into per-object structural records
(index, width, height, thickness, centroid) expressed in the robot base
frame, and assembles them into a scene the rest of the engine consumes.

Conventions: lengths in meters, pixel (u, v) indexes column/row, a pixel's
ray passes through (u - cx)/fx, (v - cy)/fy. Extents follow the base axes:
width along x, height along y, thickness along z (the ``xyz`` convention;
a z-up alternative maps height to z).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyCluster, InvalidInput

# (width, height, thickness) -> base axis index
AXIS_CONVENTIONS = {
    "xyz": (0, 1, 2),
    "z-up": (0, 2, 1),
}


def _vec3(value) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise InvalidInput(f"expected a 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole model: focal lengths and principal point, in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidInput("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidInput("principal point must lie inside the image")

    def project(self, points: np.ndarray) -> np.ndarray:
        """(N, 3) camera-frame points -> (N, 2) pixel coordinates."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        z = pts[:, 2]
        u = self.cx + pts[:, 0] * self.fx / z
        v = self.cy + pts[:, 1] * self.fy / z
        return np.stack([u, v], axis=1)

    def to_dict(self) -> dict:
        return {
            "fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
            "width": self.width, "height": self.height,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CameraIntrinsics":
        return cls(**{k: data[k] for k in ("fx", "fy", "cx", "cy", "width", "height")})


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid motion: rotation (3x3) plus translation (3,)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float)
        tra = _vec3(self.translation)
        if rot.shape != (3, 3):
            raise InvalidInput("rotation must be 3x3")
        if not np.allclose(rot.T @ rot, np.eye(3), atol=1e-9):
            raise InvalidInput("rotation is not orthonormal")
        if not np.isclose(np.linalg.det(rot), 1.0, atol=1e-9):
            raise InvalidInput("rotation determinant must be +1")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tra)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.rotation.T + self.translation

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)

    def to_dict(self) -> dict:
        return {"rotation": self.rotation.tolist(), "translation": self.translation.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "RigidTransform":
        return cls(np.asarray(data["rotation"]), np.asarray(data["translation"]))


@dataclass
class PointCloud:
    """Unorganized cloud; ``frame`` is either ``camera`` or ``base``.

    ``dropped`` counts masked pixels skipped for invalid depth.
    """

    points: np.ndarray
    frame: str
    dropped: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if pts.size and not np.all(np.isfinite(pts)):
            raise InvalidInput("point cloud contains non-finite coordinates")
        if self.frame not in ("camera", "base"):
            raise InvalidInput(f"unknown frame tag {self.frame!r}")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class StructuralObject:
    """Per-object record: index, extents and centroid in the base frame."""

    index: int
    width: float
    height: float
    thickness: float
    centroid: np.ndarray

    def __post_init__(self):
        if self.index < 0:
            raise InvalidInput("object index must be >= 0")
        if min(self.width, self.height, self.thickness) < 0:
            raise InvalidInput("extents must be non-negative")
        object.__setattr__(self, "centroid", _vec3(self.centroid))

    def extents_vector(self, convention: str = "xyz") -> np.ndarray:
        """Full extents mapped back onto base axes per the convention."""
        w_ax, h_ax, d_ax = AXIS_CONVENTIONS[convention]
        out = np.empty(3)
        out[w_ax] = self.width
        out[h_ax] = self.height
        out[d_ax] = self.thickness
        return out

    def to_dict(self) -> dict:
        return {
            "index": self.index, "w": self.width, "h": self.height,
            "d": self.thickness, "centroid": [float(c) for c in self.centroid],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StructuralObject":
        return cls(data["index"], data["w"], data["h"], data["d"], np.asarray(data["centroid"]))


@dataclass(frozen=True)
class EndEffectorState:
    """6D tool pose (position + unit quaternion xyzw) and gripper opening."""

    pose: np.ndarray
    gripper_opening: float

    def __post_init__(self):
        pose = np.asarray(self.pose, dtype=float)
        if pose.shape != (7,):
            raise InvalidInput("pose must be position(3) + quaternion(4)")
        if not np.isclose(np.linalg.norm(pose[3:]), 1.0, atol=1e-9):
            raise InvalidInput("orientation quaternion is not normalized")
        if self.gripper_opening < 0:
            raise InvalidInput("gripper opening must be >= 0")
        object.__setattr__(self, "pose", pose)

    @property
    def position(self) -> np.ndarray:
        return self.pose[:3]

    @property
    def orientation(self) -> np.ndarray:
        return self.pose[3:]


@dataclass
class Scene:
    """Environment snapshot: objects split by graspability, plus tool state.

    ``poured`` records pour angles applied to objects during execution.
    """

    interactable: list[StructuralObject]
    obstacles: list[StructuralObject]
    effector: EndEffectorState
    gripper_max_width: float
    poured: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.effector.gripper_opening > self.gripper_max_width + 1e-12:
            raise InvalidInput("gripper opening exceeds the gripper's max width")
        indices = [o.index for o in self.interactable + self.obstacles]
        if len(indices) != len(set(indices)):
            raise InvalidInput("object indices must be unique across the scene")
        for obj in self.interactable:
            if obj.width > self.gripper_max_width + 1e-12:
                raise InvalidInput(
                    f"object {obj.index} is wider than the gripper and cannot be interactable"
                )

    def all_objects(self) -> list[StructuralObject]:
        return list(self.interactable) + list(self.obstacles)

    def find(self, index: int) -> StructuralObject | None:
        for obj in self.all_objects():
            if obj.index == index:
                return obj
        return None

    def is_interactable(self, index: int) -> bool:
        return any(o.index == index for o in self.interactable)


def reproject(intrinsics: CameraIntrinsics, depth: np.ndarray, mask: np.ndarray) -> PointCloud:
    """Lift masked depth pixels to a camera-frame cloud via the pinhole model.

    Pixels with non-positive or non-finite depth are skipped; their count is
    reported on the returned cloud.
    """
    depth = np.asarray(depth, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    expected = (intrinsics.height, intrinsics.width)
    if depth.shape != expected or mask.shape != expected:
        raise InvalidInput(
            f"depth {depth.shape} / mask {mask.shape} do not match intrinsics {expected}"
        )
    vs, us = np.nonzero(mask)
    z = depth[vs, us]
    valid = np.isfinite(z) & (z > 0)
    dropped = int(np.count_nonzero(~valid))
    us, vs, z = us[valid], vs[valid], z[valid]
    if z.size == 0:
        raise EmptyCluster("no masked pixel carries valid depth")
    x = (us - intrinsics.cx) * z / intrinsics.fx
    y = (vs - intrinsics.cy) * z / intrinsics.fy
    return PointCloud(np.stack([x, y, z], axis=1), frame="camera", dropped=dropped)


def transform_points(transform: RigidTransform, cloud: PointCloud) -> PointCloud:
    """Map a camera-frame cloud into the base frame."""
    if cloud.frame != "camera":
        raise InvalidInput(f"expected a camera-frame cloud, got {cloud.frame!r}")
    return PointCloud(transform.apply(cloud.points), frame="base", dropped=cloud.dropped)


def summarize(cloud: PointCloud, index: int, convention: str = "xyz") -> StructuralObject:
    """Collapse a base-frame cloud to its structural record.

    Centroid is the per-axis mean; extents are per-axis min/max ranges mapped
    to (width, height, thickness) by the axis convention.
    """
    if len(cloud) == 0:
        raise EmptyCluster("cannot summarize an empty cloud")
    if convention not in AXIS_CONVENTIONS:
        raise InvalidInput(f"unknown axis convention {convention!r}")
    centroid = cloud.points.mean(axis=0)
    spans = cloud.points.max(axis=0) - cloud.points.min(axis=0)
    w_ax, h_ax, d_ax = AXIS_CONVENTIONS[convention]
    return StructuralObject(index, spans[w_ax], spans[h_ax], spans[d_ax], centroid)


def build_scene(
    objects: list[StructuralObject],
    effector: EndEffectorState,
    gripper_max_width: float,
) -> Scene:
    """Split objects by the end-effector width filter.

    Objects wider than the gripper cannot be grasped; they are kept as
    obstacles for planning and collision checking.
    """
    indices = [o.index for o in objects]
    if len(indices) != len(set(indices)):
        raise InvalidInput("duplicate object indices")
    interactable = [o for o in objects if o.width <= gripper_max_width]
    obstacles = [o for o in objects if o.width > gripper_max_width]
    return Scene(interactable, obstacles, effector, gripper_max_width)


# ---------------------------------------------------------------------------
# Scene snapshot files


def scene_to_snapshot(scene: Scene) -> dict:
    objects = []
    for obj in scene.interactable:
        objects.append({**obj.to_dict(), "interactable": True})
    for obj in scene.obstacles:
        objects.append({**obj.to_dict(), "interactable": False})
    objects.sort(key=lambda o: o["index"])
    return {
        "objects": objects,
        "effector": {
            "pose": [float(v) for v in scene.effector.pose],
            "gripper_opening": scene.effector.gripper_opening,
        },
        "gripper_max_width": scene.gripper_max_width,
        "poured": {str(k): v for k, v in sorted(scene.poured.items())},
    }


def scene_from_snapshot(data: dict) -> Scene:
    interactable, obstacles = [], []
    for entry in data["objects"]:
        obj = StructuralObject.from_dict(entry)
        (interactable if entry["interactable"] else obstacles).append(obj)
    effector = EndEffectorState(
        np.asarray(data["effector"]["pose"]), data["effector"]["gripper_opening"]
    )
    scene = Scene(interactable, obstacles, effector, data["gripper_max_width"])
    scene.poured = {int(k): float(v) for k, v in data.get("poured", {}).items()}
    return scene


def save_scene(scene: Scene, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scene_to_snapshot(scene), indent=2, sort_keys=True))


def load_scene(path: str | Path) -> Scene:
    return scene_from_snapshot(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Depth image ingestion


def read_depth_pgm(path: str | Path, unit_scale: float = 0.001) -> np.ndarray:
    """Read a binary 16-bit PGM depth image and convert to meters.

    ``unit_scale`` converts stored integers to meters (0.001 for millimeter
    sensors). Big-endian sample order per the PGM specification.
    """
    raw = Path(path).read_bytes()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        # header tokens are whitespace separated, '#' starts a comment line
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(raw[start:pos])
    if fields[0] != b"P5":
        raise InvalidInput("only binary (P5) PGM depth images are supported")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    pos += 1  # single whitespace byte after maxval
    dtype = ">u2" if maxval > 255 else np.uint8
    data = np.frombuffer(raw, dtype=dtype, count=width * height, offset=pos)
    return data.reshape(height, width).astype(float) * unit_scale


def read_depth_raw(path: str | Path, meta: dict | str | Path) -> np.ndarray:
    """Read raw binary depth with sidecar metadata.

    ``meta`` is a dict or path to JSON with keys ``width``, ``height``,
    ``unit_scale`` and optional ``dtype`` (default ``<u2``).
    """
    if not isinstance(meta, dict):
        meta = json.loads(Path(meta).read_text())
    dtype = np.dtype(meta.get("dtype", "<u2"))
    width, height = int(meta["width"]), int(meta["height"])
    data = np.fromfile(str(path), dtype=dtype, count=width * height)
    if data.size != width * height:
        raise InvalidInput("raw depth file shorter than width*height samples")
    return data.reshape(height, width).astype(float) * float(meta["unit_scale"])
