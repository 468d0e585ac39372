"""Pointing-gesture interpretation.

A skeleton frame yields the extended right-forearm line (elbow through
wrist); the pointed-at object is the interactable whose centroid lies
closest to that line:

    d_k = |(l2 - l1) x (l1 - g_k)| / |l2 - l1|

with l1 = elbow, l2 = wrist and g_k the object centroid. The line is
infinite by default; an optional forward-only mode keeps only objects whose
projection falls beyond the wrist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateRay, InvalidInput, MissingJoint, NoCandidates
from .scene import Scene

RIGHT_ELBOW = "right_elbow"
RIGHT_WRIST = "right_wrist"


@dataclass
class SkeletonFrame:
    """Named 3D joints in the base frame at one timestamp."""

    joints: dict[str, np.ndarray]
    timestamp: float = 0.0

    def __post_init__(self):
        clean = {}
        for name, pos in self.joints.items():
            vec = np.asarray(pos, dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise InvalidInput(f"joint {name!r} must be a finite 3-vector")
            clean[name] = vec
        self.joints = clean

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "joints": {name: pos.tolist() for name, pos in self.joints.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SkeletonFrame":
        return cls(
            {name: np.asarray(pos) for name, pos in data["joints"].items()},
            data.get("timestamp", 0.0),
        )

    @classmethod
    def load(cls, path: str | Path) -> "SkeletonFrame":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class DeicticRay:
    """Two distinct points spanning the pointing line."""

    l1: np.ndarray
    l2: np.ndarray

    def __post_init__(self):
        l1 = np.asarray(self.l1, dtype=float)
        l2 = np.asarray(self.l2, dtype=float)
        if l1.shape != (3,) or l2.shape != (3,):
            raise InvalidInput("ray points must be 3-vectors")
        if np.linalg.norm(l2 - l1) <= 1e-6:
            raise DegenerateRay("ray points are closer than 1e-6 m")
        object.__setattr__(self, "l1", l1)
        object.__setattr__(self, "l2", l2)

    @property
    def direction(self) -> np.ndarray:
        return self.l2 - self.l1


@dataclass(frozen=True)
class TargetSelection:
    """Argmin result plus the per-object distances for UI feedback."""

    index: int
    distance: float
    distances: tuple[tuple[int, float], ...]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "distance": self.distance,
            "distances": [[i, d] for i, d in self.distances],
        }


def forearm_ray(skeleton: SkeletonFrame) -> DeicticRay:
    """Pointing line through the right elbow and wrist."""
    for joint in (RIGHT_ELBOW, RIGHT_WRIST):
        if joint not in skeleton.joints:
            raise MissingJoint(f"skeleton lacks {joint}")
    return DeicticRay(skeleton.joints[RIGHT_ELBOW], skeleton.joints[RIGHT_WRIST])


def point_line_distance(ray: DeicticRay, point: np.ndarray) -> float:
    """Distance from a point to the infinite line spanned by the ray."""
    point = np.asarray(point, dtype=float)
    direction = ray.direction
    cross = np.cross(direction, ray.l1 - point)
    return float(np.linalg.norm(cross) / np.linalg.norm(direction))


def select_target(ray: DeicticRay, scene: Scene, forward_only: bool = False) -> TargetSelection:
    """Pick the interactable object nearest to the pointing line.

    Ties break toward the lowest object index. Obstacle-class objects are
    never candidates. With ``forward_only``, objects whose projection onto
    the line falls behind the wrist are skipped.
    """
    candidates = scene.interactable
    if not candidates:
        raise NoCandidates("scene has no interactable objects")
    direction = ray.direction
    denom = float(direction @ direction)
    entries = []
    for obj in candidates:
        if forward_only:
            t = float((obj.centroid - ray.l1) @ direction) / denom
            if t < 1.0:
                continue
        entries.append((obj.index, point_line_distance(ray, obj.centroid)))
    if not entries:
        raise NoCandidates("no object lies on the forward half-line")
    entries.sort(key=lambda item: item[0])
    best_index, best_distance = min(entries, key=lambda item: (item[1], item[0]))
    return TargetSelection(best_index, best_distance, tuple(entries))
