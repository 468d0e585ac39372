"""Swept-volume collision cross-check and the regenerate-on-collision loop.

Scenes reduce to axis-aligned boxes. A carried box translating along a
straight waypoint segment sweeps exactly the volume covered by testing the
segment against each obstacle expanded by the carried box's half extents
(Minkowski expansion), so the checker needs no sampling: a closed-set slab
test per segment and obstacle decides collision exactly. Boundary contact
counts as collision.

In-place rotations (pour steps) are handled conservatively by inflating the
carried box to its circumscribed sphere radius on every axis.

Sequences only reach execution after a Clear verdict; the verdict carries
the checked sequence's digest so the executor can enforce that gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import InvalidInput, PlanningFailed
from .grammar import Intention
from .planning import ActionSequence, Planner, PlannerFeedback
from .scene import Scene, StructuralObject


@dataclass(frozen=True)
class Box3:
    """Axis-aligned box: center plus half extents, meters."""

    center: np.ndarray
    half_extents: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        half = np.asarray(self.half_extents, dtype=float)
        if center.shape != (3,) or half.shape != (3,):
            raise InvalidInput("box center/half_extents must be 3-vectors")
        if not (np.all(np.isfinite(center)) and np.all(np.isfinite(half))):
            raise InvalidInput("box coordinates must be finite")
        if np.any(half < 0):
            raise InvalidInput("half extents must be >= 0")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_extents", half)

    @classmethod
    def from_object(cls, obj: StructuralObject, convention: str = "xyz") -> "Box3":
        return cls(obj.centroid, obj.extents_vector(convention) / 2)

    def expanded(self, half: np.ndarray) -> "Box3":
        return Box3(self.center, self.half_extents + half)

    def contains(self, point: np.ndarray) -> bool:
        return bool(np.all(np.abs(np.asarray(point) - self.center) <= self.half_extents))


@dataclass(frozen=True)
class CheckResult:
    """Clear, or the earliest collision (step, contact point, obstacle)."""

    clear: bool
    sequence_digest: str
    step: int | None = None
    point: np.ndarray | None = None
    obstacle: int | None = None

    def __post_init__(self):
        if self.clear and (self.step is not None or self.point is not None):
            raise InvalidInput("a clear verdict carries no collision data")
        if not self.clear and (self.step is None or self.point is None or self.obstacle is None):
            raise InvalidInput("a collision verdict needs step, point and obstacle")
        if self.point is not None:
            object.__setattr__(self, "point", np.asarray(self.point, dtype=float))

    def to_dict(self) -> dict:
        data: dict = {"verdict": "clear" if self.clear else "collision"}
        if not self.clear:
            data.update(
                step=self.step,
                point=[float(v) for v in self.point],
                obstacle=self.obstacle,
            )
        return data


def segment_hits_box(p0: np.ndarray, p1: np.ndarray, box: Box3) -> np.ndarray | None:
    """Earliest point where segment p0->p1 touches the closed box, else None.

    Slab test per axis; grazing a face exactly counts as a hit.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    if not (np.all(np.isfinite(p0)) and np.all(np.isfinite(p1))):
        raise InvalidInput("segment endpoints must be finite")
    direction = p1 - p0
    lo = box.center - box.half_extents
    hi = box.center + box.half_extents
    tmin, tmax = 0.0, 1.0
    for axis in range(3):
        d = direction[axis]
        if d == 0.0:
            if p0[axis] < lo[axis] or p0[axis] > hi[axis]:
                return None
            continue
        t1 = (lo[axis] - p0[axis]) / d
        t2 = (hi[axis] - p0[axis]) / d
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
        if tmin > tmax:
            return None
    return p0 + tmin * direction


def _moving_half(step, manipulated: Box3, gripper: Box3) -> np.ndarray:
    box = manipulated if step.attached else gripper
    if step.rotating:
        # circumscribed sphere: conservative bound for in-place rotation
        radius = float(np.linalg.norm(box.half_extents))
        return np.full(3, radius)
    return box.half_extents.copy()


def check(
    sequence: ActionSequence,
    manipulated: Box3,
    obstacles: list[Box3],
    gripper: Box3 | None = None,
) -> CheckResult:
    """Swept-volume test of every waypoint segment against every obstacle.

    Attached segments sweep the manipulated box; empty-gripper segments
    sweep the gripper box (the manipulated box when no gripper box is
    given). The first collision in (step, obstacle) order is reported.
    """
    gripper = gripper or manipulated
    digest = sequence.digest()
    for step_index, step in enumerate(sequence.steps):
        half = _moving_half(step, manipulated, gripper)
        p0 = np.asarray(step.start.position, dtype=float)
        p1 = np.asarray(step.end.position, dtype=float)
        for obstacle_index, obstacle in enumerate(obstacles):
            hit = segment_hits_box(p0, p1, obstacle.expanded(half))
            if hit is not None:
                return CheckResult(
                    clear=False, sequence_digest=digest,
                    step=step_index, point=hit, obstacle=obstacle_index,
                )
    return CheckResult(clear=True, sequence_digest=digest)


def step_verdicts(
    sequence: ActionSequence,
    manipulated: Box3,
    obstacles: list[Box3],
    gripper: Box3 | None = None,
) -> list[bool]:
    """Per-segment clear flags for trajectory visualization."""
    gripper = gripper or manipulated
    verdicts = []
    for step in sequence.steps:
        half = _moving_half(step, manipulated, gripper)
        p0 = np.asarray(step.start.position, dtype=float)
        p1 = np.asarray(step.end.position, dtype=float)
        verdicts.append(
            all(segment_hits_box(p0, p1, obs.expanded(half)) is None for obs in obstacles)
        )
    return verdicts


def check_inputs_for_intention(
    scene: Scene, intention: Intention | None, config: EngineConfig
) -> tuple[Box3, list[Box3], Box3]:
    """(manipulated, obstacles, gripper) boxes for checking a plan.

    Everything in the scene is an obstacle except the intention's own
    targets: the grasped object (it becomes the swept box itself) and the
    place/pour destination (deliberate contact). The desk surface is not
    modeled. The exclusion list is therefore explicit here, at the call
    boundary.
    """
    convention = config.axis_convention
    gripper = Box3(np.zeros(3), config.gripper_box_half())
    excluded = set()
    manipulated = gripper
    if intention is not None:
        if intention.t1 is not None:
            excluded.add(intention.t1)
            source = scene.find(intention.t1)
            if source is not None and intention.a1 == "pick":
                manipulated = Box3.from_object(source, convention)
        if intention.t2 is not None:
            excluded.add(intention.t2)
    obstacles = [
        Box3.from_object(obj, convention)
        for obj in scene.all_objects()
        if obj.index not in excluded
    ]
    return manipulated, obstacles, gripper


@dataclass(frozen=True)
class PlanOutcome:
    sequence: ActionSequence
    result: CheckResult
    attempts: int


def feedback_from_result(result: CheckResult) -> PlannerFeedback:
    if result.clear:
        return PlannerFeedback(verdict="ok")
    return PlannerFeedback(
        verdict="collision", location=tuple(float(v) for v in result.point), step=result.step
    )


def plan_with_feedback(
    planner: Planner,
    intention: Intention,
    scene: Scene,
    max_retries: int = 3,
    config: EngineConfig | None = None,
) -> PlanOutcome:
    """Plan, cross-check, and replan with collision feedback until Clear.

    Every returned sequence carries a Clear verdict; after ``max_retries``
    replans (max_retries + 1 attempts total) the loop raises PlanningFailed
    with the last collision.
    """
    if max_retries < 0:
        raise InvalidInput("max_retries must be >= 0")
    config = config or EngineConfig()
    manipulated, obstacles, gripper = check_inputs_for_intention(scene, intention, config)
    feedback: PlannerFeedback | None = None
    last: CheckResult | None = None
    attempts = 0
    for _ in range(max_retries + 1):
        attempts += 1
        sequence = planner.plan(intention, scene, feedback)
        result = check(sequence, manipulated, obstacles, gripper)
        if result.clear:
            return PlanOutcome(sequence, result, attempts)
        last = result
        feedback = feedback_from_result(result)
    raise PlanningFailed(f"no collision-free plan after {attempts} attempts", last_result=last)
