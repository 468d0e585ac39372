"""Engine configuration: camera, gripper, planner backend, file paths."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .scene import AXIS_CONVENTIONS, CameraIntrinsics, RigidTransform

IDENTITY_QUAT = (0.0, 0.0, 0.0, 1.0)

# camera 1.5 m above the desk looking straight down
_TOPDOWN_ROTATION = ((1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, -1.0))


def _pose7(position, quat=IDENTITY_QUAT) -> np.ndarray:
    return np.asarray(tuple(position) + tuple(quat), dtype=float)


@dataclass(frozen=True)
class PlannerConfig:
    """Which planner backend serves a session and how to reach it."""

    backend: str = "deterministic"  # deterministic | external | canned
    endpoint: str = ""
    model: str = ""
    timeout: float = 30.0
    transport_retries: int = 2
    api_key: str = ""

    def with_env_overrides(self) -> "PlannerConfig":
        return replace(
            self,
            endpoint=os.environ.get("DESKPILOT_LLM_ENDPOINT", self.endpoint),
            model=os.environ.get("DESKPILOT_LLM_MODEL", self.model),
            api_key=os.environ.get("DESKPILOT_LLM_KEY", self.api_key),
        )


@dataclass(frozen=True)
class EngineConfig:
    intrinsics: CameraIntrinsics = field(
        default_factory=lambda: CameraIntrinsics(920.0, 920.0, 512.0, 384.0, 1024, 768)
    )
    base_from_camera: RigidTransform = field(
        default_factory=lambda: RigidTransform(
            np.asarray(_TOPDOWN_ROTATION), np.array([0.0, 0.2, 1.5])
        )
    )
    gripper_max_width: float = 0.08
    gripper_box_half_extents: tuple[float, float, float] = (0.04, 0.04, 0.05)
    clearance: float = 0.05
    default_transport_height: float = 0.15
    pour_clearance: float = 0.05
    axis_convention: str = "xyz"
    up_axis: int = 2  # base axis pointing away from the desk surface
    orientation_convention: str = "quaternion_xyzw"  # layout of pose[3:7]
    forward_only_pointing: bool = False
    min_mask_pixels: int = 20
    max_plan_retries: int = 3
    home_pose: np.ndarray = field(default_factory=lambda: _pose7((0.0, -0.35, 0.30)))
    ready_pose: np.ndarray = field(default_factory=lambda: _pose7((0.0, -0.25, 0.25)))
    throw_pose: np.ndarray = field(default_factory=lambda: _pose7((0.45, -0.35, 0.30)))
    handover_pose: np.ndarray = field(default_factory=lambda: _pose7((0.0, -0.45, 0.25)))
    phrase_table_path: str = ""  # empty -> bundled table
    segmenter_endpoint: str = ""
    segmenter_timeout: float = 10.0
    segmenter_retries: int = 2
    sessions_dir: str = ""  # empty -> no persistence
    planner: PlannerConfig = field(default_factory=PlannerConfig)

    def __post_init__(self):
        if self.axis_convention not in AXIS_CONVENTIONS:
            raise InvalidInput(f"unknown axis convention {self.axis_convention!r}")
        if self.clearance < 0:
            raise InvalidInput("clearance must be >= 0")
        for name in ("home_pose", "ready_pose", "throw_pose", "handover_pose"):
            pose = np.asarray(getattr(self, name), dtype=float)
            if pose.shape == (3,):
                pose = _pose7(pose)
            if pose.shape != (7,):
                raise InvalidInput(f"{name} must have 3 or 7 components")
            object.__setattr__(self, name, pose)

    def gripper_box_half(self) -> np.ndarray:
        return np.asarray(self.gripper_box_half_extents, dtype=float)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Build a config from an optional JSON file plus environment overrides.

    LLM endpoint, model and key may come from DESKPILOT_LLM_ENDPOINT,
    DESKPILOT_LLM_MODEL and DESKPILOT_LLM_KEY.
    """
    data: dict = {}
    if path:
        data = json.loads(Path(path).read_text())
    kwargs: dict = {}
    if "intrinsics" in data:
        kwargs["intrinsics"] = CameraIntrinsics.from_dict(data["intrinsics"])
    if "base_from_camera" in data:
        kwargs["base_from_camera"] = RigidTransform.from_dict(data["base_from_camera"])
    for key in (
        "gripper_max_width", "clearance", "default_transport_height", "pour_clearance",
        "axis_convention", "up_axis", "orientation_convention", "forward_only_pointing",
        "min_mask_pixels",
        "max_plan_retries", "phrase_table_path", "segmenter_endpoint",
        "segmenter_timeout", "segmenter_retries", "sessions_dir",
    ):
        if key in data:
            kwargs[key] = data[key]
    if "gripper_box_half_extents" in data:
        kwargs["gripper_box_half_extents"] = tuple(data["gripper_box_half_extents"])
    for key in ("home_pose", "ready_pose", "throw_pose", "handover_pose"):
        if key in data:
            kwargs[key] = np.asarray(data[key], dtype=float)
    planner = PlannerConfig(**data.get("planner", {}))
    kwargs["planner"] = planner.with_env_overrides()
    return EngineConfig(**kwargs)


def bundled_data_path(*parts: str) -> Path:
    """Path to a data file shipped inside the package."""
    root = resources.files("deskpilot").joinpath("data")
    return Path(str(root.joinpath(*parts)))
