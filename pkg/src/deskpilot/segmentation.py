"""Instance masks per frame: synthetic box-world renderer or external service.

Masks carry no semantic labels anywhere in this package: zero-shot labels
are unreliable, so the wire adapter drops them at the boundary and the
frame type has no field to hold them.

RLE wire format (bit-exact): runs alternate zero-count first, column-major
(Fortran) pixel order, and must sum to width*height. ``[0, 6]`` is a full
2x3 mask, ``[6]`` an empty one.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

import httpx
import numpy as np

from .errors import EmptyCluster, InvalidInput, ProtocolError
from .scene import (
    CameraIntrinsics,
    RigidTransform,
    StructuralObject,
    reproject,
    summarize,
    transform_points,
)

MIN_MASK_PIXELS = 20  # smaller masks are sensor noise and are dropped


@dataclass
class SegmentationFrame:
    """One frame's worth of binary instance masks."""

    masks: list[np.ndarray]
    width: int
    height: int
    source: str  # synthetic | external

    def __post_init__(self):
        for mask in self.masks:
            if mask.shape != (self.height, self.width):
                raise InvalidInput("mask shape does not match the frame size")
            if not mask.any():
                raise InvalidInput("masks must contain at least one set pixel")


@dataclass(frozen=True)
class BoxSpec:
    """Axis-aligned ground-truth box in the base frame."""

    center: np.ndarray
    extents: np.ndarray
    id: int

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        extents = np.asarray(self.extents, dtype=float)
        if center.shape != (3,) or extents.shape != (3,):
            raise InvalidInput("box center/extents must be 3-vectors")
        if np.any(extents <= 0):
            raise InvalidInput("box extents must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "extents", extents)


@dataclass(frozen=True)
class WorldSpec:
    """Ground-truth desk world used for synthetic perception."""

    boxes: tuple[BoxSpec, ...]
    intrinsics: CameraIntrinsics
    camera_pose: RigidTransform  # camera frame -> base frame

    def __post_init__(self):
        ids = [b.id for b in self.boxes]
        if len(ids) != len(set(ids)):
            raise InvalidInput("box ids must be unique")
        object.__setattr__(self, "boxes", tuple(self.boxes))

    def to_dict(self) -> dict:
        return {
            "boxes": [
                {"center": b.center.tolist(), "extents": b.extents.tolist(), "id": b.id}
                for b in self.boxes
            ],
            "intrinsics": self.intrinsics.to_dict(),
            "camera_pose": self.camera_pose.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorldSpec":
        boxes = tuple(
            BoxSpec(np.asarray(b["center"]), np.asarray(b["extents"]), b["id"])
            for b in data["boxes"]
        )
        return cls(
            boxes,
            CameraIntrinsics.from_dict(data["intrinsics"]),
            RigidTransform.from_dict(data["camera_pose"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "WorldSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def synthesize(
    world: WorldSpec, min_mask_pixels: int = MIN_MASK_PIXELS
) -> tuple[np.ndarray, SegmentationFrame]:
    """Render the world's boxes into a depth image plus one mask per box.

    Z-buffer semantics: each pixel belongs to the nearest box surface its ray
    hits, so fully occluded boxes produce no mask. Every box must be in front
    of the camera.
    """
    intr = world.intrinsics
    cam = world.camera_pose
    corners = _box_corners(world.boxes)
    if corners.size:
        cam_z = (corners - cam.translation) @ cam.rotation[:, 2]
        if np.any(cam_z <= 0):
            raise InvalidInput("all boxes must lie in front of the camera")

    h, w = intr.height, intr.width
    us, vs = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float))
    dirs_cam = np.stack(
        [(us - intr.cx) / intr.fx, (vs - intr.cy) / intr.fy, np.ones_like(us)], axis=-1
    ).reshape(-1, 3)
    dirs = dirs_cam @ cam.rotation.T  # ray parameter t equals camera-frame depth
    origin = cam.translation

    depth = np.full(h * w, np.inf)
    owner = np.full(h * w, -1, dtype=int)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        for k, box in enumerate(world.boxes):
            lo = box.center - box.extents / 2 - origin
            hi = box.center + box.extents / 2 - origin
            t1 = lo * inv
            t2 = hi * inv
            # 0 * inf marks a ray running inside a face plane: that axis
            # constrains nothing (closed box), so the interval is unbounded
            near = np.minimum(t1, t2)
            far = np.maximum(t1, t2)
            tmin = np.where(np.isnan(near), -np.inf, near).max(axis=1)
            tmax = np.where(np.isnan(far), np.inf, far).min(axis=1)
            hit = (tmax >= tmin) & (tmax > 0)
            enter = np.where(tmin > 0, tmin, tmax)
            closer = hit & (enter < depth)
            depth[closer] = enter[closer]
            owner[closer] = k

    depth_img = np.where(np.isfinite(depth), depth, 0.0).reshape(h, w)
    masks = []
    for k in range(len(world.boxes)):
        mask = (owner == k).reshape(h, w)
        if np.count_nonzero(mask) >= max(min_mask_pixels, 1):
            masks.append(mask)
    return depth_img, SegmentationFrame(masks, w, h, source="synthetic")


def _box_corners(boxes) -> np.ndarray:
    corners = []
    for box in boxes:
        half = box.extents / 2
        for sx in (-1, 1):
            for sy in (-1, 1):
                for sz in (-1, 1):
                    corners.append(box.center + half * (sx, sy, sz))
    return np.asarray(corners, dtype=float).reshape(-1, 3)


# ---------------------------------------------------------------------------
# Run-length mask interchange


def encode_rle(mask: np.ndarray) -> list[int]:
    """Encode a binary mask as zero-first column-major run lengths."""
    flat = np.asarray(mask, dtype=bool).flatten(order="F")
    runs: list[int] = []
    value = False
    count = 0
    for bit in flat:
        if bit == value:
            count += 1
        else:
            runs.append(count)
            value = bit
            count = 1
    runs.append(count)
    return runs


def decode_rle(runs: list[int], width: int, height: int) -> np.ndarray:
    """Inverse of :func:`encode_rle`; validates the run total."""
    total = width * height
    if any(r < 0 for r in runs):
        raise ProtocolError("negative run length")
    if sum(runs) != total:
        raise ProtocolError(f"run lengths sum to {sum(runs)}, expected {total}")
    flat = np.zeros(total, dtype=bool)
    pos = 0
    value = False
    for run in runs:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape((height, width), order="F")


def decode_external(payload: dict, min_mask_pixels: int = MIN_MASK_PIXELS) -> SegmentationFrame:
    """Decode a segmenter response message into a frame.

    Label strings, when present, are discarded: downstream consumers only
    ever see geometry.
    """
    try:
        width = int(payload["width"])
        height = int(payload["height"])
        entries = payload["masks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed segmenter payload: {exc}") from exc
    masks = []
    for entry in entries:
        if "rle" not in entry:
            raise ProtocolError("mask entry lacks an rle field")
        mask = decode_rle(list(entry["rle"]), width, height)
        if np.count_nonzero(mask) >= max(min_mask_pixels, 1):
            masks.append(mask)
    return SegmentationFrame(masks, width, height, source="external")


class ExternalSegmenter:
    """HTTP client for a zero-shot segmentation service.

    One POST per frame; responses are matched to requests by frame id.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 10.0,
        retries: int = 2,
        min_mask_pixels: int = MIN_MASK_PIXELS,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.min_mask_pixels = min_mask_pixels
        self._client = client or httpx.Client(timeout=timeout)

    def segment(
        self,
        frame_id: int,
        rgb: bytes,
        depth: np.ndarray,
        unit_scale: float = 0.001,
    ) -> SegmentationFrame:
        depth_raw = np.asarray(np.asarray(depth) / unit_scale, dtype="<u2")
        body = {
            "frame_id": frame_id,
            "width": int(depth_raw.shape[1]),
            "height": int(depth_raw.shape[0]),
            "rgb": base64.b64encode(rgb).decode("ascii"),
            "depth": base64.b64encode(depth_raw.tobytes()).decode("ascii"),
            "unit_scale": unit_scale,
        }
        last_exc: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = self._client.post(f"{self.endpoint}/segment", json=body)
                response.raise_for_status()
                payload = response.json()
                break
            except httpx.HTTPError as exc:
                last_exc = exc
        else:
            raise ProtocolError(f"segmenter unreachable: {last_exc}")
        if payload.get("frame_id") != frame_id:
            raise ProtocolError(
                f"response frame id {payload.get('frame_id')} does not match request {frame_id}"
            )
        return decode_external(payload, self.min_mask_pixels)


# ---------------------------------------------------------------------------
# Perception glue and world generation


def objects_from_frame(
    depth: np.ndarray,
    frame: SegmentationFrame,
    intrinsics: CameraIntrinsics,
    base_from_camera: RigidTransform,
    convention: str = "xyz",
) -> list[StructuralObject]:
    """Reconstruct one structural record per mask (skipping empty clusters)."""
    objects = []
    for k, mask in enumerate(frame.masks):
        try:
            cloud = reproject(intrinsics, depth, mask)
        except EmptyCluster:
            continue
        cloud = transform_points(base_from_camera, cloud)
        objects.append(summarize(cloud, index=k, convention=convention))
    return objects


def random_world(
    seed: int,
    intrinsics: CameraIntrinsics,
    camera_pose: RigidTransform,
    n_boxes: int | None = None,
    area: tuple[float, float] = (0.45, 0.3),
    size_range: tuple[float, float] = (0.05, 0.16),
    height_range: tuple[float, float] = (0.04, 0.14),
) -> WorldSpec:
    """Random desk world of 1-6 disjoint boxes resting on the desk plane."""
    rng = np.random.default_rng(seed)
    count = int(n_boxes) if n_boxes else int(rng.integers(1, 7))
    boxes: list[BoxSpec] = []
    attempts = 0
    while len(boxes) < count and attempts < 500:
        attempts += 1
        extents = np.array(
            [
                rng.uniform(*size_range),
                rng.uniform(*size_range),
                rng.uniform(*height_range),
            ]
        )
        center = np.array(
            [
                rng.uniform(-area[0], area[0]),
                rng.uniform(0.2 - area[1], 0.2 + area[1]),
                extents[2] / 2,
            ]
        )
        candidate = BoxSpec(center, extents, id=len(boxes))
        if all(_boxes_disjoint(candidate, other, margin=0.03) for other in boxes):
            boxes.append(candidate)
    return WorldSpec(tuple(boxes), intrinsics, camera_pose)


def _boxes_disjoint(a: BoxSpec, b: BoxSpec, margin: float = 0.0) -> bool:
    gap = np.abs(a.center - b.center) - (a.extents + b.extents) / 2 - margin
    return bool(np.any(gap > 0))
