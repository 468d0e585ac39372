"""Independent reference implementations used to cross-validate the engine.

Each function here deliberately takes a different route than the production
code it checks: dense enumeration instead of closed forms, projections
instead of cross products, face-plane ray casting instead of slab-test
z-buffers. Tests and the ``bench-oracle`` command compare the two sides.
"""

from __future__ import annotations

import math

import numpy as np

from .segmentation import WorldSpec

SWEEP_T0 = -100.0
SWEEP_T1 = 100.0
SWEEP_STEP = 1e-4

_grid_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _sweep_grid(t0: float, t1: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    key = (t0, t1, step)
    if key not in _grid_cache:
        t = np.arange(t0, t1 + step / 2, step)
        _grid_cache[key] = (t, t * t)
    return _grid_cache[key]


def sweep_line_distance(
    l1,
    l2,
    point,
    t0: float = SWEEP_T0,
    t1: float = SWEEP_T1,
    step: float = SWEEP_STEP,
    brute: bool = False,
) -> float:
    """Minimum of |p - (l1 + t (l2 - l1))| over the uniform grid t0..t1.

    The squared distance expands to the convex quadratic a t^2 + b t + c, so
    its minimum over a uniform grid lies at a grid point adjacent to the
    vertex (or at a grid end). Those candidates are evaluated exactly, which
    yields bit-identical values to enumerating the whole grid; pass
    ``brute=True`` to do the full enumeration instead (tests cross-check the
    two paths).
    """
    l1 = np.asarray(l1, dtype=float)
    d = np.asarray(l2, dtype=float) - l1
    r = l1 - np.asarray(point, dtype=float)
    a = float(d @ d)
    b = 2.0 * float(d @ r)
    c = float(r @ r)
    if brute:
        t, t_sq = _sweep_grid(t0, t1, step)
        best = float((a * t_sq + b * t).min())
        return math.sqrt(max(best + c, 0.0))
    count = int(np.floor((t1 + step / 2 - t0) / step)) + 1  # arange grid size
    vertex = -b / (2.0 * a)
    k = (vertex - t0) / step
    indices = {0, count - 1}
    for candidate in (math.floor(k), math.ceil(k)):
        indices.add(min(max(candidate, 0), count - 1))
    best = math.inf
    for i in indices:
        t_i = t0 + i * step  # same arithmetic as np.arange
        best = min(best, a * (t_i * t_i) + b * t_i)
    return math.sqrt(max(best + c, 0.0))


def projection_line_distance(l1, l2, point) -> float:
    """Point-to-line distance via projection (no cross product)."""
    l1 = np.asarray(l1, dtype=float)
    d = np.asarray(l2, dtype=float) - l1
    rel = np.asarray(point, dtype=float) - l1
    t = float(rel @ d) / float(d @ d)
    return float(np.linalg.norm(rel - t * d))


def nearest_object_bruteforce(l1, l2, centroids_by_index: list[tuple[int, np.ndarray]]):
    """Exhaustive per-object comparison; ties resolve to the lowest index."""
    best_index = None
    best_distance = math.inf
    for index, centroid in sorted(centroids_by_index, key=lambda item: item[0]):
        distance = projection_line_distance(l1, l2, centroid)
        if distance < best_distance:
            best_index, best_distance = index, distance
    return best_index, best_distance


# ---------------------------------------------------------------------------
# Swept-volume sampling oracle


def sampled_sweep_hits(p0, p1, moving_half, obstacles, step: float = 1e-3) -> bool:
    """Step the moving box along the segment and overlap-test every pose.

    ``obstacles`` is a list of (center, half_extents) pairs. Sample spacing
    never exceeds ``step`` meters; both endpoints are sampled.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    moving_half = np.asarray(moving_half, dtype=float)
    length = float(np.linalg.norm(p1 - p0))
    n = max(int(math.ceil(length / step)) + 1, 2)
    t = np.linspace(0.0, 1.0, n)
    centers = p0 + t[:, None] * (p1 - p0)
    for center, half in obstacles:
        gap = np.abs(centers - np.asarray(center)) - (moving_half + np.asarray(half))
        if bool(np.any(np.all(gap <= 0.0, axis=1))):
            return True
    return False


def sampled_min_clearance(p0, p1, moving_half, obstacles, step: float = 1e-3) -> float:
    """Minimum per-sample clearance (max axis gap; <= 0 means overlap)."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    moving_half = np.asarray(moving_half, dtype=float)
    length = float(np.linalg.norm(p1 - p0))
    n = max(int(math.ceil(length / step)) + 1, 2)
    t = np.linspace(0.0, 1.0, n)
    centers = p0 + t[:, None] * (p1 - p0)
    best = math.inf
    for center, half in obstacles:
        gap = np.abs(centers - np.asarray(center)) - (moving_half + np.asarray(half))
        best = min(best, float(gap.max(axis=1).min()))
    return best


def path_min_clearance(p0, p1, moving_half, center, half) -> float:
    """Exact minimum clearance along the continuous segment.

    The clearance g(t) = max_axis(|p(t) - center| - (moving_half + half)) is
    a maximum of convex V-shaped functions, hence convex in t; ternary
    search finds its global minimum on [0, 1].
    """
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    offset = p0 - np.asarray(center, dtype=float)
    spread = np.asarray(moving_half, dtype=float) + np.asarray(half, dtype=float)

    def g(t: float) -> float:
        return float(np.max(np.abs(offset + t * d) - spread))

    lo, hi = 0.0, 1.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if g(m1) <= g(m2):
            hi = m2
        else:
            lo = m1
    return min(g(lo), g(hi), g(0.0), g(1.0))


# ---------------------------------------------------------------------------
# Streaming cloud summary


def streaming_summary(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-pass mean / min / max, written without vectorized reductions."""
    count = 0
    total = [0.0, 0.0, 0.0]
    mins = [math.inf] * 3
    maxs = [-math.inf] * 3
    for point in np.asarray(points, dtype=float):
        count += 1
        for axis in range(3):
            value = float(point[axis])
            total[axis] += value
            if value < mins[axis]:
                mins[axis] = value
            if value > maxs[axis]:
                maxs[axis] = value
    if count == 0:
        raise ValueError("no points")
    mean = np.asarray([total[a] / count for a in range(3)])
    return mean, np.asarray(mins), np.asarray(maxs)


# ---------------------------------------------------------------------------
# Reference renderer


def reference_render_stats(world: WorldSpec) -> dict[int, dict]:
    """Visible-surface statistics per box via face-plane ray casting.

    For every pixel ray (in the base frame) intersect the six face planes of
    every box, keep the nearest valid face hit, and accumulate the hit
    points directly; no depth image, no pinhole inversion. Returns, per
    visible box position in the world list: centroid, per-axis extents and
    pixel count of its visible surface.
    """
    intr = world.intrinsics
    cam = world.camera_pose
    us, vs = np.meshgrid(
        np.arange(intr.width, dtype=float), np.arange(intr.height, dtype=float)
    )
    dirs = np.stack(
        [(us - intr.cx) / intr.fx, (vs - intr.cy) / intr.fy, np.ones_like(us)], axis=-1
    ).reshape(-1, 3) @ cam.rotation.T
    origin = cam.translation

    best_t = np.full(dirs.shape[0], np.inf)
    owner = np.full(dirs.shape[0], -1, dtype=int)
    eps = 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        for k, box in enumerate(world.boxes):
            half = box.extents / 2
            for axis in range(3):
                others = [a for a in range(3) if a != axis]
                for side in (-1.0, 1.0):
                    plane = box.center[axis] + side * half[axis]
                    t = (plane - origin[axis]) / dirs[:, axis]
                    valid = np.isfinite(t) & (t > 0)
                    for other in others:
                        coord = origin[other] + t * dirs[:, other]
                        valid &= np.abs(coord - box.center[other]) <= half[other] + eps
                    closer = valid & (t < best_t)
                    best_t[closer] = t[closer]
                    owner[closer] = k

    stats: dict[int, dict] = {}
    for k in range(len(world.boxes)):
        sel = owner == k
        count = int(np.count_nonzero(sel))
        if count == 0:
            continue
        points = origin + best_t[sel, None] * dirs[sel]
        stats[k] = {
            "centroid": points.mean(axis=0),
            "extents": points.max(axis=0) - points.min(axis=0),
            "pixels": count,
        }
    return stats
