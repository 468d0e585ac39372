"""Oracle comparison suites.

These runs back the acceptance criteria and the ``bench-oracle`` command:
production kernels against their independent oracles over large random case
sets. Each suite returns a stats dict; callers decide what to assert or
print.
"""

from __future__ import annotations

import time

import numpy as np

from .config import EngineConfig
from .deixis import DeicticRay, point_line_distance, select_target
from .errors import PlanningFailed
from .grammar import Intention
from .oracles import (
    nearest_object_bruteforce,
    path_min_clearance,
    sampled_sweep_hits,
    sweep_line_distance,
)
from .planning import DeterministicPlanner, FaultInjectedPlanner
from .safety import Box3, check, check_inputs_for_intention, plan_with_feedback, segment_hits_box
from .scene import EndEffectorState, Scene, StructuralObject, build_scene

BOUNDARY_BAND = 1e-6


def bench_distance_kernel(cases: int = 1000, seed: int = 7) -> dict:
    """Production point-line distance vs the dense parameter-sweep oracle."""
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    max_error = 0.0
    for _ in range(cases):
        l1 = rng.uniform(-1.0, 1.0, 3)
        l2 = l1 + rng.uniform(-1.0, 1.0, 3)
        while np.linalg.norm(l2 - l1) < 0.05:
            l2 = l1 + rng.uniform(-1.0, 1.0, 3)
        point = rng.uniform(-2.0, 2.0, 3)
        ray = DeicticRay(l1, l2)
        produced = point_line_distance(ray, point)
        expected = sweep_line_distance(l1, l2, point)
        max_error = max(max_error, abs(produced - expected))
    return {
        "cases": cases,
        "max_abs_error_m": max_error,
        "runtime_s": time.perf_counter() - started,
    }


def _random_selection_scene(rng: np.random.Generator, tie_case: bool):
    """(ray, centroids) with 2-9 objects; tie cases mirror two objects."""
    if tie_case:
        l1 = np.zeros(3)
        l2 = np.array([1.0, 0.0, 0.0])
        radius = rng.uniform(0.05, 0.4)
        centroids = [
            (0, np.array([rng.uniform(0.2, 0.8), radius, 0.0])),
            (1, np.array([rng.uniform(0.2, 0.8), -radius, 0.0])),
        ]
        for extra in range(2, int(rng.integers(2, 10))):
            centroids.append((extra, np.array([rng.uniform(-1, 1), rng.uniform(0.5, 1.5), 0.0])))
        return DeicticRay(l1, l2), centroids
    l1 = rng.uniform(-0.5, 0.5, 3)
    l2 = l1 + rng.uniform(-1.0, 1.0, 3)
    while np.linalg.norm(l2 - l1) < 0.05:
        l2 = l1 + rng.uniform(-1.0, 1.0, 3)
    count = int(rng.integers(2, 10))
    centroids = [(k, rng.uniform(-0.8, 0.8, 3)) for k in range(count)]
    return DeicticRay(l1, l2), centroids


def bench_target_selection(cases: int = 1000, seed: int = 11, tie_every: int = 20) -> dict:
    """select_target vs brute-force argmin, including constructed ties."""
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    effector = EndEffectorState(np.array([0, 0, 0.3, 0, 0, 0, 1.0]), 0.0)
    mismatches = 0
    ties = 0
    for case in range(cases):
        tie_case = case % tie_every == 0
        ties += tie_case
        ray, centroids = _random_selection_scene(rng, tie_case)
        objects = [
            StructuralObject(index, 0.05, 0.05, 0.05, centroid)
            for index, centroid in centroids
        ]
        scene = build_scene(objects, effector, gripper_max_width=0.08)
        produced = select_target(ray, scene)
        expected_index, _ = nearest_object_bruteforce(ray.l1, ray.l2, centroids)
        if produced.index != expected_index:
            mismatches += 1
    return {
        "cases": cases,
        "tie_cases": ties,
        "mismatches": mismatches,
        "runtime_s": time.perf_counter() - started,
    }


def bench_swept_checker(cases: int = 10000, seed: int = 13) -> dict:
    """Exact Minkowski slab checker vs the 1 mm dense-sampling oracle.

    Disagreements where the checker flags a collision the sampler missed are
    adjudicated with the exact continuous path clearance; they may only
    occur inside the boundary band.
    """
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    check_hits = 0
    oracle_hits = 0
    false_negatives = 0
    disagreements = 0
    band_violations = 0
    worst_clearance = -np.inf
    for _ in range(cases):
        p0 = rng.uniform(-0.6, 0.6, 3)
        p1 = rng.uniform(-0.6, 0.6, 3)
        moving_half = rng.uniform(0.01, 0.08, 3)
        boxes = []
        for _ in range(int(rng.integers(1, 4))):
            center = rng.uniform(-0.5, 0.5, 3)
            half = rng.uniform(0.02, 0.25, 3)
            boxes.append((center, half))
        hit_check = any(
            segment_hits_box(p0, p1, Box3(center, half + moving_half)) is not None
            for center, half in boxes
        )
        hit_oracle = sampled_sweep_hits(p0, p1, moving_half, boxes, step=1e-3)
        check_hits += hit_check
        oracle_hits += hit_oracle
        if hit_oracle and not hit_check:
            false_negatives += 1
        if hit_check and not hit_oracle:
            disagreements += 1
            clearance = min(
                path_min_clearance(p0, p1, moving_half, center, half)
                for center, half in boxes
            )
            worst_clearance = max(worst_clearance, clearance)
            if clearance >= BOUNDARY_BAND:
                band_violations += 1
    return {
        "cases": cases,
        "check_hits": check_hits,
        "oracle_hits": oracle_hits,
        "false_negatives": false_negatives,
        "disagreements": disagreements,
        "band_violations": band_violations,
        "worst_disagreement_clearance_m": (
            None if disagreements == 0 else worst_clearance
        ),
        "runtime_s": time.perf_counter() - started,
    }


# ---------------------------------------------------------------------------
# Random solvable scenes for planner suites


def random_solvable_scene(
    rng: np.random.Generator, config: EngineConfig, straddle: bool = False
) -> tuple[Scene, Intention]:
    """Pick/put scene whose grasp and placement verticals stay free.

    Obstacles are rejected until their footprints, expanded by the largest
    moving box plus a margin, avoid the source, destination and home
    columns. With ``straddle`` the single obstacle is forced between source
    and destination, so obstacle-blind transports must cross it.
    """
    def small_box(index: int, x: float, y: float) -> StructuralObject:
        w = rng.uniform(0.03, 0.07)
        h = rng.uniform(0.03, 0.07)
        d = rng.uniform(0.05, 0.12)
        return StructuralObject(index, w, h, d, np.array([x, y, d / 2]))

    source = small_box(0, rng.uniform(0.2, 0.42), rng.uniform(0.05, 0.4))
    dest = small_box(1, rng.uniform(-0.42, -0.2), rng.uniform(0.05, 0.4))
    home_xy = np.asarray(config.home_pose[:2])
    keep_clear = [source.centroid[:2], dest.centroid[:2], home_xy]
    margin = float(np.max(config.gripper_box_half()[:2])) + config.clearance + 0.02

    obstacles: list[StructuralObject] = []
    count = 1 if straddle else int(rng.integers(1, 4))
    guard = 0
    while len(obstacles) < count and guard < 300:
        guard += 1
        w = rng.uniform(0.1, 0.26)
        h = rng.uniform(0.1, 0.26)
        d = rng.uniform(0.22, 0.4)
        if straddle:
            mid = (source.centroid[:2] + dest.centroid[:2]) / 2
            xy = mid + rng.uniform(-0.03, 0.03, 2)
        else:
            xy = np.array([rng.uniform(-0.45, 0.45), rng.uniform(0.0, 0.45)])
        ok = all(
            np.any(np.abs(xy - spot) > np.array([w, h]) / 2 + margin) for spot in keep_clear
        )
        if ok:
            obstacles.append(
                StructuralObject(2 + len(obstacles), w, h, d, np.array([*xy, d / 2]))
            )
    effector = EndEffectorState(config.home_pose, 0.0)
    scene = build_scene([source, dest] + obstacles, effector, config.gripper_max_width)
    return scene, Intention("pick", 0, "put", 1)


def oracle_confirms_sequence(sequence, scene, intention, config) -> bool:
    """Dense-sampling confirmation of a whole plan, segment by segment."""
    manipulated, obstacles, gripper = check_inputs_for_intention(scene, intention, config)
    boxes = [(box.center, box.half_extents) for box in obstacles]
    for step in sequence.steps:
        moving = manipulated if step.attached else gripper
        half = moving.half_extents
        if step.rotating:
            half = np.full(3, float(np.linalg.norm(half)))
        if sampled_sweep_hits(step.start.position, step.end.position, half, boxes, step=1e-3):
            return False
    return True


def bench_deterministic_planner(
    cases: int = 500, seed: int = 17, config: EngineConfig | None = None
) -> dict:
    """First-pass safety of the deterministic planner, oracle-confirmed."""
    config = config or EngineConfig()
    rng = np.random.default_rng(seed)
    planner = DeterministicPlanner(config)
    started = time.perf_counter()
    first_pass_clear = 0
    oracle_confirmed = 0
    for _ in range(cases):
        scene, intention = random_solvable_scene(rng, config)
        sequence = planner.plan(intention, scene)
        manipulated, obstacles, gripper = check_inputs_for_intention(scene, intention, config)
        result = check(sequence, manipulated, obstacles, gripper)
        if result.clear:
            first_pass_clear += 1
            if oracle_confirms_sequence(sequence, scene, intention, config):
                oracle_confirmed += 1
    return {
        "cases": cases,
        "first_pass_clear": first_pass_clear,
        "oracle_confirmed": oracle_confirmed,
        "runtime_s": time.perf_counter() - started,
    }


def bench_closed_loop(
    qs: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    scenes_per_q: int = 40,
    seed: int = 23,
    max_retries: int = 5,
    config: EngineConfig | None = None,
) -> dict:
    """Fault-injected planner through the feedback loop, per blindness q.

    Every returned sequence is re-checked independently; the loop must only
    ever hand back Clear plans, and looping must not lose any scene the
    first attempt already solved.
    """
    config = config or EngineConfig()
    started = time.perf_counter()
    per_q = []
    unsafe_returns = 0
    for q in qs:
        rng = np.random.default_rng(seed + int(q * 1000))
        planner = FaultInjectedPlanner(DeterministicPlanner(config), q, rng)
        first_pass = 0
        solved = 0
        for _ in range(scenes_per_q):
            scene, intention = random_solvable_scene(rng, config, straddle=True)
            try:
                outcome = plan_with_feedback(planner, intention, scene, max_retries, config)
            except PlanningFailed:
                continue
            solved += 1
            if outcome.attempts == 1:
                first_pass += 1
            manipulated, obstacles, gripper = check_inputs_for_intention(
                scene, intention, config
            )
            if not check(outcome.sequence, manipulated, obstacles, gripper).clear:
                unsafe_returns += 1
        per_q.append(
            {
                "q": q,
                "scenes": scenes_per_q,
                "first_pass_rate": first_pass / scenes_per_q,
                "post_loop_rate": solved / scenes_per_q,
            }
        )
    return {
        "per_q": per_q,
        "unsafe_returns": unsafe_returns,
        "runtime_s": time.perf_counter() - started,
    }
