"""Pointing ray extraction and nearest-object selection."""

from __future__ import annotations

import numpy as np
import pytest

from deskpilot.deixis import (
    DeicticRay,
    SkeletonFrame,
    forearm_ray,
    point_line_distance,
    select_target,
)
from deskpilot.errors import DegenerateRay, MissingJoint, NoCandidates
from deskpilot.oracles import nearest_object_bruteforce, sweep_line_distance
from deskpilot.scene import EndEffectorState, StructuralObject, build_scene


def _scene(centroids, gripper=0.08):
    objects = [
        StructuralObject(i, 0.05, 0.05, 0.05, np.asarray(c, dtype=float))
        for i, c in enumerate(centroids)
    ]
    effector = EndEffectorState(np.array([0, 0, 0.3, 0, 0, 0, 1.0]), 0.0)
    return build_scene(objects, effector, gripper)


class TestForearmRay:
    def test_elbow_to_wrist(self):
        frame = SkeletonFrame(
            {"right_elbow": [0.0, 0.0, 0.0], "right_wrist": [0.3, 0.0, 0.0]}
        )
        ray = forearm_ray(frame)
        np.testing.assert_allclose(ray.l1, [0.0, 0.0, 0.0])
        np.testing.assert_allclose(ray.l2, [0.3, 0.0, 0.0])

    def test_missing_wrist(self):
        with pytest.raises(MissingJoint):
            forearm_ray(SkeletonFrame({"right_elbow": [0.0, 0.0, 0.0]}))

    def test_coincident_joints(self):
        frame = SkeletonFrame(
            {"right_elbow": [0.1, 0.2, 0.3], "right_wrist": [0.1, 0.2, 0.3]}
        )
        with pytest.raises(DegenerateRay):
            forearm_ray(frame)


class TestPointLineDistance:
    def test_three_four_five(self):
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert point_line_distance(ray, np.array([5.0, 3.0, 4.0])) == pytest.approx(5.0)

    def test_point_on_line(self):
        ray = DeicticRay(np.array([1.0, 1.0, 1.0]), np.array([2.0, 3.0, 4.0]))
        on_line = np.array([1.0, 1.0, 1.0]) + 2.5 * np.array([1.0, 2.0, 3.0])
        assert point_line_distance(ray, on_line) == pytest.approx(0.0, abs=1e-12)

    def test_matches_parameter_sweep_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            l1 = rng.uniform(-1, 1, 3)
            l2 = l1 + rng.uniform(-1, 1, 3)
            while np.linalg.norm(l2 - l1) < 0.05:
                l2 = l1 + rng.uniform(-1, 1, 3)
            point = rng.uniform(-2, 2, 3)
            ray = DeicticRay(l1, l2)
            assert point_line_distance(ray, point) == pytest.approx(
                sweep_line_distance(l1, l2, point), abs=1e-3
            )

    def test_parameterization_invariance(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            l1 = rng.uniform(-1, 1, 3)
            direction = rng.uniform(-1, 1, 3)
            while np.linalg.norm(direction) < 0.05:
                direction = rng.uniform(-1, 1, 3)
            point = rng.uniform(-2, 2, 3)
            base = point_line_distance(DeicticRay(l1, l1 + direction), point)
            # different span points, swapped order, rescaled direction
            alpha, beta = sorted(rng.uniform(-5, 5, 2))
            if abs(beta - alpha) < 1e-3:
                beta = alpha + 1.0
            variants = [
                DeicticRay(l1 + alpha * direction, l1 + beta * direction),
                DeicticRay(l1 + direction, l1),
                DeicticRay(l1, l1 + 3.7 * direction),
            ]
            for ray in variants:
                assert point_line_distance(ray, point) == pytest.approx(base, abs=1e-9)


class TestSelectTarget:
    def test_separated_pair_selects_pointed_cluster(self):
        # two clusters 20 cm apart; the ray runs through one centroid
        left = [0.0, 0.5, 0.0]
        right = [0.2, 0.5, 0.0]
        scene = _scene([left, right])
        ray = DeicticRay(np.array([0.0, -0.5, 0.0]), np.array(left))
        selection = select_target(ray, scene)
        assert selection.index == 0
        assert selection.distance == pytest.approx(0.0, abs=1e-12)

    def test_tie_breaks_to_lowest_index(self):
        scene = _scene([[0.5, 0.1, 0.0], [0.5, -0.1, 0.0]])
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert select_target(ray, scene).index == 0

    def test_matches_bruteforce_argmin(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            count = int(rng.integers(2, 10))
            centroids = [rng.uniform(-0.8, 0.8, 3) for _ in range(count)]
            scene = _scene(centroids)
            l1 = rng.uniform(-0.5, 0.5, 3)
            l2 = l1 + rng.uniform(-1, 1, 3)
            while np.linalg.norm(l2 - l1) < 0.05:
                l2 = l1 + rng.uniform(-1, 1, 3)
            ray = DeicticRay(l1, l2)
            expected_index, _ = nearest_object_bruteforce(
                l1, l2, list(enumerate(centroids))
            )
            assert select_target(ray, scene).index == expected_index

    def test_permutation_invariance(self):
        rng = np.random.default_rng(19)
        centroids = [rng.uniform(-0.5, 0.5, 3) for _ in range(5)]
        ray = DeicticRay(np.array([0.0, -1.0, 0.2]), np.array([0.0, 1.0, 0.2]))
        scene = _scene(centroids)
        chosen = select_target(ray, scene)
        target_position = scene.find(chosen.index).centroid
        order = rng.permutation(5)
        permuted_objects = [
            StructuralObject(i, 0.05, 0.05, 0.05, centroids[order[i]]) for i in range(5)
        ]
        effector = EndEffectorState(np.array([0, 0, 0.3, 0, 0, 0, 1.0]), 0.0)
        permuted = build_scene(permuted_objects, effector, 0.08)
        chosen2 = select_target(ray, permuted)
        np.testing.assert_allclose(permuted.find(chosen2.index).centroid, target_position)

    def test_translation_equivariance(self):
        rng = np.random.default_rng(23)
        centroids = [rng.uniform(-0.5, 0.5, 3) for _ in range(4)]
        shift = np.array([3.0, -2.0, 1.0])
        ray = DeicticRay(np.array([0.0, -1.0, 0.0]), np.array([0.1, 1.0, 0.1]))
        moved_ray = DeicticRay(ray.l1 + shift, ray.l2 + shift)
        scene = _scene(centroids)
        moved_scene = _scene([c + shift for c in centroids])
        a = select_target(ray, scene)
        b = select_target(moved_ray, moved_scene)
        assert a.index == b.index
        assert a.distance == pytest.approx(b.distance, abs=1e-9)

    def test_obstacles_not_selectable(self):
        # the oversized object sits right on the ray but cannot be chosen
        objects = [
            StructuralObject(0, 0.05, 0.05, 0.05, np.array([0.5, 0.3, 0.0])),
            StructuralObject(1, 0.30, 0.3, 0.3, np.array([0.5, 0.0, 0.0])),
        ]
        effector = EndEffectorState(np.array([0, 0, 0.3, 0, 0, 0, 1.0]), 0.0)
        scene = build_scene(objects, effector, 0.08)
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert select_target(ray, scene).index == 0

    def test_no_candidates(self):
        objects = [StructuralObject(0, 0.30, 0.3, 0.3, np.zeros(3))]
        effector = EndEffectorState(np.array([0, 0, 0.3, 0, 0, 0, 1.0]), 0.0)
        scene = build_scene(objects, effector, 0.08)
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        with pytest.raises(NoCandidates):
            select_target(ray, scene)

    def test_forward_only_skips_objects_behind_wrist(self):
        behind = [-1.0, 0.0, 0.0]
        ahead = [2.0, 0.05, 0.0]
        scene = _scene([behind, ahead])
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert select_target(ray, scene).index == 0  # infinite line: closer
        assert select_target(ray, scene, forward_only=True).index == 1

    def test_forward_only_can_empty_candidates(self):
        scene = _scene([[-1.0, 0.0, 0.0]])
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        with pytest.raises(NoCandidates):
            select_target(ray, scene, forward_only=True)

    def test_distances_cover_all_candidates(self):
        scene = _scene([[0.1, 0.2, 0.0], [0.4, -0.1, 0.0], [0.9, 0.0, 0.3]])
        ray = DeicticRay(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        selection = select_target(ray, scene)
        assert [i for i, _ in selection.distances] == [0, 1, 2]
        assert selection.distance == min(d for _, d in selection.distances)
