"""Swept-volume checker and the plan/check/replan loop."""

from __future__ import annotations

import numpy as np
import pytest

from deskpilot.errors import InvalidInput, PlanningFailed
from deskpilot.grammar import Intention
from deskpilot.oracles import path_min_clearance, sampled_sweep_hits
from deskpilot.planning import ActionSequence, MoveTo, PlanStep, Pose
from deskpilot.safety import (
    Box3,
    CheckResult,
    check,
    check_inputs_for_intention,
    plan_with_feedback,
    segment_hits_box,
    step_verdicts,
)
from deskpilot.scene import EndEffectorState, StructuralObject, build_scene

UNIT_BOX = Box3(np.zeros(3), np.full(3, 0.5))


def _transport_sequence(p0, p1, attached=True) -> ActionSequence:
    start = Pose(tuple(p0))
    end = Pose(tuple(p1))
    return ActionSequence([PlanStep(MoveTo(end), start, end, attached=attached)])


class TestSegmentHitsBox:
    def test_axis_crossing_hits_entry_face(self):
        hit = segment_hits_box(np.array([-1.0, 0, 0]), np.array([1.0, 0, 0]), UNIT_BOX)
        np.testing.assert_allclose(hit, [-0.5, 0.0, 0.0])

    def test_segment_above_box_misses(self):
        assert segment_hits_box(np.array([-1.0, 0, 2.0]), np.array([1.0, 0, 2.0]), UNIT_BOX) is None

    def test_grazing_face_counts_as_hit(self):
        hit = segment_hits_box(np.array([-1.0, 0, 0.5]), np.array([1.0, 0, 0.5]), UNIT_BOX)
        assert hit is not None
        np.testing.assert_allclose(hit, [-0.5, 0.0, 0.5])

    def test_start_inside_reports_start(self):
        hit = segment_hits_box(np.array([0.1, 0.1, 0.1]), np.array([2.0, 0, 0]), UNIT_BOX)
        np.testing.assert_allclose(hit, [0.1, 0.1, 0.1])

    def test_zero_length_segment_inside(self):
        point = np.array([0.2, -0.2, 0.0])
        np.testing.assert_allclose(segment_hits_box(point, point, UNIT_BOX), point)

    def test_zero_length_segment_outside(self):
        point = np.array([2.0, 0.0, 0.0])
        assert segment_hits_box(point, point, UNIT_BOX) is None

    def test_axis_parallel_outside_slab(self):
        assert segment_hits_box(np.array([2.0, -1.0, 0]), np.array([2.0, 1.0, 0]), UNIT_BOX) is None

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInput):
            segment_hits_box(np.array([np.nan, 0, 0]), np.zeros(3), UNIT_BOX)


class TestCheck:
    def test_transport_through_obstacle_collides_at_expanded_entry(self):
        # straight flight at obstacle height; compare against the sampling oracle
        half = np.array([0.03, 0.03, 0.05])
        obstacle = Box3(np.array([0.0, 0.0, 0.15]), np.array([0.1, 0.1, 0.15]))
        seq = _transport_sequence([-0.5, 0.0, 0.2], [0.5, 0.0, 0.2])
        result = check(seq, Box3(np.zeros(3), half), [obstacle])
        assert not result.clear
        np.testing.assert_allclose(result.point, [-0.13, 0.0, 0.2])  # expanded x face
        assert sampled_sweep_hits(
            [-0.5, 0.0, 0.2], [0.5, 0.0, 0.2], half,
            [(obstacle.center, obstacle.half_extents)], step=1e-3,
        )
        assert obstacle.expanded(half).contains(result.point)

    def test_transport_above_separation_is_clear(self):
        half = np.array([0.03, 0.03, 0.05])
        obstacle = Box3(np.array([0.0, 0.0, 0.15]), np.array([0.1, 0.1, 0.15]))
        z = 0.30 + 0.05 + 1e-6  # obstacle top + object half height + epsilon
        seq = _transport_sequence([-0.5, 0.0, z], [0.5, 0.0, z])
        assert check(seq, Box3(np.zeros(3), half), [obstacle]).clear

    def test_empty_obstacle_list_is_clear(self):
        seq = _transport_sequence([-0.5, 0, 0.1], [0.5, 0, 0.1])
        assert check(seq, UNIT_BOX, []).clear

    def test_unattached_segments_use_gripper_box(self):
        big = Box3(np.zeros(3), np.full(3, 0.2))
        slim = Box3(np.zeros(3), np.full(3, 0.01))
        obstacle = Box3(np.array([0.0, 0.0, 0.0]), np.full(3, 0.05))
        seq = _transport_sequence([-0.5, 0, 0.1], [0.5, 0, 0.1], attached=False)
        # with the fat box as gripper the flight would collide; the slim one clears
        assert not check(seq, big, [obstacle], gripper=big).clear
        assert check(seq, big, [obstacle], gripper=slim).clear

    def test_rotating_step_inflates_to_sphere(self):
        half = np.array([0.1, 0.01, 0.01])
        pose = Pose((0.0, 0.0, 0.2))
        seq = ActionSequence(
            [PlanStep(MoveTo(pose), pose, pose, attached=True, rotating=True)]
        )
        # obstacle sits beyond the y half extent but inside the sphere radius
        obstacle = Box3(np.array([0.0, 0.09, 0.2]), np.full(3, 0.01))
        assert not check(seq, Box3(np.zeros(3), half), [obstacle]).clear
        calm = ActionSequence([PlanStep(MoveTo(pose), pose, pose, attached=True)])
        assert check(calm, Box3(np.zeros(3), half), [obstacle]).clear

    def test_first_collision_order_is_deterministic(self):
        half = np.full(3, 0.01)
        far = Box3(np.array([0.4, 0.0, 0.0]), np.full(3, 0.05))
        near = Box3(np.array([-0.4, 0.0, 0.0]), np.full(3, 0.05))
        seq = _transport_sequence([-1.0, 0, 0], [1.0, 0, 0])
        result = check(seq, Box3(np.zeros(3), half), [far, near])
        # single step: lowest obstacle index wins, regardless of geometry
        assert result.step == 0 and result.obstacle == 0

    def test_verdict_invariants(self):
        with pytest.raises(InvalidInput):
            CheckResult(clear=True, sequence_digest="x", step=1)
        with pytest.raises(InvalidInput):
            CheckResult(clear=False, sequence_digest="x", step=1)

    def test_step_verdicts_localize_collision(self):
        half = np.full(3, 0.02)
        obstacle = Box3(np.array([0.0, 0.0, 0.2]), np.full(3, 0.1))
        clear_pose = Pose((-0.5, 0.0, 0.5))
        dive_pose = Pose((0.0, 0.0, 0.2))
        seq = ActionSequence(
            [
                PlanStep(MoveTo(clear_pose), Pose((-0.5, 0, 0.6)), clear_pose, attached=True),
                PlanStep(MoveTo(dive_pose), clear_pose, dive_pose, attached=True),
            ]
        )
        verdicts = step_verdicts(seq, Box3(np.zeros(3), half), [obstacle])
        assert verdicts == [True, False]


class TestAgainstSamplingOracle:
    def test_random_cases_no_false_negatives(self):
        rng = np.random.default_rng(101)
        disagreements = 0
        for _ in range(300):
            p0 = rng.uniform(-0.6, 0.6, 3)
            p1 = rng.uniform(-0.6, 0.6, 3)
            half = rng.uniform(0.01, 0.08, 3)
            center = rng.uniform(-0.5, 0.5, 3)
            obs_half = rng.uniform(0.02, 0.25, 3)
            checker = segment_hits_box(p0, p1, Box3(center, obs_half + half)) is not None
            oracle = sampled_sweep_hits(p0, p1, half, [(center, obs_half)], step=1e-3)
            if oracle:
                assert checker, "sampling oracle found a collision the checker missed"
            if checker and not oracle:
                disagreements += 1
                assert path_min_clearance(p0, p1, half, center, obs_half) < 1e-6


class StubPlanner:
    """Replays scripted sequences; counts invocations."""

    def __init__(self, sequences):
        self.sequences = list(sequences)
        self.calls = 0
        self.feedbacks = []

    def plan(self, intention, scene, feedback=None):
        self.feedbacks.append(feedback)
        seq = self.sequences[min(self.calls, len(self.sequences) - 1)]
        self.calls += 1
        return seq


def _loop_scene(config):
    source = StructuralObject(0, 0.05, 0.05, 0.06, np.array([0.3, 0.2, 0.03]))
    dest = StructuralObject(1, 0.05, 0.05, 0.06, np.array([-0.3, 0.2, 0.03]))
    obstacle = StructuralObject(2, 0.2, 0.2, 0.3, np.array([0.0, 0.2, 0.15]))
    effector = EndEffectorState(config.home_pose, 0.0)
    return build_scene([source, dest, obstacle], effector, config.gripper_max_width)


class TestPlanWithFeedback:
    def test_collision_then_corrected(self, config):
        scene = _loop_scene(config)
        bad = _transport_sequence([0.3, 0.2, 0.2], [-0.3, 0.2, 0.2])   # through the obstacle
        good = _transport_sequence([0.3, 0.2, 0.45], [-0.3, 0.2, 0.45])
        planner = StubPlanner([bad, good])
        outcome = plan_with_feedback(planner, Intention("pick", 0, "put", 1), scene, 3, config)
        assert outcome.attempts == 2
        assert outcome.result.clear
        assert planner.feedbacks[0] is None
        assert planner.feedbacks[1].verdict == "collision"
        assert planner.feedbacks[1].step == 0

    def test_always_colliding_exhausts_retries(self, config):
        scene = _loop_scene(config)
        bad = _transport_sequence([0.3, 0.2, 0.2], [-0.3, 0.2, 0.2])
        planner = StubPlanner([bad])
        with pytest.raises(PlanningFailed) as info:
            plan_with_feedback(planner, Intention("pick", 0, "put", 1), scene, 3, config)
        assert planner.calls == 4  # max_retries=3 means four attempts
        assert info.value.last_result is not None
        assert not info.value.last_result.clear

    def test_returned_sequence_passes_independent_recheck(self, config):
        scene = _loop_scene(config)
        good = _transport_sequence([0.3, 0.2, 0.45], [-0.3, 0.2, 0.45])
        outcome = plan_with_feedback(
            StubPlanner([good]), Intention("pick", 0, "put", 1), scene, 0, config
        )
        manipulated, obstacles, gripper = check_inputs_for_intention(
            scene, Intention("pick", 0, "put", 1), config
        )
        assert check(outcome.sequence, manipulated, obstacles, gripper).clear

    def test_negative_retries_rejected(self, config):
        scene = _loop_scene(config)
        with pytest.raises(InvalidInput):
            plan_with_feedback(StubPlanner([]), Intention("home"), scene, -1, config)

    def test_targets_excluded_from_obstacles(self, config):
        scene = _loop_scene(config)
        intention = Intention("pick", 0, "put", 1)
        manipulated, obstacles, _ = check_inputs_for_intention(scene, intention, config)
        # only the oversized obstacle remains; both targets are excluded
        assert len(obstacles) == 1
        np.testing.assert_allclose(manipulated.center, [0.3, 0.2, 0.03])
