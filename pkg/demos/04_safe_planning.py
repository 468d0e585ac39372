"""
Planning with a collision cross-check in the loop
=================================================

Every planned trajectory is checked by sweeping the carried box along each
waypoint segment (exactly, via Minkowski-expanded obstacles). A planner
that ignores obstacles gets its collision fed back and must try again; a
sighted planner passes on the first attempt.
"""

import numpy as np

from deskpilot import EngineConfig
from deskpilot.grammar import Intention
from deskpilot.planning import DeterministicPlanner, FaultInjectedPlanner
from deskpilot.safety import check, check_inputs_for_intention, plan_with_feedback
from deskpilot.scene import EndEffectorState, StructuralObject, build_scene

config = EngineConfig()
objects = [
    StructuralObject(0, 0.05, 0.05, 0.06, np.array([0.30, 0.20, 0.03])),
    StructuralObject(1, 0.06, 0.06, 0.05, np.array([-0.30, 0.20, 0.025])),
    StructuralObject(2, 0.20, 0.20, 0.30, np.array([0.00, 0.20, 0.15])),  # tall wall
]
scene = build_scene(objects, EndEffectorState(config.home_pose, 0.0), config.gripper_max_width)
intention = Intention("pick", 0, "put", 1)

planner = DeterministicPlanner(config)
sequence = planner.plan(intention, scene)
print("sighted plan:")
print(sequence.to_text())

manipulated, obstacles, gripper = check_inputs_for_intention(scene, intention, config)
print("cross-check:", check(sequence, manipulated, obstacles, gripper).to_dict())

# a planner that is obstacle-blind on every attempt never survives the loop;
# one that is blind half the time gets corrected within a few retries
blind = FaultInjectedPlanner(planner, q=1.0, rng=np.random.default_rng(0))
bad = blind.plan(intention, scene)
verdict = check(bad, manipulated, obstacles, gripper)
print("\nobstacle-blind plan verdict:", verdict.to_dict())

flaky = FaultInjectedPlanner(planner, q=0.5, rng=np.random.default_rng(3))
outcome = plan_with_feedback(flaky, intention, scene, max_retries=5, config=config)
print(f"\nfeedback loop recovered in {outcome.attempts} attempt(s); verdict clear.")
