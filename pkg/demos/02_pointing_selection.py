"""
Selecting an object by pointing at it
=====================================

The pointing line runs through the right elbow and wrist. Every
interactable object is ranked by its centroid's distance to that line;
the nearest one is the candidate target. Two identical briquettes 20 cm
apart show the selection flipping as the operator's wrist moves.
"""

import numpy as np

from deskpilot import EngineConfig
from deskpilot.deixis import SkeletonFrame, forearm_ray, select_target
from deskpilot.orchestrator import perceive_world
from deskpilot.segmentation import BoxSpec, WorldSpec

config = EngineConfig()
world = WorldSpec(
    (
        BoxSpec(np.array([0.10, 0.30, 0.025]), np.array([0.05, 0.05, 0.05]), 0),
        BoxSpec(np.array([0.30, 0.30, 0.025]), np.array([0.05, 0.05, 0.05]), 1),
    ),
    config.intrinsics,
    config.base_from_camera,
)
scene = perceive_world(world, config)

elbow = np.array([0.0, -0.5, 0.4])
for target_x in (0.10, 0.18, 0.22, 0.30):
    aim = np.array([target_x, 0.30, 0.05])
    wrist = elbow + 0.4 * (aim - elbow)
    frame = SkeletonFrame({"right_elbow": elbow, "right_wrist": wrist})
    ray = forearm_ray(frame)
    selection = select_target(ray, scene)
    ranked = ", ".join(f"#{i}:{d:.3f} m" for i, d in selection.distances)
    print(f"aiming at x={target_x:+.2f} -> object {selection.index}   ({ranked})")
