"""Regenerate the bundled scenario files and canned planner responses.

Run from the repository root after changing perception, planning or the
default config:

    python3 tools/make_scenarios.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from deskpilot.config import EngineConfig
from deskpilot.grammar import Intention, MetricCommand
from deskpilot.orchestrator import perceive_world
from deskpilot.planning import DeterministicPlanner
from deskpilot.segmentation import BoxSpec, WorldSpec

DATA = Path(__file__).resolve().parents[1] / "src" / "deskpilot" / "data"


def _skeleton(elbow, aim):
    elbow = np.asarray(elbow, dtype=float)
    wrist = elbow + 0.4 * (np.asarray(aim, dtype=float) - elbow)
    return {
        "joints": {
            "right_elbow": [round(v, 6) for v in elbow],
            "right_wrist": [round(v, 6) for v in wrist],
        }
    }


def pick_place_scenario(cfg: EngineConfig) -> tuple[dict, WorldSpec, Intention]:
    world = WorldSpec(
        (
            BoxSpec(np.array([0.30, 0.20, 0.05]), np.array([0.06, 0.06, 0.10]), 0),
            BoxSpec(np.array([-0.30, 0.20, 0.035]), np.array([0.07, 0.07, 0.07]), 1),
            BoxSpec(np.array([0.00, 0.20, 0.125]), np.array([0.12, 0.18, 0.25]), 2),
        ),
        cfg.intrinsics,
        cfg.base_from_camera,
    )
    scene = perceive_world(world, cfg)
    cup = scene.find(0).centroid
    bowl = scene.find(1).centroid
    events = [
        {"t": 1.0, "kind": "utterance", "payload": {"text": "pick up this cup"}},
        {"t": 2.0, "kind": "skeleton", "payload": _skeleton([0.10, -0.50, 0.40], cup)},
        {"t": 3.0, "kind": "utterance", "payload": {"text": "yes"}},
        {"t": 4.0, "kind": "utterance", "payload": {"text": "put it in the bowl"}},
        {"t": 5.0, "kind": "skeleton", "payload": _skeleton([-0.10, -0.50, 0.40], bowl)},
        {"t": 6.0, "kind": "utterance", "payload": {"text": "this one"}},
        {"t": 7.0, "kind": "utterance", "payload": {"text": "finish"}},
    ]
    intention = Intention("pick", 0, "put", 1)
    scenario = {
        "name": "pick-place-over-obstacle",
        "world": world.to_dict(),
        "events": events,
        "assertions": [
            {"kind": "intention", "tuple": intention.render()},
            {
                "kind": "centroid_in_box",
                "object": 0,
                "min": [-0.37, 0.13, 0.01],
                "max": [-0.23, 0.27, 0.30],
            },
            {"kind": "verdict_clear"},
            {"kind": "attempts_at_most", "value": 1},
        ],
    }
    return scenario, world, intention


def pick_pour_scenario(cfg: EngineConfig) -> tuple[dict, WorldSpec, Intention]:
    world = WorldSpec(
        (
            BoxSpec(np.array([0.25, 0.10, 0.06]), np.array([0.06, 0.06, 0.12]), 0),
            BoxSpec(np.array([-0.25, 0.30, 0.04]), np.array([0.07, 0.07, 0.08]), 1),
            BoxSpec(np.array([0.00, 0.20, 0.10]), np.array([0.14, 0.14, 0.20]), 2),
        ),
        cfg.intrinsics,
        cfg.base_from_camera,
    )
    scene = perceive_world(world, cfg)
    cup = scene.find(0).centroid
    bowl = scene.find(1).centroid
    events = [
        {"t": 1.0, "kind": "utterance", "payload": {"text": "pick up this charcoal brioche"}},
        {"t": 2.0, "kind": "skeleton", "payload": _skeleton([0.10, -0.50, 0.40], cup)},
        {"t": 3.0, "kind": "utterance", "payload": {"text": "yes"}},
        {"t": 4.0, "kind": "utterance", "payload": {"text": "pour it into this bowl"}},
        {"t": 5.0, "kind": "skeleton", "payload": _skeleton([-0.10, -0.50, 0.40], bowl)},
        {"t": 6.0, "kind": "utterance", "payload": {"text": "that one"}},
        {"t": 7.0, "kind": "utterance", "payload": {"text": "at ninety degrees"}},
        {"t": 8.0, "kind": "utterance", "payload": {"text": "finish"}},
    ]
    intention = Intention("pick", 0, "pour", 1, MetricCommand("angle", 90.0, "degrees"))
    scenario = {
        "name": "pick-pour-90",
        "world": world.to_dict(),
        "events": events,
        "assertions": [
            {"kind": "intention", "tuple": intention.render()},
            {"kind": "poured", "object": 0, "angle": 90.0},
            {
                "kind": "centroid_in_box",
                "object": 0,
                "min": [-0.33, 0.23, 0.05],
                "max": [-0.17, 0.37, 0.50],
            },
            {"kind": "verdict_clear"},
            {"kind": "attempts_at_most", "value": 1},
        ],
    }
    return scenario, world, intention


def main() -> None:
    cfg = EngineConfig()
    planner = DeterministicPlanner(cfg)
    for build in (pick_place_scenario, pick_pour_scenario):
        scenario, world, intention = build(cfg)
        name = scenario["name"]
        path = DATA / "scenarios" / f"{name}.json"
        path.write_text(json.dumps(scenario, indent=2, sort_keys=True) + "\n")
        scene = perceive_world(world, cfg)
        plan_text = planner.plan(intention, scene).to_text()
        (DATA / "canned" / f"{name}.txt").write_text(plan_text)
        print(f"wrote {name}: {len(scenario['events'])} events")
        print(plan_text)


if __name__ == "__main__":
    main()
