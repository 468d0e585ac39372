"""Record real session-API traffic into fixtures for the console tests.

The console's vitest suite runs offline against these files; regenerate
after changing the server, the event schema, or the drag synthesis:

    python3 tools/make_frontend_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from deskpilot.config import EngineConfig
from deskpilot.scene import EndEffectorState, StructuralObject, build_scene, scene_to_snapshot
from deskpilot.server import create_app

FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"

# mirror of the console's top-down viewport and drag synthesis
VIEW = {"originX": 320, "originY": 360, "scale": 480}
AIM_HEIGHT = 0.06


def round6(value: float) -> float:
    # JS Math.round semantics (half toward +inf)
    return math.floor(value * 1e6 + 0.5) / 1e6


def world_from_screen(px: float, py: float) -> tuple[float, float]:
    return (px - VIEW["originX"]) / VIEW["scale"], (VIEW["originY"] - py) / VIEW["scale"]


def screen_from_world(wx: float, wy: float) -> tuple[int, int]:
    return round(VIEW["originX"] + wx * VIEW["scale"]), round(VIEW["originY"] - wy * VIEW["scale"])


def drag_to_skeleton(drag: dict) -> dict:
    ex, ey = world_from_screen(drag["x0"], drag["y0"])
    wx, wy = world_from_screen(drag["x1"], drag["y1"])
    return {
        "right_elbow": [round6(ex), round6(ey), round6(AIM_HEIGHT)],
        "right_wrist": [round6(wx), round6(wy), round6(AIM_HEIGHT)],
    }


def _object(index: int, x: float, y: float, w=0.05, h=0.05, d=0.05) -> StructuralObject:
    return StructuralObject(index, w, h, d, np.array([x, y, d / 2]))


def build_layouts(config: EngineConfig) -> list[dict]:
    """20 scripted layouts: nine 20 cm briquette pairs plus mixed desks."""
    layouts: list[dict] = []
    rng = np.random.default_rng(99)

    # nine briquette pairs, 20 cm apart, at varying desk positions; the drag
    # aims straight at one of the two
    for i in range(9):
        cx = -0.3 + 0.075 * i
        cy = 0.15 + 0.025 * i
        target = i % 2
        objects = [_object(0, cx, cy), _object(1, cx + 0.20, cy)]
        aim = objects[target].centroid
        x1, y1 = screen_from_world(aim[0], aim[1])
        layouts.append(
            {
                "name": f"pair-{i}",
                "objects": objects,
                "drag": {"x0": 320, "y0": 408, "x1": x1, "y1": y1},
            }
        )

    # a symmetric tie: the ray runs exactly midway between the pair
    tie_y = 0.25
    layouts.append(
        {
            "name": "pair-tie",
            "objects": [_object(0, 0.2, tie_y + 0.1), _object(1, 0.2, tie_y - 0.1)],
            "drag": {"x0": 10, "y0": 240, "x1": 600, "y1": 240},
        }
    )

    # mixed desks with obstacles and 3-6 objects
    for i in range(10):
        count = int(rng.integers(3, 7))
        objects = []
        for k in range(count):
            objects.append(
                _object(
                    k,
                    float(rng.uniform(-0.45, 0.45)),
                    float(rng.uniform(0.05, 0.45)),
                    w=float(rng.uniform(0.04, 0.06)),
                )
            )
        # one oversized obstacle that must never be highlighted
        objects.append(
            StructuralObject(
                count, 0.2, 0.2, 0.2,
                np.array([float(rng.uniform(-0.3, 0.3)), float(rng.uniform(0.1, 0.4)), 0.1]),
            )
        )
        aim = objects[int(rng.integers(0, count))].centroid
        x1, y1 = screen_from_world(aim[0] + float(rng.uniform(-0.02, 0.02)),
                                   aim[1] + float(rng.uniform(-0.02, 0.02)))
        layouts.append(
            {
                "name": f"desk-{i}",
                "objects": objects,
                "drag": {"x0": 320 + int(rng.integers(-40, 40)), "y0": 408, "x1": x1, "y1": y1},
            }
        )
    return layouts


def record_layouts(client: TestClient, config: EngineConfig) -> list[dict]:
    fixtures = []
    for layout in build_layouts(config):
        effector = EndEffectorState(config.home_pose, 0.0)
        scene = build_scene(layout["objects"], effector, config.gripper_max_width)
        snapshot = scene_to_snapshot(scene)
        created = client.post("/sessions", json={"scene": snapshot}).json()
        skeleton = drag_to_skeleton(layout["drag"])
        response = client.post(
            f"/sessions/{created['id']}/skeleton", json={"joints": skeleton, "t": 1.0}
        )
        response.raise_for_status()
        events = response.json()["events"]
        selection = next(e for e in events if e["type"] == "selection")
        fixtures.append(
            {
                "name": layout["name"],
                "viewport": VIEW,
                "aim_height": AIM_HEIGHT,
                "scene": snapshot,
                "drag": layout["drag"],
                "skeleton": skeleton,
                "server_events": events,
                "server_selection": selection,
            }
        )
    return fixtures


def record_session_flow(client: TestClient, config: EngineConfig) -> dict:
    """Full approve->finish flow over the API, with every event recorded."""
    effector = EndEffectorState(config.home_pose, 0.0)
    objects = [
        _object(0, 0.30, 0.20, d=0.06),
        _object(1, -0.30, 0.20, w=0.06, h=0.06),
        StructuralObject(2, 0.2, 0.2, 0.3, np.array([0.0, 0.2, 0.15])),
    ]
    scene = build_scene(objects, effector, config.gripper_max_width)
    created = client.post("/sessions", json={"scene": scene_to_snapshot(scene)}).json()
    sid = created["id"]

    def drag_at(target, t):
        x1, y1 = screen_from_world(target[0], target[1])
        skeleton = drag_to_skeleton({"x0": 320, "y0": 408, "x1": x1, "y1": y1})
        client.post(f"/sessions/{sid}/skeleton", json={"joints": skeleton, "t": t}).raise_for_status()

    client.post(f"/sessions/{sid}/utterance", json={"text": "pick up this cup", "t": 1.0})
    drag_at(objects[0].centroid, 2.0)
    client.post(f"/sessions/{sid}/utterance", json={"text": "yes", "t": 3.0})
    client.post(f"/sessions/{sid}/utterance", json={"text": "put it in the bowl", "t": 4.0})
    drag_at(objects[1].centroid, 5.0)
    client.post(f"/sessions/{sid}/utterance", json={"text": "this one", "t": 6.0})
    final = client.post(f"/sessions/{sid}/utterance", json={"text": "finish", "t": 7.0}).json()

    state = client.get(f"/sessions/{sid}/state").json()
    state["id"] = "recorded-session"  # keep regenerated fixtures diff-clean
    with client.stream("GET", f"/sessions/{sid}/events?limit={state['seq']}&timeout=0.2") as r:
        raw_sse = "".join(r.iter_text())
    events = []
    for block in raw_sse.strip().split("\n\n"):
        data = [l[6:] for l in block.splitlines() if l.startswith("data: ")]
        if data:
            events.append(json.loads("\n".join(data)))
    plan_event = next(e for e in final["events"] if e["type"] == "plan")
    return {
        "scene": created["scene"],
        "events": events,
        "raw_sse_sample": raw_sse.split("\n\n")[0] + "\n\n",
        "final_state": state,
        "server_report": {
            "verdict": plan_event["check"]["verdict"],
            "attempts": plan_event["check"]["attempts"],
            "segments": plan_event["trajectory"]["segments"],
        },
    }


def main() -> None:
    config = EngineConfig()
    client = TestClient(create_app(config))
    FIXTURES.mkdir(parents=True, exist_ok=True)
    layouts = record_layouts(client, config)
    (FIXTURES / "layouts.json").write_text(json.dumps(layouts, indent=1, sort_keys=True))
    flow = record_session_flow(client, config)
    (FIXTURES / "session_flow.json").write_text(json.dumps(flow, indent=1, sort_keys=True))
    print(f"wrote {len(layouts)} layouts and a session flow with {len(flow['events'])} events")


if __name__ == "__main__":
    main()
