"""Session lifecycle, simulated execution, and headless scenario replay.

A session owns a perceived scene and a grammar state machine. Skeleton
frames refresh the live pointing selection; utterances drive the protocol;
a completed intention is planned, cross-checked, and only then executed
against the simulated scene. Every step lands in an ordered event log that
fully reconstructs the session.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from queue import Queue

import numpy as np

from .config import EngineConfig, bundled_data_path
from .deixis import SkeletonFrame, forearm_ray, select_target
from .errors import (
    EngineError,
    InvalidInput,
    InvalidSequence,
    PlanningFailed,
    SafetyGateViolation,
    UnknownTarget,
)
from .grammar import (
    Intention,
    Phase,
    PhraseTable,
    SessionState,
    VerbalUtterance,
    advance,
    fuse,
    parse_utterance,
)
from .planning import (
    ActionSequence,
    CannedChatClient,
    CloseGripper,
    DeterministicPlanner,
    Drop,
    ExternalPlanner,
    HttpChatClient,
    OpenGripper,
    Pick,
    Place,
    Planner,
    Pour,
)
from .safety import (
    CheckResult,
    check_inputs_for_intention,
    plan_with_feedback,
    step_verdicts,
)
from .scene import EndEffectorState, Scene, build_scene, scene_to_snapshot
from .segmentation import WorldSpec, objects_from_frame, synthesize

EVENT_VERSION = 1


def perceive_world(world: WorldSpec, config: EngineConfig) -> Scene:
    """Synthetic perception: render the world and rebuild its scene."""
    depth, frame = synthesize(world, config.min_mask_pixels)
    objects = objects_from_frame(
        depth, frame, world.intrinsics, world.camera_pose, config.axis_convention
    )
    effector = EndEffectorState(config.home_pose, 0.0)
    return build_scene(objects, effector, config.gripper_max_width)


# ---------------------------------------------------------------------------
# Kinematic execution


def execute(sequence: ActionSequence, scene: Scene, clearance: CheckResult) -> Scene:
    """Apply a checked sequence to the scene, kinematically.

    Refuses sequences whose digest does not match a Clear verdict. Picking
    attaches the target (its centroid then tracks the effector), placing and
    dropping detach at the current location, pouring records the angle on
    the attached object, extents never change.
    """
    if not clearance.clear:
        raise SafetyGateViolation("sequence did not pass the cross-check")
    if clearance.sequence_digest != sequence.digest():
        raise SafetyGateViolation("clearance verdict belongs to a different sequence")

    objects = {obj.index: obj for obj in scene.all_objects()}
    poured = dict(scene.poured)
    opening = scene.effector.gripper_opening
    attached: int | None = None
    pose = scene.effector.pose.copy()

    for step in sequence.steps:
        prim = step.primitive
        pose = np.concatenate([np.asarray(step.end.position), np.asarray(step.end.orientation)])
        if attached is not None:
            objects[attached] = replace(objects[attached], centroid=pose[:3].copy())
        if isinstance(prim, Pick):
            if attached is not None:
                raise InvalidSequence("pick while already holding an object")
            if prim.index not in objects:
                raise InvalidSequence(f"pick targets unknown object {prim.index}")
            if objects[prim.index].width > scene.gripper_max_width + 1e-12:
                raise InvalidSequence(
                    f"object {prim.index} is wider than the gripper opening"
                )
            attached = prim.index
            opening = objects[attached].width
            objects[attached] = replace(objects[attached], centroid=pose[:3].copy())
        elif isinstance(prim, Place):
            if attached is None:
                raise InvalidSequence("place with nothing attached")
            attached = None
            opening = scene.gripper_max_width
        elif isinstance(prim, Drop):
            attached = None
            opening = scene.gripper_max_width
        elif isinstance(prim, Pour):
            if attached is None:
                raise InvalidSequence("pour with nothing attached")
            poured[attached] = prim.angle_deg
        elif isinstance(prim, OpenGripper):
            if prim.width > scene.gripper_max_width + 1e-12:
                raise InvalidSequence("gripper commanded wider than its maximum")
            opening = prim.width
            attached = None
        elif isinstance(prim, CloseGripper):
            if prim.width > scene.gripper_max_width + 1e-12:
                raise InvalidSequence("gripper commanded wider than its maximum")
            opening = prim.width
        # MoveTo / Home need no extra bookkeeping beyond the pose update

    effector = EndEffectorState(pose, min(opening, scene.gripper_max_width))
    interactable = [objects[o.index] for o in scene.interactable]
    obstacles = [objects[o.index] for o in scene.obstacles]
    result = Scene(interactable, obstacles, effector, scene.gripper_max_width, poured)
    return result


def trajectory_dump(
    sequence: ActionSequence, scene: Scene, intention: Intention, config: EngineConfig
) -> dict:
    """Waypoints plus per-segment verdicts for visualization clients."""
    manipulated, obstacles, gripper = check_inputs_for_intention(scene, intention, config)
    verdicts = step_verdicts(sequence, manipulated, obstacles, gripper)
    waypoints = [[float(v) for v in sequence.steps[0].start.position]]
    waypoints += [[float(v) for v in s.end.position] for s in sequence.steps]
    return {
        "waypoints": waypoints,
        "segments": [
            {"step": i, "token": type(s.primitive).__name__, "clear": bool(ok),
             "attached": s.attached}
            for i, (s, ok) in enumerate(zip(sequence.steps, verdicts))
        ],
    }


# ---------------------------------------------------------------------------
# Sessions


def make_planner(config: EngineConfig, canned_responses: list[str] | None = None) -> Planner:
    backend = config.planner.backend
    if backend == "deterministic":
        return DeterministicPlanner(config)
    if backend == "external":
        return ExternalPlanner(HttpChatClient(config.planner), config)
    if backend == "canned":
        responses = canned_responses or ["HOME"]
        return ExternalPlanner(CannedChatClient(responses), config)
    raise InvalidInput(f"unknown planner backend {backend!r}")


@dataclass
class Session:
    id: str
    scene: Scene
    initial_scene: Scene
    state: SessionState = field(default_factory=SessionState.initial)
    events: list[dict] = field(default_factory=list)
    last_t: float = float("-inf")
    seq: int = 0
    plans: int = 0
    attempts_total: int = 0
    lock: threading.RLock = field(default_factory=threading.RLock)
    subscribers: list[Queue] = field(default_factory=list)


class SessionService:
    """Single-writer-per-session orchestrator behind the HTTP API and CLI."""

    def __init__(
        self,
        config: EngineConfig | None = None,
        planner: Planner | None = None,
        store_dir: str | Path | None = None,
    ):
        self.config = config or EngineConfig()
        self.planner = planner or make_planner(self.config)
        self.sessions: dict[str, Session] = {}
        self._table = PhraseTable.from_file(self.config.phrase_table_path or None)
        self._registry_lock = threading.Lock()
        store = store_dir if store_dir is not None else (self.config.sessions_dir or None)
        self.store_dir = Path(store) if store else None

    # -- lifecycle

    def create_session(
        self, scene: Scene | None = None, world: WorldSpec | None = None
    ) -> Session:
        if scene is None and world is None:
            raise InvalidInput("a session needs a scene snapshot or a world spec")
        if scene is None:
            scene = perceive_world(world, self.config)
        session = Session(id=uuid.uuid4().hex[:12], scene=scene, initial_scene=scene)
        with self._registry_lock:
            self.sessions[session.id] = session
        if self.store_dir:
            root = self.store_dir / session.id
            root.mkdir(parents=True, exist_ok=True)
            (root / "scene_initial.json").write_text(
                json.dumps(scene_to_snapshot(scene), sort_keys=True)
            )
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownTarget(f"no session {session_id!r}") from None

    # -- event plumbing

    def _emit(self, session: Session, t: float, kind: str, payload: dict) -> dict:
        session.seq += 1
        event = {"v": EVENT_VERSION, "seq": session.seq, "t": t, "type": kind, **payload}
        session.events.append(event)
        for q in list(session.subscribers):
            q.put(event)
        if self.store_dir:
            path = self.store_dir / session.id / "events.jsonl"
            with path.open("a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        return event

    def _check_time(self, session: Session, t: float) -> None:
        if t <= session.last_t:
            raise InvalidInput(
                f"event timestamp {t} is not after the previous one ({session.last_t})"
            )
        session.last_t = t

    def subscribe(self, session_id: str) -> Queue:
        session = self.get(session_id)
        q: Queue = Queue()
        with session.lock:
            session.subscribers.append(q)
        return q

    def unsubscribe(self, session_id: str, q: Queue) -> None:
        session = self.get(session_id)
        with session.lock:
            if q in session.subscribers:
                session.subscribers.remove(q)

    # -- ingestion

    def ingest_utterance(self, session_id: str, text: str, t: float) -> list[dict]:
        session = self.get(session_id)
        with session.lock:
            self._check_time(session, t)
            start = len(session.events)
            self._emit(session, t, "utterance", {"text": text})
            self._table = self._table.maybe_reload()
            try:
                command = parse_utterance(VerbalUtterance(text, t), self._table)
                session.state = advance(session.state, command)
            except EngineError as exc:
                self._emit(session, t, "error", {"code": exc.code, "message": str(exc)})
                return session.events[start:]
            self._emit(
                session, t, "state",
                {"phase": session.state.phase.value, "command": type(command).__name__},
            )
            if session.state.phase is Phase.COMPLETE:
                self._run_plan(session, t)
            return session.events[start:]

    def ingest_skeleton(self, session_id: str, joints: dict, t: float) -> list[dict]:
        session = self.get(session_id)
        with session.lock:
            self._check_time(session, t)
            start = len(session.events)
            self._emit(
                session, t, "skeleton",
                {"joints": {k: [float(x) for x in v] for k, v in joints.items()}},
            )
            try:
                ray = forearm_ray(SkeletonFrame(joints, t))
                selection = select_target(
                    ray, session.scene, self.config.forward_only_pointing
                )
            except EngineError as exc:
                self._emit(session, t, "error", {"code": exc.code, "message": str(exc)})
                return session.events[start:]
            session.state = advance(session.state, selection)
            self._emit(session, t, "selection", selection.to_dict())
            return session.events[start:]

    def _run_plan(self, session: Session, t: float) -> None:
        intention = fuse(session.state)
        self._emit(session, t, "intention", {"tuple": intention.render()})
        try:
            outcome = plan_with_feedback(
                self.planner, intention, session.scene,
                self.config.max_plan_retries, self.config,
            )
        except PlanningFailed as exc:
            payload = {"code": exc.code, "message": str(exc), "attempts": self.config.max_plan_retries + 1}
            if exc.last_result is not None:
                payload["check"] = exc.last_result.to_dict()
            self._emit(session, t, "error", payload)
            session.state = SessionState.initial()
            return
        except EngineError as exc:
            self._emit(session, t, "error", {"code": exc.code, "message": str(exc)})
            session.state = SessionState.initial()
            return
        session.plans += 1
        session.attempts_total += outcome.attempts
        self._emit(
            session, t, "plan",
            {
                "check": {**outcome.result.to_dict(), "attempts": outcome.attempts},
                "trajectory": trajectory_dump(
                    outcome.sequence, session.scene, intention, self.config
                ),
                "plan_text": outcome.sequence.to_text(),
            },
        )
        if self.store_dir:
            before = self.store_dir / session.id / f"scene_before_{session.seq}.json"
            before.write_text(json.dumps(scene_to_snapshot(session.scene), sort_keys=True))
        try:
            session.scene = execute(outcome.sequence, session.scene, outcome.result)
        except EngineError as exc:
            self._emit(session, t, "error", {"code": exc.code, "message": str(exc)})
            session.state = SessionState.initial()
            return
        self._emit(
            session, t, "executed",
            {
                "effector": [float(v) for v in session.scene.effector.pose],
                "poured": {str(k): v for k, v in sorted(session.scene.poured.items())},
            },
        )
        if self.store_dir:
            after = self.store_dir / session.id / f"scene_after_{session.seq}.json"
            after.write_text(json.dumps(scene_to_snapshot(session.scene), sort_keys=True))
        session.state = SessionState.initial()

    # -- queries

    def state_dict(self, session_id: str) -> dict:
        session = self.get(session_id)
        with session.lock:
            state = session.state
            return {
                "v": EVENT_VERSION,
                "id": session.id,
                "phase": state.phase.value,
                "partial": {
                    "a1": state.a1, "t1": state.t1, "a2": state.a2, "t2": state.t2,
                    "metric": (
                        {"kind": state.metric.kind, "value": state.metric.value}
                        if state.metric else None
                    ),
                    "pending": state.pending_verb,
                },
                "live_selection": (
                    state.live_selection.to_dict() if state.live_selection else None
                ),
                "scene": scene_to_snapshot(session.scene),
                "stats": {"plans": session.plans, "attempts": session.attempts_total},
                "seq": session.seq,
            }

    def events_after(self, session_id: str, after: int = 0) -> list[dict]:
        session = self.get(session_id)
        with session.lock:
            return [e for e in session.events if e["seq"] > after]


def rebuild_from_log(
    initial_scene: Scene,
    events: list[dict],
    config: EngineConfig,
    planner: Planner | None = None,
) -> Session:
    """Replay a persisted event log's inputs through a fresh session.

    Only input events (utterance, skeleton) are fed back; everything else is
    derived, so the rebuilt session must land in the same final state.
    """
    service = SessionService(config, planner=planner, store_dir=None)
    session = service.create_session(scene=initial_scene)
    for event in events:
        if event["type"] == "utterance":
            service.ingest_utterance(session.id, event["text"], event["t"])
        elif event["type"] == "skeleton":
            service.ingest_skeleton(session.id, event["joints"], event["t"])
    return session


# ---------------------------------------------------------------------------
# Scenario replay


@dataclass(frozen=True)
class Scenario:
    name: str
    world: WorldSpec
    events: tuple[dict, ...]
    assertions: tuple[dict, ...]

    def __post_init__(self):
        ts = [e["t"] for e in self.events]
        if ts != sorted(ts):
            raise InvalidInput("scenario event timestamps must be monotone")

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            name=data["name"],
            world=WorldSpec.from_dict(data["world"]),
            events=tuple(data["events"]),
            assertions=tuple(data["assertions"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))


def load_transcript(path: str | Path) -> tuple[dict, ...]:
    """Read a transcript replay file: JSON lines of {t, kind, payload}.

    The returned events slot straight into a :class:`Scenario` or can be fed
    to a live session.
    """
    events = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        entry = json.loads(line)
        if not {"t", "kind", "payload"} <= entry.keys():
            raise InvalidInput(f"transcript line {line_no} lacks t/kind/payload")
        if entry["kind"] not in ("utterance", "skeleton"):
            raise InvalidInput(f"transcript line {line_no}: unknown kind {entry['kind']!r}")
        events.append(entry)
    return tuple(events)


def bundled_scenario(name: str) -> Scenario:
    path = bundled_data_path("scenarios", f"{name}.json")
    if not path.exists():
        raise UnknownTarget(f"no bundled scenario {name!r}")
    return Scenario.load(path)


def bundled_canned_responses(name: str) -> list[str]:
    path = bundled_data_path("canned", f"{name}.txt")
    if not path.exists():
        raise UnknownTarget(f"no canned responses for scenario {name!r}")
    return [chunk.strip() + "\n" for chunk in path.read_text().split("\n===\n") if chunk.strip()]


def _eval_assertion(entry: dict, session: Session, intentions: list[str]) -> tuple[bool, object]:
    kind = entry["kind"]
    scene = session.scene
    if kind == "centroid_in_box":
        obj = scene.find(entry["object"])
        if obj is None:
            return False, None
        lo = np.asarray(entry["min"], dtype=float)
        hi = np.asarray(entry["max"], dtype=float)
        ok = bool(np.all(obj.centroid >= lo) and np.all(obj.centroid <= hi))
        return ok, [float(v) for v in obj.centroid]
    if kind == "poured":
        actual = scene.poured.get(entry["object"])
        tol = entry.get("tol", 1e-9)
        ok = actual is not None and abs(actual - entry["angle"]) <= tol
        return ok, actual
    if kind == "intention":
        return (entry["tuple"] in intentions), intentions
    if kind == "verdict_clear":
        verdicts = [e for e in session.events if e["type"] == "plan"]
        ok = bool(verdicts) and all(e["check"]["verdict"] == "clear" for e in verdicts)
        return ok, [e["check"]["verdict"] for e in verdicts]
    if kind == "attempts_at_most":
        return session.attempts_total <= entry["value"], session.attempts_total
    if kind == "no_intention":
        return not intentions, intentions
    raise InvalidInput(f"unknown assertion kind {kind!r}")


def replay(
    scenario: Scenario,
    config: EngineConfig | None = None,
    planner: Planner | None = None,
) -> dict:
    """Run a scenario headless and evaluate its final assertions.

    The report is deterministic except for the ``timings`` section; use
    :func:`canonical_report_json` when comparing runs.
    """
    config = config or EngineConfig()
    timings: dict[str, float] = {}
    started = time.perf_counter()
    service = SessionService(config, planner=planner, store_dir=None)
    session = service.create_session(world=scenario.world)
    timings["perception_s"] = time.perf_counter() - started

    stage = time.perf_counter()
    for event in scenario.events:
        if event["kind"] == "utterance":
            service.ingest_utterance(session.id, event["payload"]["text"], event["t"])
        elif event["kind"] == "skeleton":
            service.ingest_skeleton(session.id, event["payload"]["joints"], event["t"])
        else:
            raise InvalidInput(f"unknown scenario event kind {event['kind']!r}")
    timings["session_s"] = time.perf_counter() - stage

    intentions = [e["tuple"] for e in session.events if e["type"] == "intention"]
    results = []
    for entry in scenario.assertions:
        ok, actual = _eval_assertion(entry, session, intentions)
        results.append({**entry, "passed": ok, "actual": actual})
    if not intentions and not any(a["kind"] == "no_intention" for a in scenario.assertions):
        results.append({"kind": "intention_formed", "passed": False, "actual": "no intention formed"})
    timings["total_s"] = time.perf_counter() - started

    errors = [e for e in session.events if e["type"] == "error"]
    return {
        "scenario": scenario.name,
        "passed": all(r["passed"] for r in results),
        "assertions": results,
        "intentions": intentions,
        "plans": session.plans,
        "attempts": session.attempts_total,
        "errors": [{"code": e["code"], "message": e["message"]} for e in errors],
        "event_count": len(session.events),
        "final_scene": scene_to_snapshot(session.scene),
        "timings": timings,
    }


def canonical_report_json(report: dict) -> str:
    """Deterministic serialization: the timing section is dropped."""
    trimmed = {k: v for k, v in report.items() if k != "timings"}
    return json.dumps(trimmed, sort_keys=True)
