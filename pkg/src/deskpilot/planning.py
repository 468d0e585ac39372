"""Action sequence generation and validation.

Plans are ordered primitives with chained waypoints. The wire form is a
line-oriented DSL (one upper-case token per line, numeric arguments); the
parser rejects anything outside that grammar, which is what keeps free-text
planner output from reaching the robot:

    plan      ::= line+
    line      ::= moveto | pick | place | pour | home | drop | grip
    moveto    ::= "MOVETO" num num num
    pick      ::= "PICK" int
    place     ::= "PLACE" int | "PLACE" num num num
    pour      ::= "POUR" num int          ; angle in degrees, then target
    home      ::= "HOME"
    drop      ::= "DROP"
    grip      ::= ("OPENGRIPPER" | "CLOSEGRIPPER") num

Two planner backends satisfy the same interface: a deterministic
lift-translate-lower planner, and an external chat-completion service whose
responses pass through the DSL gate. A canned-response client stands in for
the service offline.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx
import numpy as np

from .config import EngineConfig, PlannerConfig, bundled_data_path
from .errors import (
    EmptyPlan,
    InvalidArgument,
    InvalidInput,
    InvalidToken,
    PlannerUnavailable,
    Ungraspable,
    UnknownTarget,
)
from .grammar import Intention
from .scene import Scene, StructuralObject

CHAIN_TOL = 1e-6

IDENTITY_QUAT = (0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Pose:
    """Tool pose: position plus orientation quaternion (xyzw)."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float] = IDENTITY_QUAT

    def __post_init__(self):
        # plain floats keep repr-based serialization round-trippable
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "orientation", tuple(float(v) for v in self.orientation))

    @classmethod
    def from_array(cls, pose7) -> "Pose":
        pose7 = np.asarray(pose7, dtype=float)
        return cls(tuple(pose7[:3]), tuple(pose7[3:7]))

    def at(self, position) -> "Pose":
        return Pose(tuple(float(v) for v in position), self.orientation)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class MoveTo:
    target: Pose


@dataclass(frozen=True)
class Pick:
    index: int


@dataclass(frozen=True)
class Place:
    index: int | None = None
    position: tuple[float, float, float] | None = None

    def __post_init__(self):
        if (self.index is None) == (self.position is None):
            raise InvalidInput("Place takes either an object index or a position")


@dataclass(frozen=True)
class Pour:
    angle_deg: float
    over_index: int

    def __post_init__(self):
        if not 0.0 <= self.angle_deg <= 180.0:
            raise InvalidInput("pour angle must lie in [0, 180] degrees")


@dataclass(frozen=True)
class Home:
    pass


@dataclass(frozen=True)
class Drop:
    pass


@dataclass(frozen=True)
class OpenGripper:
    width: float

    def __post_init__(self):
        if self.width < 0:
            raise InvalidInput("gripper width must be >= 0")


@dataclass(frozen=True)
class CloseGripper:
    width: float

    def __post_init__(self):
        if self.width < 0:
            raise InvalidInput("gripper width must be >= 0")


ActionPrimitive = MoveTo | Pick | Place | Pour | Home | Drop | OpenGripper | CloseGripper


@dataclass(frozen=True)
class PlanStep:
    """One primitive with its start/end effector poses.

    ``attached`` marks segments flown while holding an object; ``rotating``
    marks in-place wrist rotations (pour), which the safety check treats
    conservatively.
    """

    primitive: ActionPrimitive
    start: Pose
    end: Pose
    attached: bool = False
    rotating: bool = False


@dataclass
class ActionSequence:
    steps: list[PlanStep]

    def __post_init__(self):
        if not self.steps:
            raise EmptyPlan("an action sequence must contain at least one step")
        for prev, nxt in zip(self.steps, self.steps[1:]):
            gap = np.linalg.norm(np.asarray(prev.end.position) - np.asarray(nxt.start.position))
            if gap > CHAIN_TOL:
                raise InvalidInput(f"steps do not chain: gap of {gap:.3g} m")

    def __len__(self) -> int:
        return len(self.steps)

    def to_text(self) -> str:
        return "\n".join(_primitive_to_line(s.primitive) for s in self.steps) + "\n"

    def digest(self) -> str:
        payload = [self.to_text()]
        for step in self.steps:
            payload.append(
                f"{step.start.position!r}{step.start.orientation!r}"
                f"{step.end.position!r}{step.end.orientation!r}{step.attached}{step.rotating}"
            )
        return hashlib.sha256("|".join(payload).encode()).hexdigest()


def _primitive_to_line(prim: ActionPrimitive) -> str:
    if isinstance(prim, MoveTo):
        x, y, z = prim.target.position
        return f"MOVETO {x!r} {y!r} {z!r}"
    if isinstance(prim, Pick):
        return f"PICK {prim.index}"
    if isinstance(prim, Place):
        if prim.index is not None:
            return f"PLACE {prim.index}"
        x, y, z = prim.position
        return f"PLACE {x!r} {y!r} {z!r}"
    if isinstance(prim, Pour):
        return f"POUR {prim.angle_deg!r} {prim.over_index}"
    if isinstance(prim, Home):
        return "HOME"
    if isinstance(prim, Drop):
        return "DROP"
    if isinstance(prim, OpenGripper):
        return f"OPENGRIPPER {prim.width!r}"
    if isinstance(prim, CloseGripper):
        return f"CLOSEGRIPPER {prim.width!r}"
    raise InvalidInput(f"unserializable primitive {prim!r}")


_INT_RE = re.compile(r"^\d+$")


def _parse_float(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InvalidArgument(f"line {line_no}: {token!r} is not a number", line_no) from None
    if not np.isfinite(value):
        raise InvalidArgument(f"line {line_no}: non-finite number {token!r}", line_no)
    return value


def _parse_int(token: str, line_no: int) -> int:
    if not _INT_RE.match(token):
        raise InvalidArgument(f"line {line_no}: {token!r} is not an object index", line_no)
    return int(token)


def parse_plan_response(
    text: str,
    start_pose: Pose | None = None,
    home_pose: Pose | None = None,
) -> ActionSequence:
    """Validate planner output against the DSL and build the sequence.

    Unknown tokens, malformed numbers and empty plans are rejected; prose
    never gets through. MOVETO advances the waypoint cursor, HOME jumps it
    to the home pose, every other primitive acts in place.
    """
    cursor = start_pose or Pose((0.0, 0.0, 0.0))
    home = home_pose or Pose((0.0, 0.0, 0.0))
    steps: list[PlanStep] = []
    attached = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        op, args = tokens[0], tokens[1:]
        if op == "MOVETO":
            if len(args) != 3:
                raise InvalidArgument(f"line {line_no}: MOVETO takes x y z", line_no)
            target = cursor.at([_parse_float(a, line_no) for a in args])
            steps.append(PlanStep(MoveTo(target), cursor, target, attached=attached))
            cursor = target
        elif op == "PICK":
            if len(args) != 1:
                raise InvalidArgument(f"line {line_no}: PICK takes one index", line_no)
            steps.append(PlanStep(Pick(_parse_int(args[0], line_no)), cursor, cursor))
            attached = True
        elif op == "PLACE":
            if len(args) == 1:
                prim = Place(index=_parse_int(args[0], line_no))
            elif len(args) == 3:
                prim = Place(position=tuple(_parse_float(a, line_no) for a in args))
            else:
                raise InvalidArgument(f"line {line_no}: PLACE takes an index or x y z", line_no)
            steps.append(PlanStep(prim, cursor, cursor, attached=attached))
            attached = False
        elif op == "POUR":
            if len(args) != 2:
                raise InvalidArgument(f"line {line_no}: POUR takes angle and index", line_no)
            angle = _parse_float(args[0], line_no)
            if not 0.0 <= angle <= 180.0:
                raise InvalidArgument(f"line {line_no}: pour angle out of [0, 180]", line_no)
            prim = Pour(angle, _parse_int(args[1], line_no))
            steps.append(PlanStep(prim, cursor, cursor, attached=attached, rotating=True))
        elif op == "HOME":
            if args:
                raise InvalidArgument(f"line {line_no}: HOME takes no arguments", line_no)
            steps.append(PlanStep(Home(), cursor, home, attached=attached))
            cursor = home
        elif op == "DROP":
            if args:
                raise InvalidArgument(f"line {line_no}: DROP takes no arguments", line_no)
            steps.append(PlanStep(Drop(), cursor, cursor, attached=attached))
            attached = False
        elif op in ("OPENGRIPPER", "CLOSEGRIPPER"):
            if len(args) != 1:
                raise InvalidArgument(f"line {line_no}: {op} takes a width", line_no)
            width = _parse_float(args[0], line_no)
            cls = OpenGripper if op == "OPENGRIPPER" else CloseGripper
            steps.append(PlanStep(cls(width), cursor, cursor, attached=attached))
            if op == "OPENGRIPPER":
                attached = False
        else:
            raise InvalidToken(f"line {line_no}: unknown action token {op!r}", line_no)
    if not steps:
        raise EmptyPlan("planner returned no action lines")
    return ActionSequence(steps)


def sequences_equal(a: ActionSequence, b: ActionSequence) -> bool:
    if len(a) != len(b):
        return False
    return all(
        sa.primitive == sb.primitive
        and sa.start == sb.start
        and sa.end == sb.end
        and sa.attached == sb.attached
        and sa.rotating == sb.rotating
        for sa, sb in zip(a.steps, b.steps)
    )


# ---------------------------------------------------------------------------
# Prompt assembly


@dataclass(frozen=True)
class PromptBundle:
    action_constraints: str
    trajectory_constraints: str
    example_tasks: str
    scene_digest: str

    def __post_init__(self):
        for name in ("action_constraints", "trajectory_constraints", "example_tasks"):
            if not getattr(self, name).strip():
                raise InvalidInput(f"prompt section {name} is empty")

    def text(self) -> str:
        return "\n".join(
            [
                "## ACTION CONSTRAINTS",
                self.action_constraints,
                "## TRAJECTORY CONSTRAINTS",
                self.trajectory_constraints,
                "## EXAMPLE TASKS",
                self.example_tasks,
                "## SCENE",
                self.scene_digest,
            ]
        )


_ACTION_CONSTRAINTS = """\
Respond with one action token per line and nothing else. Allowed tokens:
MOVETO x y z | PICK i | PLACE i | PLACE x y z | POUR angle i | HOME | DROP |
OPENGRIPPER w | CLOSEGRIPPER w
Numbers are plain decimals; i is an object index from the scene listing.
No prose, no comments, no blank tokens."""

_TRAJECTORY_CONSTRAINTS = """\
Units: meters for positions and widths, degrees for angles.
Axes: x right, y forward, z up; the desk surface is z = 0.
Carry manipulated objects across obstacles from above: travel at a height
clearing every obstacle top plus half the carried object plus {clearance} m.
Move vertically when approaching or leaving a grasp or placement."""


def build_prompt(
    scene: Scene,
    intention: Intention,
    clearance: float = 0.05,
    template_path: str | Path | None = None,
) -> PromptBundle:
    """Deterministic three-section prompt plus the scene digest."""
    template = Path(template_path) if template_path else bundled_data_path("example_tasks.txt")
    lines = []
    for obj in sorted(scene.all_objects(), key=lambda o: o.index):
        kind = "interactable" if scene.is_interactable(obj.index) else "obstacle"
        lines.append(
            "OBJECT %d %s w=%.6f h=%.6f d=%.6f centroid=(%.6f, %.6f, %.6f)"
            % (obj.index, kind, obj.width, obj.height, obj.thickness, *obj.centroid)
        )
    pose = scene.effector.pose
    lines.append(
        "EFFECTOR position=(%.6f, %.6f, %.6f) opening=%.6f gripper_max=%.6f"
        % (pose[0], pose[1], pose[2], scene.effector.gripper_opening, scene.gripper_max_width)
    )
    lines.append(f"INTENTION {intention.render()}")
    return PromptBundle(
        action_constraints=_ACTION_CONSTRAINTS,
        trajectory_constraints=_TRAJECTORY_CONSTRAINTS.format(clearance=f"{clearance:.3f}"),
        example_tasks=template.read_text(),
        scene_digest="\n".join(lines),
    )


# ---------------------------------------------------------------------------
# Planner interface and implementations


@dataclass(frozen=True)
class PlannerFeedback:
    """Check verdict routed back into the next planning attempt."""

    verdict: str  # ok | collision
    location: tuple[float, float, float] | None = None
    step: int | None = None

    def __post_init__(self):
        if self.verdict not in ("ok", "collision"):
            raise InvalidInput(f"unknown feedback verdict {self.verdict!r}")
        if (self.verdict == "collision") != (self.location is not None):
            raise InvalidInput("collision feedback must carry a location")

    def render(self) -> str:
        if self.verdict == "ok":
            return "previous trajectory passed the cross-check"
        x, y, z = self.location
        return (
            f"collision at ({x:.4f}, {y:.4f}, {z:.4f}) during step {self.step}; "
            "generate a new trajectory that avoids it"
        )


class Planner(Protocol):
    def plan(
        self, intention: Intention, scene: Scene, feedback: PlannerFeedback | None = None
    ) -> ActionSequence: ...


DEFAULT_POUR_ANGLE = 90.0


class DeterministicPlanner:
    """Lift-translate-lower planner.

    Transport height clears every non-target object top by half the carried
    box (or the empty gripper) plus the configured clearance, so sequences
    pass the swept-volume check by construction on scenes whose grasp and
    placement verticals are free.
    """

    def __init__(self, config: EngineConfig):
        self.config = config

    def plan(
        self, intention: Intention, scene: Scene, feedback: PlannerFeedback | None = None
    ) -> ActionSequence:
        del feedback  # pure function of scene and intention; replans are identical
        cfg = self.config
        start = Pose.from_array(scene.effector.pose)
        if intention.a1 == "pick":
            return self._plan_pick(intention, scene, start)
        if intention.t1 is not None:
            return self._plan_lone_targeted(intention, scene, start)
        return self._plan_simple(intention.a1, start)

    # -- helpers

    def _up(self) -> int:
        return self.config.up_axis

    def _object_top(self, obj: StructuralObject) -> float:
        up = self._up()
        return float(obj.centroid[up] + obj.extents_vector(self.config.axis_convention)[up] / 2)

    def _half_up(self, obj: StructuralObject | None) -> float:
        if obj is None:
            return float(self.config.gripper_box_half()[self._up()])
        up = self._up()
        half = obj.extents_vector(self.config.axis_convention)[up] / 2
        return float(max(half, self.config.gripper_box_half()[self._up()]))

    def _transport_height(
        self, scene: Scene, exclude: set[int], carried: StructuralObject | None, floors: list[float]
    ) -> float:
        tops = [
            self._object_top(obj)
            for obj in scene.all_objects()
            if obj.index not in exclude
        ]
        height = max(tops, default=0.0) + self._half_up(carried) + self.config.clearance
        # grasp and deposit heights bound the transport from below so lifts
        # ascend and lowers descend; they need no extra clearance
        for floor in floors:
            height = max(height, floor)
        return max(height, self.config.default_transport_height)

    def _resolve(self, scene: Scene, index: int | None, *, graspable: bool) -> StructuralObject:
        if index is None:
            raise UnknownTarget("intention lacks a target index")
        obj = scene.find(index)
        if obj is None:
            raise UnknownTarget(f"object {index} is not in the scene")
        if graspable and obj.width > scene.gripper_max_width:
            raise Ungraspable(
                f"object {index} is {obj.width:.3f} m wide; gripper max is "
                f"{scene.gripper_max_width:.3f} m"
            )
        return obj

    def _plan_simple(self, verb: str, start: Pose) -> ActionSequence:
        cfg = self.config
        if verb == "home":
            home = Pose.from_array(cfg.home_pose)
            return ActionSequence([PlanStep(Home(), start, home)])
        if verb == "move":
            target = Pose.from_array(cfg.ready_pose)
            return ActionSequence([PlanStep(MoveTo(target), start, target)])
        if verb == "drop":
            return ActionSequence([PlanStep(Drop(), start, start)])
        if verb == "throw":
            target = Pose.from_array(cfg.throw_pose)
            return ActionSequence(
                [
                    PlanStep(MoveTo(target), start, target),
                    PlanStep(Drop(), target, target),
                ]
            )
        if verb == "give":
            target = Pose.from_array(cfg.handover_pose)
            return ActionSequence(
                [
                    PlanStep(MoveTo(target), start, target),
                    PlanStep(OpenGripper(self.config.gripper_max_width), target, target),
                ]
            )
        raise UnknownTarget(f"no deterministic plan for verb {verb!r}")

    def _plan_lone_targeted(
        self, intention: Intention, scene: Scene, start: Pose
    ) -> ActionSequence:
        """place/put/pour as a first action: travel above the target and act."""
        target = self._resolve(scene, intention.t1, graspable=False)
        up = self._up()
        transport = self._transport_height(scene, {target.index}, None, [self._object_top(target)])
        steps: list[PlanStep] = []
        cursor = start
        for position in (
            _lifted(start.array, transport, up),
            _over(target.centroid, transport, up),
        ):
            nxt = cursor.at(position)
            steps.append(PlanStep(MoveTo(nxt), cursor, nxt))
            cursor = nxt
        hover = cursor.at(_over(target.centroid, self._object_top(target) + self.config.pour_clearance, up))
        steps.append(PlanStep(MoveTo(hover), cursor, hover))
        cursor = hover
        if intention.a1 == "pour":
            angle = intention.metric.value if intention.metric else DEFAULT_POUR_ANGLE
            steps.append(PlanStep(Pour(angle, target.index), cursor, cursor, rotating=True))
        else:
            steps.append(PlanStep(Place(index=target.index), cursor, cursor))
        return ActionSequence(steps)

    def _plan_pick(self, intention: Intention, scene: Scene, start: Pose) -> ActionSequence:
        cfg = self.config
        up = self._up()
        source = self._resolve(scene, intention.t1, graspable=True)
        exclude = {source.index}
        dest: StructuralObject | None = None
        if intention.a2 in ("place", "put", "pour"):
            dest = self._resolve(scene, intention.t2, graspable=False)
            exclude.add(dest.index)

        grasp_z = float(source.centroid[up])
        floors = [grasp_z]
        deposit_z = None
        if dest is not None:
            if intention.a2 == "pour":
                deposit_z = self._object_top(dest) + self._half_up(source) + cfg.pour_clearance
            else:
                deposit_z = self._object_top(dest) + self._half_up(source)
            floors.append(deposit_z)
        transport = self._transport_height(scene, exclude, source, floors)

        steps: list[PlanStep] = []
        cursor = start

        def move(position, attached: bool):
            nonlocal cursor
            nxt = cursor.at(position)
            steps.append(PlanStep(MoveTo(nxt), cursor, nxt, attached=attached))
            cursor = nxt

        move(_lifted(start.array, transport, up), attached=False)      # rise
        move(_over(source.centroid, transport, up), attached=False)    # approach
        move(_over(source.centroid, grasp_z, up), attached=False)      # descend
        steps.append(PlanStep(Pick(source.index), cursor, cursor))     # grasp
        move(_over(source.centroid, transport, up), attached=True)     # lift

        a2 = intention.a2
        if a2 is None:
            return ActionSequence(steps)
        if dest is not None:
            move(_over(dest.centroid, transport, up), attached=True)   # translate
            move(_over(dest.centroid, deposit_z, up), attached=True)   # lower
            if a2 == "pour":
                angle = intention.metric.value if intention.metric else DEFAULT_POUR_ANGLE
                steps.append(
                    PlanStep(Pour(angle, dest.index), cursor, cursor, attached=True, rotating=True)
                )
                move(_over(dest.centroid, transport, up), attached=True)  # retreat holding
            else:
                steps.append(PlanStep(Place(index=dest.index), cursor, cursor, attached=True))
                move(_over(dest.centroid, transport, up), attached=False)  # retreat
            return ActionSequence(steps)
        if a2 == "home":
            home = Pose.from_array(cfg.home_pose)
            steps.append(PlanStep(Home(), cursor, home, attached=True))
            return ActionSequence(steps)
        if a2 == "drop":
            steps.append(PlanStep(Drop(), cursor, cursor, attached=True))
            return ActionSequence(steps)
        if a2 == "throw":
            move(_lifted(np.asarray(cfg.throw_pose[:3]), transport, up), attached=True)
            steps.append(PlanStep(Drop(), cursor, cursor, attached=True))
            return ActionSequence(steps)
        if a2 == "give":
            move(_lifted(np.asarray(cfg.handover_pose[:3]), transport, up), attached=True)
            steps.append(
                PlanStep(OpenGripper(cfg.gripper_max_width), cursor, cursor, attached=True)
            )
            return ActionSequence(steps)
        if a2 == "move":
            move(_lifted(np.asarray(cfg.ready_pose[:3]), transport, up), attached=True)
            return ActionSequence(steps)
        raise UnknownTarget(f"no deterministic plan for second action {a2!r}")


def _over(centroid: np.ndarray, height: float, up: int) -> np.ndarray:
    position = np.asarray(centroid, dtype=float).copy()
    position[up] = height
    return position


def _lifted(position: np.ndarray, height: float, up: int) -> np.ndarray:
    lifted = np.asarray(position, dtype=float).copy()
    lifted[up] = height
    return lifted


# ---------------------------------------------------------------------------
# External planner


class ChatClient(Protocol):
    def complete(self, messages: list[dict]) -> str: ...


class HttpChatClient:
    """Provider-agnostic chat-completion client (temperature pinned to 0)."""

    def __init__(self, config: PlannerConfig, client: httpx.Client | None = None):
        if not config.endpoint:
            raise PlannerUnavailable("no chat-completion endpoint configured")
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)

    def complete(self, messages: list[dict]) -> str:
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        body = {"model": self.config.model, "messages": messages, "temperature": 0}
        last_exc: Exception | None = None
        for _ in range(self.config.transport_retries + 1):
            try:
                response = self._client.post(self.config.endpoint, json=body, headers=headers)
                response.raise_for_status()
                data = response.json()
                return data["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_exc = exc
        raise PlannerUnavailable(f"chat completion failed: {last_exc}")


class CannedChatClient:
    """Offline stand-in: replays scripted responses in order.

    The final response repeats once the script is exhausted. Prompts are
    recorded for inspection.
    """

    def __init__(self, responses: list[str]):
        if not responses:
            raise InvalidInput("canned client needs at least one response")
        self.responses = list(responses)
        self.prompts: list[str] = []
        self._cursor = 0

    def complete(self, messages: list[dict]) -> str:
        self.prompts.append(messages[-1]["content"])
        response = self.responses[min(self._cursor, len(self.responses) - 1)]
        self._cursor += 1
        return response


class ExternalPlanner:
    """Prompts a chat-completion service and gates its output via the DSL."""

    def __init__(self, client: ChatClient, config: EngineConfig):
        self.client = client
        self.config = config

    def plan(
        self, intention: Intention, scene: Scene, feedback: PlannerFeedback | None = None
    ) -> ActionSequence:
        bundle = build_prompt(scene, intention, clearance=self.config.clearance)
        content = bundle.text()
        if feedback is not None:
            content += "\n## FEEDBACK\n" + feedback.render()
        text = self.client.complete([{"role": "user", "content": content}])
        return parse_plan_response(
            text,
            start_pose=Pose.from_array(scene.effector.pose),
            home_pose=Pose.from_array(self.config.home_pose),
        )


class FaultInjectedPlanner:
    """Wraps a planner and, with probability ``q``, plans obstacle-blind.

    Test machinery for the closed-loop properties: a blind attempt sees the
    scene with its obstacle list emptied, so tall obstacles go unnoticed.
    """

    def __init__(self, inner: Planner, q: float, rng: np.random.Generator):
        if not 0.0 <= q <= 1.0:
            raise InvalidInput("fault probability must lie in [0, 1]")
        self.inner = inner
        self.q = q
        self.rng = rng

    def plan(
        self, intention: Intention, scene: Scene, feedback: PlannerFeedback | None = None
    ) -> ActionSequence:
        if self.rng.random() < self.q:
            blind = Scene(
                list(scene.interactable), [], scene.effector,
                scene.gripper_max_width, dict(scene.poured),
            )
            return self.inner.plan(intention, blind, feedback)
        return self.inner.plan(intention, scene, feedback)
