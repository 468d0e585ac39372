"""Text command grammar and the interaction session state machine.

Utterances are classified by keyword spotting over a declared phrase table
(a JSON file, reloadable at runtime): action verbs, approval words, metric
patterns (a number followed by a unit) and the finish word. The first
matching rule in declared priority order wins, so parsing is deterministic.

A session walks: action command -> (pointing + approval to latch the
target) -> optional second action -> optional metric -> finish. At most two
actions combine into one intention tuple
(action1, target1, action2, target2, metric).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .config import bundled_data_path
from .deixis import TargetSelection
from .errors import (
    IncompleteIntention,
    InvalidInput,
    ProtocolViolation,
    TooManyActions,
    UnrecognizedUtterance,
)

# verb -> whether the verb needs a pointed-at target object
ACTION_VOCABULARY = {
    "home": False,
    "drop": False,
    "move": False,
    "throw": False,
    "give": False,
    "pick": True,
    "place": True,
    "put": True,
    "pour": True,
}

METRIC_KINDS = ("angle", "velocity")


@dataclass(frozen=True)
class VerbalUtterance:
    text: str
    timestamp: float = 0.0
    speaker: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise InvalidInput("utterance text is empty")


@dataclass(frozen=True)
class ActionCommand:
    verb: str
    requires_target: bool

    def __post_init__(self):
        if self.verb not in ACTION_VOCABULARY:
            raise InvalidInput(f"verb {self.verb!r} is not in the action vocabulary")


@dataclass(frozen=True)
class ApprovalCommand:
    pass


@dataclass(frozen=True)
class MetricCommand:
    kind: str
    value: float
    unit: str

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise InvalidInput(f"unknown metric kind {self.kind!r}")


@dataclass(frozen=True)
class FinishCommand:
    pass


Command = ActionCommand | ApprovalCommand | MetricCommand | FinishCommand


@dataclass(frozen=True)
class Intention:
    """Fused command tuple; at most two actions and one optional metric."""

    a1: str
    t1: int | None = None
    a2: str | None = None
    t2: int | None = None
    metric: MetricCommand | None = None

    def __post_init__(self):
        if ACTION_VOCABULARY[self.a1] and self.t1 is None:
            raise InvalidInput(f"action {self.a1!r} requires a target")
        if self.a2 is None and self.t2 is not None:
            raise InvalidInput("second target without a second action")
        if self.a2 is not None and ACTION_VOCABULARY[self.a2] and self.t2 is None:
            raise InvalidInput(f"action {self.a2!r} requires a target")

    def as_tuple(self) -> tuple:
        metric = None
        if self.metric is not None:
            metric = (self.metric.kind, self.metric.value)
        return (self.a1, self.t1, self.a2, self.t2, metric)

    def render(self) -> str:
        dash = "−"
        parts = [
            self.a1,
            str(self.t1) if self.t1 is not None else dash,
            self.a2 if self.a2 is not None else dash,
            str(self.t2) if self.t2 is not None else dash,
            f"{self.metric.kind}={self.metric.value:g}" if self.metric else dash,
        ]
        return "(" + ", ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Phrase table


_NUMBER_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
    "thirteen": 13, "fourteen": 14, "fifteen": 15, "sixteen": 16, "seventeen": 17,
    "eighteen": 18, "nineteen": 19,
}
_NUMBER_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_FLOAT_RE = re.compile(r"^\d+(?:\.\d+)?$")


def words_to_number(words: list[str]) -> float | None:
    """Parse English number words ("ninety", "one hundred twenty")."""
    total = 0.0
    current = 0.0
    seen = False
    for word in words:
        if word in _NUMBER_UNITS:
            current += _NUMBER_UNITS[word]
        elif word in _NUMBER_TENS:
            current += _NUMBER_TENS[word]
        elif word == "hundred":
            current = (current or 1) * 100
        elif word == "and":
            continue
        else:
            return None
        seen = True
    return total + current if seen else None


def _trailing_number(tokens: list[str]) -> float | None:
    """Numeric value spelled by the trailing tokens, digits or words."""
    if not tokens:
        return None
    if _FLOAT_RE.match(tokens[-1]):
        return float(tokens[-1])
    collected: list[str] = []
    for token in reversed(tokens):
        if token in _NUMBER_UNITS or token in _NUMBER_TENS or token in ("hundred", "and"):
            collected.insert(0, token)
        else:
            break
    return words_to_number(collected) if collected else None


class PhraseTable:
    """Ordered keyword-spotting rules loaded from JSON.

    Match priority: metric patterns, then action phrases in file order, then
    approval words, then finish words.
    """

    def __init__(self, data: dict, path: Path | None = None):
        self.metrics = [
            (rule["kind"], list(rule["units"])) for rule in data.get("metrics", [])
        ]
        self.actions = [(rule["phrase"], rule["verb"]) for rule in data.get("actions", [])]
        self.approval = list(data.get("approval", []))
        self.finish = list(data.get("finish", []))
        for _, verb in self.actions:
            if verb not in ACTION_VOCABULARY:
                raise InvalidInput(f"phrase table maps to unknown verb {verb!r}")
        self._path = path
        self._mtime = path.stat().st_mtime if path else None

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "PhraseTable":
        path = Path(path) if path else bundled_data_path("phrase_table.json")
        return cls(json.loads(path.read_text()), path=path)

    def maybe_reload(self) -> "PhraseTable":
        """Fresh table if the backing file changed on disk, else self."""
        if self._path is None:
            return self
        mtime = self._path.stat().st_mtime
        if mtime != self._mtime:
            return PhraseTable.from_file(self._path)
        return self

    @staticmethod
    def _normalize(text: str) -> str:
        text = text.lower().replace("-", " ")
        text = re.sub(r"[^a-z0-9./ ]+", " ", text)
        return re.sub(r"\s+", " ", text).strip()

    @staticmethod
    def _contains_phrase(text: str, phrase: str) -> bool:
        pattern = r"(?<![a-z0-9])" + re.escape(phrase) + r"(?![a-z0-9])"
        return re.search(pattern, text) is not None

    def match(self, text: str) -> Command:
        normalized = self._normalize(text)
        tokens = normalized.split()
        for kind, units in self.metrics:
            for unit in units:
                unit_tokens = unit.split()
                for pos in range(len(tokens) - len(unit_tokens) + 1):
                    if tokens[pos : pos + len(unit_tokens)] == unit_tokens:
                        value = _trailing_number(tokens[:pos])
                        if value is not None:
                            return MetricCommand(kind, value, unit)
        for phrase, verb in self.actions:
            if self._contains_phrase(normalized, phrase):
                return ActionCommand(verb, ACTION_VOCABULARY[verb])
        for phrase in self.approval:
            if self._contains_phrase(normalized, phrase):
                return ApprovalCommand()
        for phrase in self.finish:
            if self._contains_phrase(normalized, phrase):
                return FinishCommand()
        raise UnrecognizedUtterance(f"no rule matches {text!r}")

    def canonical_phrase(self, verb: str) -> str:
        for phrase, v in self.actions:
            if v == verb:
                return phrase
        raise InvalidInput(f"no phrase maps to verb {verb!r}")


def parse_utterance(utterance: VerbalUtterance, table: PhraseTable) -> Command:
    return table.match(utterance.text)


# ---------------------------------------------------------------------------
# Session state machine


class Phase(str, Enum):
    IDLE = "idle"
    AWAITING_TARGET = "awaiting_target"
    TARGET_LATCHED = "target_latched"
    AWAITING_SECOND = "awaiting_second"
    COMPLETE = "complete"


@dataclass(frozen=True)
class SessionState:
    """Immutable FSM state; every transition goes through :func:`advance`."""

    phase: Phase = Phase.IDLE
    a1: str | None = None
    t1: int | None = None
    a2: str | None = None
    t2: int | None = None
    metric: MetricCommand | None = None
    pending_verb: str | None = None
    live_selection: TargetSelection | None = None

    @classmethod
    def initial(cls) -> "SessionState":
        return cls()


Event = Command | TargetSelection


def advance(state: SessionState, event: Event) -> SessionState:
    """Apply one event; raises and leaves the state unchanged when illegal."""
    if isinstance(event, TargetSelection):
        # live pointing feedback; latched only by an approval command
        return replace(state, live_selection=event)

    if isinstance(event, MetricCommand):
        if state.phase is Phase.COMPLETE:
            raise ProtocolViolation("intention already complete")
        return replace(state, metric=event)

    if isinstance(event, ActionCommand):
        if state.phase is Phase.IDLE:
            if event.requires_target:
                return replace(state, phase=Phase.AWAITING_TARGET, pending_verb=event.verb)
            return replace(state, phase=Phase.TARGET_LATCHED, a1=event.verb)
        if state.phase is Phase.TARGET_LATCHED:
            if event.requires_target:
                return replace(state, phase=Phase.AWAITING_TARGET, pending_verb=event.verb)
            return replace(state, phase=Phase.AWAITING_SECOND, a2=event.verb)
        if state.phase is Phase.AWAITING_SECOND:
            raise TooManyActions("an intention holds at most two actions")
        if state.phase is Phase.AWAITING_TARGET:
            raise ProtocolViolation(f"action {state.pending_verb!r} awaits target approval")
        raise ProtocolViolation("intention already complete")

    if isinstance(event, ApprovalCommand):
        if state.phase is not Phase.AWAITING_TARGET:
            raise ProtocolViolation("approval arrived with no pending action")
        if state.live_selection is None:
            raise ProtocolViolation("approval arrived with no pointing target latched")
        target = state.live_selection.index
        if state.a1 is None:
            return replace(
                state, phase=Phase.TARGET_LATCHED,
                a1=state.pending_verb, t1=target, pending_verb=None,
            )
        return replace(
            state, phase=Phase.AWAITING_SECOND,
            a2=state.pending_verb, t2=target, pending_verb=None,
        )

    if isinstance(event, FinishCommand):
        if state.phase in (Phase.TARGET_LATCHED, Phase.AWAITING_SECOND):
            return replace(state, phase=Phase.COMPLETE)
        raise IncompleteIntention(f"cannot finish from phase {state.phase.value}")

    raise InvalidInput(f"unknown event type {type(event).__name__}")


def fuse(state: SessionState) -> Intention:
    """Emit the intention tuple from a completed session."""
    if state.phase is not Phase.COMPLETE:
        raise IncompleteIntention("session is not complete")
    return Intention(state.a1, state.t1, state.a2, state.t2, state.metric)


def render_intention_script(
    intention: Intention, table: PhraseTable
) -> list[VerbalUtterance | TargetSelection]:
    """Canonical event script that re-parses back to the same intention."""

    def selection(index: int) -> TargetSelection:
        return TargetSelection(index, 0.0, ((index, 0.0),))

    events: list[VerbalUtterance | TargetSelection] = []
    t = 0.0

    def utter(text: str):
        nonlocal t
        t += 1.0
        events.append(VerbalUtterance(text, timestamp=t))

    utter(table.canonical_phrase(intention.a1))
    if intention.t1 is not None:
        events.append(selection(intention.t1))
        utter(table.approval[0])
    if intention.a2 is not None:
        utter(table.canonical_phrase(intention.a2))
        if intention.t2 is not None:
            events.append(selection(intention.t2))
            utter(table.approval[0])
    if intention.metric is not None:
        utter(f"{intention.metric.value:g} {intention.metric.unit}")
    utter(table.finish[0])
    return events
