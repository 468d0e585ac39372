"""Exception hierarchy shared by all deskpilot modules."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for every error raised by this package."""

    code = "EngineError"

    def __str__(self) -> str:  # keep the code visible in user-facing messages
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class InvalidInput(EngineError):
    code = "InvalidInput"


class EmptyCluster(EngineError):
    code = "EmptyCluster"


class ProtocolError(EngineError):
    """Malformed wire payload from an external service."""

    code = "ProtocolError"


class MissingJoint(EngineError):
    code = "MissingJoint"


class DegenerateRay(EngineError):
    code = "DegenerateRay"


class NoCandidates(EngineError):
    code = "NoCandidates"


class UnrecognizedUtterance(EngineError):
    code = "UnrecognizedUtterance"


class ProtocolViolation(EngineError):
    """Command arrived in a session phase where it is not legal."""

    code = "ProtocolViolation"


class IncompleteIntention(EngineError):
    code = "IncompleteIntention"


class TooManyActions(EngineError):
    code = "TooManyActions"


class UnknownTarget(EngineError):
    code = "UnknownTarget"


class Ungraspable(EngineError):
    code = "Ungraspable"


class PlannerUnavailable(EngineError):
    code = "PlannerUnavailable"


class InvalidToken(EngineError):
    """Plan response contains an action token outside the vocabulary."""

    code = "InvalidToken"

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


class InvalidArgument(EngineError):
    """Plan response token has a malformed or missing argument."""

    code = "InvalidArgument"

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


class EmptyPlan(EngineError):
    code = "EmptyPlan"


class PlanningFailed(EngineError):
    """Every planning attempt collided; carries the last check result."""

    code = "PlanningFailed"

    def __init__(self, message: str, last_result=None):
        super().__init__(message)
        self.last_result = last_result


class InvalidSequence(EngineError):
    code = "InvalidSequence"


class SafetyGateViolation(EngineError):
    """A sequence reached the executor without a matching Clear verdict."""

    code = "SafetyGateViolation"
