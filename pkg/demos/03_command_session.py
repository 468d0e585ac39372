"""
A command session, step by step
===============================

Utterances are classified by the phrase table and drive the session state
machine: action, pointing approval, optional metric, finish. The finished
session fuses into an intention tuple
(action1, target1, action2, target2, metric).
"""

from deskpilot.deixis import TargetSelection
from deskpilot.grammar import (
    PhraseTable,
    SessionState,
    VerbalUtterance,
    advance,
    fuse,
    parse_utterance,
)

table = PhraseTable.from_file()
state = SessionState.initial()

script = [
    "pick up this cup",
    TargetSelection(0, 0.012, ((0, 0.012), (1, 0.31))),  # live pointing feedback
    "yes",
    "pour it into the bowl",
    TargetSelection(1, 0.008, ((0, 0.29), (1, 0.008))),
    "that one",
    "at ninety degrees",
    "finish",
]

for event in script:
    if isinstance(event, str):
        command = parse_utterance(VerbalUtterance(event, 0.0), table)
        state = advance(state, command)
        print(f'"{event}" -> {type(command).__name__:15s} phase={state.phase.value}')
    else:
        state = advance(state, event)
        print(f"point at object {event.index:<12d} phase={state.phase.value}")

intention = fuse(state)
print("\nfused intention:", intention.render())
