"""
Headless end-to-end replay
==========================

Run a bundled scenario through the whole pipeline: synthetic perception,
scripted utterances and pointing, planning with the cross-check gate,
kinematic execution, and final-position assertions.
"""

import json

from deskpilot import EngineConfig
from deskpilot.orchestrator import bundled_scenario, replay

config = EngineConfig()
for name in ("pick-place-over-obstacle", "pick-pour-90"):
    report = replay(bundled_scenario(name), config)
    print(f"== {name}: {'PASS' if report['passed'] else 'FAIL'}")
    print("   intention:", ", ".join(report["intentions"]))
    print("   plan attempts:", report["attempts"])
    for entry in report["assertions"]:
        print(f"   {entry['kind']:18s} passed={entry['passed']}")
    print("   timings:", json.dumps({k: round(v, 3) for k, v in report["timings"].items()}))
    print()
