"""deskpilot: point-and-tell control for a desk-scale manipulator.

Fuses typed commands and pointing rays over reconstructed box scenes into
intention tuples, plans constrained action sequences, and guarantees every
executed trajectory passed a swept-volume collision cross-check.
"""

from .config import EngineConfig, PlannerConfig, load_config
from .deixis import DeicticRay, SkeletonFrame, TargetSelection, forearm_ray, point_line_distance, select_target
from .errors import EngineError
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
from .orchestrator import (
    Scenario,
    SessionService,
    bundled_scenario,
    canonical_report_json,
    execute,
    perceive_world,
    replay,
)
from .planning import (
    ActionSequence,
    CannedChatClient,
    DeterministicPlanner,
    ExternalPlanner,
    FaultInjectedPlanner,
    Pose,
    PromptBundle,
    build_prompt,
    parse_plan_response,
)
from .safety import Box3, CheckResult, check, plan_with_feedback, segment_hits_box
from .scene import (
    CameraIntrinsics,
    EndEffectorState,
    PointCloud,
    RigidTransform,
    Scene,
    StructuralObject,
    build_scene,
    reproject,
    summarize,
    transform_points,
)
from .segmentation import SegmentationFrame, WorldSpec, decode_external, random_world, synthesize

__version__ = "0.1.0"
