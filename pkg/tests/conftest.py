from __future__ import annotations

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from deskpilot.config import EngineConfig
from deskpilot.scene import RigidTransform


@pytest.fixture
def config() -> EngineConfig:
    return EngineConfig()


def random_rigid_transform(rng: np.random.Generator) -> RigidTransform:
    rotation = Rotation.random(random_state=int(rng.integers(0, 2**31))).as_matrix()
    translation = rng.uniform(-1.0, 1.0, 3)
    return RigidTransform(rotation, translation)
