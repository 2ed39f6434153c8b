import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

from rvk.radar.synth import SceneSpec
from rvk.radar.tests.factories import SceneSpecFactory

hypothesis_settings.register_profile(
    "rvk", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.register_profile("ci", parent=hypothesis_settings.get_profile("rvk"), max_examples=200)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "rvk"))

SCENE_TOML = """\
version = 1
rng_seed = 7
n_noise_points = 5
field_of_view = [-1.0, 1.0]
n_frames = 2
frame_interval = 0.1

[[objects]]
center = [12.0, -4.0]
extent = [3.0, 3.0]
velocity = [10.0, -2.0]
n_points = 80
outlier_fraction = 0.25
doppler_noise_sigma = 0.05

[[objects]]
center = [12.0, 5.0]
extent = [3.0, 3.0]
velocity = [-6.0, 3.0]
n_points = 60
"""


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def scene() -> SceneSpec:
    return SceneSpecFactory(rng_seed=11)


@pytest.fixture
def scene_file(tmp_path: Path) -> Path:
    path = tmp_path / "scene.toml"
    path.write_text(SCENE_TOML)
    return path
