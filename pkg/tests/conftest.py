import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from models.cemg import SystemParams  # noqa: E402
from models.tvms import CrackSpec, GearGeometry, build_profile  # noqa: E402

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))


@pytest.fixture(scope='session')
def geometry():
    return GearGeometry()


@pytest.fixture(scope='session')
def params():
    return SystemParams()


@pytest.fixture(scope='session')
def profiles(geometry):
    """Profiles at the four configured crack levels, 1024 samples per mesh period."""
    return {depth: build_profile(geometry, CrackSpec(depth), 1024, m_p=0.96, m_g=2.88, zeta=0.07)
            for depth in (0.0, 0.2, 0.4, 0.6)}


@pytest.fixture
def rng():
    return np.random.default_rng(2021)
