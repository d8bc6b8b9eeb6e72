import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from lamstab import build_gamma, make_spectrum  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def S():
    return make_spectrum(0.2, 0.3, 0.5)


@pytest.fixture(scope="session")
def hull512(S):
    return build_gamma(S, 512)
