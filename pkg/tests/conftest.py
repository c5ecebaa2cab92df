import os

import pytest
from hypothesis import HealthCheck, settings

from icregion.det_channel import ManyToOneGains

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# n_00=5, n_01=3, n_11=3, n_02=2, n_22=1, n_03=5, n_33=3
REF_CHANNEL = ManyToOneGains(3, (5, 3, 1, 3), (3, 2, 5))


@pytest.fixture
def ref_channel():
    return REF_CHANNEL


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
