import os

import hypothesis
import numpy as np
import pytest

from bergproj.acceptance import REGISTRY_WEIGHTS
from bergproj.weights import parse_weight

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=400, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(params=REGISTRY_WEIGHTS)
def registry_weight(request):
    return parse_weight(request.param)


@pytest.fixture
def closed_form_weight():
    return parse_weight("alpha=0;M=poly-r2:2,-1")


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
