import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from hornfix.gen import AGAP_TEXT
from hornfix.parser import parse_program, parse_structure

settings.register_profile(
    "repo", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

AGAP_GRAPH_TEXT = """\
structure { size 4
  const s = 0  const t = 3
  rel E/2 { (0,1) (0,2) (1,3) (2,3) }
  rel Puni/1 { (0) } }
"""

TC_PROGRAM_TEXT = """\
T(x,y) :- E(x,y).
T(x,y) :- E(x,z), T(z,y).
"""


@pytest.fixture
def agap():
    return parse_program(AGAP_TEXT)


@pytest.fixture
def agap_graph():
    return parse_structure(AGAP_GRAPH_TEXT)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if not module or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
