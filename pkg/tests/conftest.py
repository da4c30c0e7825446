import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "40")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_fraction(r: random.Random, lo: int = 1, hi: int = 50, den: int = 30) -> Fraction:
    return Fraction(r.randint(lo, hi * den), r.randint(1, den))


def distinct_fractions(r: random.Random, k: int, **kw) -> list:
    out: set = set()
    while len(out) < k:
        out.add(random_fraction(r, **kw))
    return sorted(out)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, description): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    import acceptance_report

    acceptance_report.record(*mark.args, passed=report.passed)


def pytest_terminal_summary(terminalreporter):
    import acceptance_report

    lines = acceptance_report.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
