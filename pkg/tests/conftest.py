import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIOS = os.path.join(ROOT, "scenarios")


@pytest.fixture
def scenario_path():
    def path(name):
        return os.path.join(SCENARIOS, name)

    return path


# one PASS/FAIL line per acceptance criterion, echoed live and again in the summary
_ACCEPTANCE = []


@pytest.fixture
def report(request):
    def emit(criterion, passed, detail, table=()):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        _ACCEPTANCE.append((criterion, line, list(table)))
        capman = request.config.pluginmanager.getplugin("capturemanager")
        with capman.global_and_fixture_disabled():
            print("\n" + line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line, table in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(line)
        for row in table:
            terminalreporter.write_line("    " + row)
