import os
import sys

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    # the module may be imported under more than one name; take any with results
    found = [getattr(m, "ACCEPTANCE_RESULTS", None) for m in list(sys.modules.values())]
    results = next((r for r in found if isinstance(r, dict) and r), None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n][1])
