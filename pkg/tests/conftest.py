import os
import sys

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# lines collected by the acceptance module, echoed at the end of the run
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def acceptance_log():
    def log(number: int, ok: bool, text: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        ACCEPTANCE_LINES.append(line)
        print(line, file=sys.stderr)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def full_report():
    """verify-all at default limits, shared by the modules that inspect it."""
    import time

    from sendov_cert import Options, verify_all

    t0 = time.perf_counter()
    report = verify_all(Options(jobs=4))
    report.timings["__total__"] = time.perf_counter() - t0
    return report
