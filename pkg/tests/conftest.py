import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_verdicts = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_criterion_"):
        k = int(name.split("_")[2])
        _verdicts[k] = _verdicts.get(k, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        verdict = {True: "PASS", False: "FAIL", None: "NOT RUN"}[_verdicts.get(k)]
        terminalreporter.write_line(f"criterion {k}: {verdict}  {CRITERIA[k]}")
