"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import pytest

CRITERIA = {
    1: "worked dominance example (-0.0833, +0.3333)",
    2: "worked top-4 overlap example (0.5)",
    3: "dominance identities (S=V, symmetry, odd middle, incremental)",
    4: "exact measures and distances equal brute-force oracles",
    5: "tie-aware Spearman / Kendall tau-b and rank-sum identity",
    6: "end-to-end persistence equals oracle composition",
    7: "random-subset dominance baseline centred on 0",
    8: "projection weights and affiliation/edge-list equivalence",
    9: "full-scale performance budget",
    10: "byte-identical reruns",
}

_outcomes: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for n in getattr(report, "criteria", ()):
        _outcomes.setdefault(n, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        seen = _outcomes.get(n, [])
        if not seen:
            status = "NOT RUN"
        elif "failed" in seen:
            status = "FAIL"
        elif "skipped" in seen:
            status = "SKIPPED"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n:2d}: {status:8s} {CRITERIA[n]}")
