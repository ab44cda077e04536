import json
from pathlib import Path

import pytest

from msvis import GraphLevel, build_graph, parse_manifest, parse_traces
from msvis.views import service_view, system_view

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def trainticket_path():
    return FIXTURES / "trainticket.json"


@pytest.fixture(scope="session")
def minisys_path():
    return FIXTURES / "minisys.json"


@pytest.fixture(scope="session")
def traces_path():
    return FIXTURES / "traces_1k.jsonl"


@pytest.fixture(scope="session")
def trainticket(trainticket_path):
    return parse_manifest(trainticket_path.read_bytes())


@pytest.fixture(scope="session")
def minisys(minisys_path):
    return parse_manifest(minisys_path.read_bytes())


@pytest.fixture(scope="session")
def minisys_service_graph(minisys):
    return build_graph(minisys, GraphLevel.SERVICE)


@pytest.fixture(scope="session")
def minisys_system_graph(minisys):
    return build_graph(minisys, GraphLevel.SYSTEM)


@pytest.fixture(scope="session")
def minisys_service_view(minisys_service_graph):
    return service_view(minisys_service_graph)


@pytest.fixture(scope="session")
def trainticket_service_graph(trainticket):
    return build_graph(trainticket, GraphLevel.SERVICE)


@pytest.fixture(scope="session")
def trace_set(traces_path):
    return parse_traces(traces_path.read_text())


def make_manifest(services, system_name="Sample"):
    """Build a manifest dict from (name, base_route, callees) triples.

    Callees are service names; each call targets the callee's info endpoint.
    """
    docs = []
    for name, route, callees in services:
        docs.append(
            {
                "name": name,
                "base_route": route,
                "endpoints": [
                    {"method": "GET", "path": f"{route}/{name}/info", "calls": []},
                    {
                        "method": "POST",
                        "path": f"{route}/{name}/act",
                        "calls": [
                            {
                                "service": callee,
                                "endpoint": f"GET {r}/{callee}/info",
                            }
                            for callee, r in callees
                        ],
                    },
                ],
            }
        )
    return {"system_name": system_name, "services": docs}


def span(trace_id, span_id, parent, service, start, endpoint="GET /e", duration=100, status="ok"):
    return {
        "trace_id": trace_id,
        "span_id": span_id,
        "parent_span_id": parent,
        "service": service,
        "endpoint": endpoint,
        "start_time": start,
        "duration": duration,
        "status": status,
    }


def span_lines(spans):
    return "\n".join(json.dumps(s) for s in spans) + "\n"


# ---------------------------------------------------------------------------
# Acceptance reporting: every test marked @pytest.mark.acceptance("...") gets
# one PASS/FAIL line in the terminal summary.

_acceptance_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        _acceptance_results.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _acceptance_results:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
