import random

import pytest

from msvis import (
    EmptyTraceSet,
    EventStatus,
    InvalidConfig,
    PathNotInGraph,
    RunState,
    StartMode,
    UnknownTrace,
    build_trace_set,
    config_from_dict,
    parse_traces,
    plan,
    run_to_completion,
)
from msvis.simulation import DEFAULT_TICK_MS, step

from conftest import span, span_lines


def mock_config(path="s2>s1>s4>s6", failures=(), payload='{"id": 1}', **extra):
    doc = {
        "start_mode": "mock",
        "path": path,
        "mock_payload": payload,
        "failures": list(failures),
    }
    doc.update(extra)
    return config_from_dict(doc)


class TestConfigDecoding:
    def test_mock_defaults(self):
        config = mock_config()
        assert config.start_mode is StartMode.MOCK
        assert config.path.key == "s2>s1>s4>s6"
        assert config.tick == DEFAULT_TICK_MS
        assert config.failures == ()

    def test_trace_mode(self):
        config = config_from_dict({"start_mode": "trace", "trace_ref": "auto"})
        assert config.start_mode is StartMode.TRACE
        assert config.trace_ref == "auto"

    @pytest.mark.parametrize(
        "doc",
        [
            {},
            {"start_mode": "warp"},
            {"start_mode": "mock", "path": "a>b"},  # no payload
            {"start_mode": "mock", "mock_payload": "x"},  # no path
            {"start_mode": "mock", "path": "a>>b", "mock_payload": "x"},
            {"start_mode": "trace"},  # no trace_ref
            {"start_mode": "mock", "path": "a>b", "mock_payload": "x", "tick": -5},
            {"start_mode": "mock", "path": "a>b", "mock_payload": "x",
             "failures": [{"target": "node"}]},
            {"start_mode": "mock", "path": "a>b", "mock_payload": "x",
             "failures": [{"target": "edge", "from_id": "a"}]},
            {"start_mode": "mock", "path": "a>b", "mock_payload": "x",
             "failures": [{"target": "node", "node_id": "a", "kind": "meteor"}]},
        ],
    )
    def test_invalid_configs_rejected(self, doc):
        with pytest.raises(InvalidConfig):
            config_from_dict(doc)


class TestPlanValidation:
    def test_path_must_exist_in_graph(self, minisys_service_graph):
        with pytest.raises(PathNotInGraph):
            plan(mock_config("s1>s2"), minisys_service_graph, None)

    def test_failure_node_must_exist(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "node", "node_id": "ghost"}])
        with pytest.raises(InvalidConfig):
            plan(config, minisys_service_graph, None)

    def test_failure_edge_must_exist(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "edge", "from_id": "s2", "to_id": "s6"}])
        with pytest.raises(InvalidConfig):
            plan(config, minisys_service_graph, None)

    def test_trace_mode_requires_traces(self, minisys_service_graph):
        config = config_from_dict({"start_mode": "trace", "trace_ref": "auto"})
        with pytest.raises(EmptyTraceSet):
            plan(config, minisys_service_graph, None)


class TestTraceResolution:
    def _traces(self):
        spans = [
            span("t1", "a", None, "s2", 1),
            span("t1", "b", "a", "s1", 2),
            span("t1", "c", "b", "s4", 3),
            span("t2", "d", None, "s3", 1),
            span("t2", "e", "d", "s5", 2),
            span("t3", "f", None, "s3", 1),
            span("t3", "g", "f", "s5", 2),
        ]
        return parse_traces(span_lines(spans))

    def test_explicit_trace_ref(self, minisys_service_graph):
        config = config_from_dict({"start_mode": "trace", "trace_ref": "t1"})
        run = plan(config, minisys_service_graph, self._traces())
        assert run.resolved_path.key == "s2>s1>s4"

    def test_auto_picks_top_path_hits(self, minisys_service_graph):
        config = config_from_dict({"start_mode": "trace", "trace_ref": "auto"})
        run = plan(config, minisys_service_graph, self._traces())
        assert run.resolved_path.key == "s3>s5"  # two hits vs one

    def test_unknown_trace_ref(self, minisys_service_graph):
        config = config_from_dict({"start_mode": "trace", "trace_ref": "t99"})
        with pytest.raises(UnknownTrace):
            plan(config, minisys_service_graph, self._traces())

    def test_branching_trace_uses_first_branch(self, minisys_service_graph):
        spans = [
            span("t1", "root", None, "s1", 1),
            span("t1", "b1", "root", "s4", 2),
            span("t1", "b2", "root", "s6", 3),
        ]
        traces = parse_traces(span_lines(spans))
        config = config_from_dict({"start_mode": "trace", "trace_ref": "t1"})
        run = plan(config, minisys_service_graph, traces)
        assert run.resolved_path.key == "s1>s4"


class TestCleanRun:
    def test_one_ok_event_per_hop(self, minisys_service_graph):
        run = run_to_completion(plan(mock_config(), minisys_service_graph, None))
        assert run.state is RunState.COMPLETED
        assert [e.status for e in run.events] == [EventStatus.OK] * 4
        assert [e.subject for e in run.events] == ["s2", "s1", "s4", "s6"]
        assert [e.step for e in run.events] == [1, 2, 3, 4]

    def test_payload_recorded_on_first_event(self, minisys_service_graph):
        run = run_to_completion(plan(mock_config(), minisys_service_graph, None))
        assert 'payload={"id": 1}' in run.events[0].detail
        assert run.events[1].detail == ""

    def test_step_emits_events_incrementally(self, minisys_service_graph):
        run = plan(mock_config(), minisys_service_graph, None)
        assert run.state is RunState.PENDING
        first = step(run)
        assert first.step == 1
        assert run.state is RunState.RUNNING
        while step(run) is not None:
            pass
        assert run.state is RunState.COMPLETED
        assert step(run) is None
        assert len(run.events) == 4


class TestFailureInjection:
    def test_node_failure_blocks_downstream(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "node", "node_id": "s4", "kind": "timeout"}])
        run = run_to_completion(plan(config, minisys_service_graph, None))
        assert run.state is RunState.FAILED
        statuses = [(e.subject, e.status) for e in run.events]
        assert statuses == [
            ("s2", EventStatus.OK),
            ("s1", EventStatus.OK),
            ("s4", EventStatus.FAILED),
            ("s6", EventStatus.NOT_REACHED),
        ]
        assert "timeout" in run.events[2].detail

    def test_edge_failure_gets_its_own_event(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "edge", "from_id": "s1", "to_id": "s4"}])
        run = run_to_completion(plan(config, minisys_service_graph, None))
        assert len(run.events) == 5
        edge_event = run.events[2]
        assert edge_event.subject_kind == "edge"
        assert edge_event.subject == "s1>s4"
        assert edge_event.status is EventStatus.FAILED
        assert [e.status for e in run.events[3:]] == [EventStatus.NOT_REACHED] * 2

    def test_failure_on_start_node(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "node", "node_id": "s2"}])
        run = run_to_completion(plan(config, minisys_service_graph, None))
        assert run.events[0].status is EventStatus.FAILED
        assert all(e.status is EventStatus.NOT_REACHED for e in run.events[1:])

    def test_off_path_failure_never_triggers(self, minisys_service_graph):
        config = mock_config(failures=[{"target": "node", "node_id": "s3"}])
        run = run_to_completion(plan(config, minisys_service_graph, None))
        assert run.state is RunState.COMPLETED
        assert all(e.status is EventStatus.OK for e in run.events)

    def test_first_failure_wins(self, minisys_service_graph):
        config = mock_config(
            failures=[
                {"target": "node", "node_id": "s6"},
                {"target": "node", "node_id": "s1"},
            ]
        )
        run = run_to_completion(plan(config, minisys_service_graph, None))
        failed = [e for e in run.events if e.status is EventStatus.FAILED]
        assert len(failed) == 1
        assert failed[0].subject == "s1"

    def test_node_checked_before_outgoing_edge(self, minisys_service_graph):
        config = mock_config(
            failures=[
                {"target": "edge", "from_id": "s1", "to_id": "s4"},
                {"target": "node", "node_id": "s1"},
            ]
        )
        run = run_to_completion(plan(config, minisys_service_graph, None))
        failed = [e for e in run.events if e.status is EventStatus.FAILED]
        assert failed[0].subject == "s1"

    def test_state_failed_iff_failed_event(self, minisys_service_graph):
        rng = random.Random(3)
        nodes = ["s1", "s2", "s4", "s6"]
        for _ in range(30):
            failures = [
                {"target": "node", "node_id": rng.choice(nodes + ["s3", "s5"])}
                for _ in range(rng.randrange(0, 3))
            ]
            run = run_to_completion(plan(mock_config(failures=failures), minisys_service_graph, None))
            has_failed = any(e.status is EventStatus.FAILED for e in run.events)
            assert (run.state is RunState.FAILED) == has_failed


class TestRunBookkeeping:
    def test_run_ids_unique(self, minisys_service_graph):
        runs = {plan(mock_config(), minisys_service_graph, None).id for _ in range(20)}
        assert len(runs) == 20

    def test_events_match_plan(self, minisys_service_graph):
        run = plan(mock_config(), minisys_service_graph, None)
        planned = run.planned
        run_to_completion(run)
        assert tuple(run.events) == planned
