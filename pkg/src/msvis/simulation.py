"""Path replay with failure injection.

A run is planned up front against the graph: the resolved path, the first
triggered failure, and the full event timeline are fixed at plan time, so
stepping is deterministic and replayable. The engine is untimed; pacing
belongs to the streaming layer.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    EmptyTraceSet,
    InvalidConfig,
    PathNotInGraph,
    UnknownTrace,
)
from .graph import DependencyGraph, EdgeDirection
from .ingest import ServicePath, TraceSet, extract_paths
from .metrics import path_hits

DEFAULT_TICK_MS = 250


class StartMode(str, Enum):
    MOCK = "mock"
    TRACE = "trace"


class FailureTarget(str, Enum):
    NODE = "node"
    EDGE = "edge"


class FailureKind(str, Enum):
    ERROR = "error"
    TIMEOUT = "timeout"


class EventStatus(str, Enum):
    ENTERED = "entered"
    OK = "ok"
    FAILED = "failed"
    NOT_REACHED = "not_reached"


class RunState(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass(frozen=True)
class FailureSpec:
    target: FailureTarget
    kind: FailureKind = FailureKind.ERROR
    node_id: str | None = None
    from_id: str | None = None
    to_id: str | None = None


@dataclass(frozen=True)
class SimulationConfig:
    start_mode: StartMode
    path: ServicePath | None = None
    mock_payload: str | None = None
    trace_ref: str | None = None
    failures: tuple[FailureSpec, ...] = ()
    tick: int = DEFAULT_TICK_MS


@dataclass(frozen=True)
class SimEvent:
    step: int
    subject_kind: str  # "node" | "edge"
    subject: str  # node id, or "from>to" for an edge
    status: EventStatus
    detail: str = ""


@dataclass
class SimulationRun:
    """A planned replay; ``step`` is the single writer of ``events``."""

    id: str
    config: SimulationConfig
    resolved_path: ServicePath
    planned: tuple[SimEvent, ...]
    state: RunState = RunState.PENDING
    events: list[SimEvent] = field(default_factory=list)


def config_from_dict(raw) -> SimulationConfig:
    """Decode the wire form of a simulation config."""
    if not isinstance(raw, dict):
        raise InvalidConfig("simulation config must be a JSON object")
    try:
        mode = StartMode(raw.get("start_mode"))
    except ValueError:
        raise InvalidConfig("start_mode must be 'mock' or 'trace'") from None

    path = None
    if raw.get("path") is not None:
        if not isinstance(raw["path"], str):
            raise InvalidConfig("path must be a 'a>b>c' key string")
        try:
            path = ServicePath.from_key(raw["path"])
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None

    payload = raw.get("mock_payload")
    if payload is not None and not isinstance(payload, str):
        raise InvalidConfig("mock_payload must be a string")
    trace_ref = raw.get("trace_ref")
    if trace_ref is not None and not isinstance(trace_ref, str):
        raise InvalidConfig("trace_ref must be a string")

    tick = raw.get("tick", DEFAULT_TICK_MS)
    if not isinstance(tick, int) or isinstance(tick, bool) or tick < 0:
        raise InvalidConfig("tick must be a non-negative integer (milliseconds)")

    failures = []
    raw_failures = raw.get("failures", [])
    if not isinstance(raw_failures, list):
        raise InvalidConfig("failures must be a list")
    for item in raw_failures:
        if not isinstance(item, dict):
            raise InvalidConfig("each failure must be a JSON object")
        try:
            target = FailureTarget(item.get("target"))
            kind = FailureKind(item.get("kind", "error"))
        except ValueError:
            raise InvalidConfig("failure target must be node/edge, kind error/timeout") from None
        if target is FailureTarget.NODE:
            node_id = item.get("node_id")
            if not isinstance(node_id, str) or not node_id:
                raise InvalidConfig("node failure requires node_id")
            failures.append(FailureSpec(target=target, kind=kind, node_id=node_id))
        else:
            from_id, to_id = item.get("from_id"), item.get("to_id")
            if not all(isinstance(v, str) and v for v in (from_id, to_id)):
                raise InvalidConfig("edge failure requires from_id and to_id")
            failures.append(
                FailureSpec(target=target, kind=kind, from_id=from_id, to_id=to_id)
            )

    if mode is StartMode.MOCK:
        if path is None:
            raise InvalidConfig("mock mode requires a path")
        if payload is None:
            raise InvalidConfig("mock mode requires mock_payload")
    elif trace_ref is None:
        raise InvalidConfig("trace mode requires trace_ref (a trace id or 'auto')")

    return SimulationConfig(
        start_mode=mode,
        path=path,
        mock_payload=payload,
        trace_ref=trace_ref,
        failures=tuple(failures),
        tick=tick,
    )


def _check_failures(config: SimulationConfig, graph: DependencyGraph) -> None:
    ids = graph.node_ids()
    for spec in config.failures:
        if spec.target is FailureTarget.NODE:
            if spec.node_id not in ids:
                raise InvalidConfig(f"failure targets unknown node '{spec.node_id}'")
        else:
            if spec.from_id not in ids or spec.to_id not in ids:
                raise InvalidConfig(
                    f"failure targets unknown edge '{spec.from_id}>{spec.to_id}'"
                )
            if not any({e.a, e.b} == {spec.from_id, spec.to_id} for e in graph.edges):
                raise InvalidConfig(
                    f"failure targets nonexistent edge '{spec.from_id}>{spec.to_id}'"
                )


def _check_path(path: ServicePath, graph: DependencyGraph) -> None:
    ids = graph.node_ids()
    hops = path.services
    for src, dst in zip(hops, hops[1:]):
        ok = any(
            {e.a, e.b} == {src, dst}
            and (
                e.direction is EdgeDirection.BIDIRECTIONAL
                or (e.direction is EdgeDirection.A_TO_B and e.a == src)
                or (e.direction is EdgeDirection.B_TO_A and e.b == src)
            )
            for e in graph.edges
        )
        if not ok:
            raise PathNotInGraph(f"{src}>{dst}")
    for hop in hops:
        if hop not in ids:
            raise PathNotInGraph(hop)


def _resolve_path(
    config: SimulationConfig, traces: TraceSet | None
) -> ServicePath:
    if config.start_mode is StartMode.MOCK:
        if config.path is None or config.mock_payload is None:
            raise InvalidConfig("mock mode requires both path and mock_payload")
        return config.path
    if not config.trace_ref:
        raise InvalidConfig("trace mode requires trace_ref (a trace id or 'auto')")
    if config.trace_ref == "auto":
        if traces is None or not traces.paths:
            raise EmptyTraceSet("automatic path selection needs a non-empty trace set")
        return path_hits(traces).entries[0][0]
    if traces is None or config.trace_ref not in traces.traces:
        raise UnknownTrace(config.trace_ref)
    # Branching traces decompose into several paths; replay the first branch.
    return extract_paths(traces.traces[config.trace_ref])[0]


def _find_failure_point(config: SimulationConfig, hops: tuple[str, ...]):
    """First (hop index, spec) triggered along the path.

    Per hop the node is checked before its outgoing edge; specs are checked
    in config order.
    """
    for i, hop in enumerate(hops):
        for spec in config.failures:
            if spec.target is FailureTarget.NODE and spec.node_id == hop:
                return i, spec
        if i + 1 < len(hops):
            for spec in config.failures:
                if (
                    spec.target is FailureTarget.EDGE
                    and spec.from_id == hop
                    and spec.to_id == hops[i + 1]
                ):
                    return i, spec
    return None


def _plan_events(config: SimulationConfig, hops: tuple[str, ...]) -> tuple[SimEvent, ...]:
    hit = _find_failure_point(config, hops)
    events: list[SimEvent] = []

    def push(subject_kind: str, subject: str, status: EventStatus, detail: str = ""):
        parts = []
        if not events and config.start_mode is StartMode.MOCK:
            parts.append(f"payload={config.mock_payload}")
        if detail:
            parts.append(detail)
        events.append(
            SimEvent(
                step=len(events) + 1,
                subject_kind=subject_kind,
                subject=subject,
                status=status,
                detail="; ".join(parts),
            )
        )

    if hit is None:
        for hop in hops:
            push("node", hop, EventStatus.OK)
        return tuple(events)

    index, spec = hit
    for hop in hops[:index]:
        push("node", hop, EventStatus.OK)
    if spec.target is FailureTarget.NODE:
        push(
            "node",
            hops[index],
            EventStatus.FAILED,
            f"{spec.kind.value} injected at {hops[index]}",
        )
        blocked_from = index + 1
    else:
        push("node", hops[index], EventStatus.OK)
        edge_key = f"{spec.from_id}>{spec.to_id}"
        push("edge", edge_key, EventStatus.FAILED, f"{spec.kind.value} injected on {edge_key}")
        blocked_from = index + 1
    failed_step = len(events)
    for hop in hops[blocked_from:]:
        push("node", hop, EventStatus.NOT_REACHED, f"blocked by failure at step {failed_step}")
    return tuple(events)


def plan(
    config: SimulationConfig,
    graph: DependencyGraph,
    traces: TraceSet | None = None,
    run_id: str | None = None,
) -> SimulationRun:
    """Resolve the path, validate everything, and fix the event timeline."""
    resolved = _resolve_path(config, traces)
    _check_path(resolved, graph)
    _check_failures(config, graph)
    return SimulationRun(
        id=run_id if run_id is not None else uuid.uuid4().hex,
        config=config,
        resolved_path=resolved,
        planned=_plan_events(config, resolved.services),
    )


def step(run: SimulationRun) -> SimEvent | None:
    """Emit the next planned event; None once the run is finished."""
    if run.state in (RunState.COMPLETED, RunState.FAILED):
        return None
    if len(run.events) >= len(run.planned):
        # Empty plan cannot happen (paths have >= 1 hop), kept defensive.
        run.state = RunState.COMPLETED
        return None
    event = run.planned[len(run.events)]
    run.events.append(event)
    if len(run.events) == len(run.planned):
        failed = any(e.status is EventStatus.FAILED for e in run.events)
        run.state = RunState.FAILED if failed else RunState.COMPLETED
    else:
        run.state = RunState.RUNNING
    return event


def run_to_completion(run: SimulationRun) -> SimulationRun:
    while step(run) is not None:
        pass
    return run
