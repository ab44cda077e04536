"""Manifest and trace-log ingestion.

Parses manifest JSON into a validated ServiceManifest, and span records
(JSON Lines) into per-trace span trees with the service paths extracted
from every root-to-leaf branch. Trace parsing is lenient: malformed lines
and unresolvable spans are counted and dropped, never fatal.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass

from .errors import (
    BadRoute,
    DanglingCallTarget,
    DuplicateService,
    EmptyInput,
    SchemaError,
)
from .graph import (
    CallDecl,
    EndpointDecl,
    FunctionDecl,
    FunctionStep,
    ServiceDecl,
    ServiceManifest,
)

SPAN_STATUSES = ("ok", "error")


# ---------------------------------------------------------------------------
# Trace model


@dataclass(frozen=True)
class Span:
    trace_id: str
    span_id: str
    parent_span_id: str | None
    service: str
    endpoint: str
    start_time: int  # microseconds since epoch
    duration: int  # microseconds
    status: str = "ok"


@dataclass(frozen=True)
class SpanNode:
    """One span with its children ordered by (start_time, span_id)."""

    span: Span
    children: tuple["SpanNode", ...] = ()


@dataclass(frozen=True)
class PathHop:
    service: str
    endpoint: str = ""


@dataclass(frozen=True)
class ServicePath:
    """An ordered service sequence; consecutive hops always differ."""

    hops: tuple[PathHop, ...]

    @property
    def key(self) -> str:
        return ">".join(hop.service for hop in self.hops)

    @property
    def services(self) -> tuple[str, ...]:
        return tuple(hop.service for hop in self.hops)

    @classmethod
    def from_key(cls, key: str) -> "ServicePath":
        """Build a service-granular path from its canonical "a>b>c" key."""
        names = [part.strip() for part in key.split(">")]
        if not names or any(not name for name in names):
            raise ValueError(f"malformed path key {key!r}")
        for prev, cur in zip(names, names[1:]):
            if prev == cur:
                raise ValueError(f"path key {key!r} repeats service '{cur}'")
        return cls(tuple(PathHop(name) for name in names))


@dataclass(frozen=True)
class TraceSet:
    """Parsed traces plus the path multiset they decompose into.

    ``traces`` maps trace id to the root SpanNode; treat it as read-only.
    """

    traces: dict[str, SpanNode]
    paths: tuple[ServicePath, ...]
    malformed_count: int = 0
    dropped_spans: int = 0
    skipped_traces: int = 0


# ---------------------------------------------------------------------------
# Manifest parsing


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_manifest(source) -> ServiceManifest:
    """Parse and validate manifest JSON from bytes, text, or a file object."""
    text = _read_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None
    return manifest_from_dict(doc)


def load_manifest(path) -> ServiceManifest:
    with open(path, "rb") as fh:
        return parse_manifest(fh)


def manifest_from_dict(doc) -> ServiceManifest:
    if not isinstance(doc, dict):
        raise SchemaError("$", "manifest must be a JSON object")
    system_name = _req_str(doc, "system_name", "$")
    raw_services = _req_list(doc, "services", "$")
    services = []
    seen = set()
    for i, raw in enumerate(raw_services):
        svc = _service_from_dict(raw, f"$.services[{i}]")
        if svc.name in seen:
            raise DuplicateService(svc.name)
        seen.add(svc.name)
        services.append(svc)
    manifest = ServiceManifest(system_name=system_name, services=tuple(services))
    _check_call_targets(manifest)
    return manifest


def _req_str(obj: dict, key: str, path: str, allow_empty: bool = False) -> str:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if not isinstance(value, str) or (not allow_empty and not value):
        raise SchemaError(f"{path}.{key}", "must be a non-empty string")
    return value


def _req_list(obj: dict, key: str, path: str) -> list:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if not isinstance(value, list):
        raise SchemaError(f"{path}.{key}", "must be a list")
    return value


def _opt_list(obj: dict, key: str, path: str) -> list:
    value = obj.get(key, [])
    if not isinstance(value, list):
        raise SchemaError(f"{path}.{key}", "must be a list")
    return value


def _service_from_dict(raw, path: str) -> ServiceDecl:
    if not isinstance(raw, dict):
        raise SchemaError(path, "service must be a JSON object")
    name = _req_str(raw, "name", path)

    base_route = raw.get("base_route")
    if not isinstance(base_route, str) or not base_route.startswith("/"):
        raise BadRoute(name, base_route)

    controller = raw.get("controller")
    if controller is not None and (not isinstance(controller, str) or not controller):
        raise SchemaError(f"{path}.controller", "must be a non-empty string")

    functions = []
    fn_names = set()
    for j, fn in enumerate(_opt_list(raw, "functions", path)):
        if isinstance(fn, str) and fn:
            fn_name = fn
        elif isinstance(fn, dict):
            fn_name = _req_str(fn, "name", f"{path}.functions[{j}]")
        else:
            raise SchemaError(f"{path}.functions[{j}]", "must be a name or an object with 'name'")
        if fn_name in fn_names:
            raise SchemaError(f"{path}.functions[{j}]", f"duplicate function name '{fn_name}'")
        fn_names.add(fn_name)
        functions.append(FunctionDecl(fn_name))

    endpoints = []
    endpoint_ids = set()
    for j, ep in enumerate(_opt_list(raw, "endpoints", path)):
        endpoint = _endpoint_from_dict(ep, f"{path}.endpoints[{j}]", fn_names)
        if endpoint.endpoint_id in endpoint_ids:
            raise SchemaError(
                f"{path}.endpoints[{j}]", f"duplicate endpoint id '{endpoint.endpoint_id}'"
            )
        endpoint_ids.add(endpoint.endpoint_id)
        endpoints.append(endpoint)

    return ServiceDecl(
        name=name,
        base_route=base_route,
        endpoints=tuple(endpoints),
        functions=tuple(functions),
        controller=controller,
    )


def _endpoint_from_dict(raw, path: str, fn_names: set[str]) -> EndpointDecl:
    if not isinstance(raw, dict):
        raise SchemaError(path, "endpoint must be a JSON object")
    method = _req_str(raw, "method", path)
    ep_path = _req_str(raw, "path", path)

    calls = []
    for k, call in enumerate(_opt_list(raw, "calls", path)):
        if not isinstance(call, dict):
            raise SchemaError(f"{path}.calls[{k}]", "call must be a JSON object")
        calls.append(
            CallDecl(
                service=_req_str(call, "service", f"{path}.calls[{k}]"),
                endpoint=_req_str(call, "endpoint", f"{path}.calls[{k}]"),
            )
        )

    flow = []
    prev_seq = 0
    for k, step in enumerate(_opt_list(raw, "flow", path)):
        step_path = f"{path}.flow[{k}]"
        if not isinstance(step, dict):
            raise SchemaError(step_path, "flow step must be a JSON object")
        fn = _req_str(step, "function", step_path)
        seq = step.get("seq")
        if not isinstance(seq, int) or isinstance(seq, bool):
            raise SchemaError(f"{step_path}.seq", "must be an integer")
        if k == 0 and seq != 1:
            raise SchemaError(f"{step_path}.seq", "flow must start at sequence 1")
        if seq <= prev_seq:
            raise SchemaError(f"{step_path}.seq", "sequence numbers must be strictly increasing")
        prev_seq = seq
        called = []
        for m, callee in enumerate(_opt_list(step, "calls", step_path)):
            if not isinstance(callee, str) or not callee:
                raise SchemaError(f"{step_path}.calls[{m}]", "must be a function name")
            called.append(callee)
        for fn_name in [fn, *called]:
            if fn_name not in fn_names:
                raise SchemaError(
                    step_path, f"flow references undeclared function '{fn_name}'"
                )
        flow.append(FunctionStep(function=fn, seq=seq, calls=tuple(called)))

    return EndpointDecl(method=method, path=ep_path, calls=tuple(calls), flow=tuple(flow))


def _check_call_targets(manifest: ServiceManifest) -> None:
    names = manifest.service_names()
    for i, svc in enumerate(manifest.services):
        for j, ep in enumerate(svc.endpoints):
            for k, call in enumerate(ep.calls):
                if call.service not in names:
                    raise DanglingCallTarget(
                        call.service,
                        where=f"$.services[{i}].endpoints[{j}].calls[{k}]",
                    )


# ---------------------------------------------------------------------------
# Trace parsing


def parse_traces(source) -> TraceSet:
    """Parse JSON Lines span records into a TraceSet.

    Raises EmptyInput for blank input. Lines that are not valid span records
    count as malformed and are skipped; spans that cannot be attached under
    their trace's root are dropped; traces without exactly one root are
    skipped. All of that is reported through the TraceSet counters.
    """
    text = _read_text(source)
    if not text.strip():
        raise EmptyInput("trace input is empty")
    spans = []
    malformed = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        span = _span_from_line(line)
        if span is None:
            malformed += 1
        else:
            spans.append(span)
    return build_trace_set(spans, malformed_count=malformed)


def load_traces(path) -> TraceSet:
    with open(path, "rb") as fh:
        return parse_traces(fh)


def _span_from_line(line: str) -> Span | None:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError:
        return None
    return span_from_dict(raw)


def span_from_dict(raw) -> Span | None:
    """Decode one span record; None when the record is unusable."""
    if not isinstance(raw, dict):
        return None
    for key in ("trace_id", "span_id", "service", "endpoint"):
        if not isinstance(raw.get(key), str) or not raw[key]:
            return None
    for key in ("start_time", "duration"):
        value = raw.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            return None
    parent = raw.get("parent_span_id")
    if parent is not None and not isinstance(parent, str):
        return None
    status = raw.get("status", "ok")
    if status not in SPAN_STATUSES:
        return None
    return Span(
        trace_id=raw["trace_id"],
        span_id=raw["span_id"],
        parent_span_id=parent or None,
        service=raw["service"],
        endpoint=raw["endpoint"],
        start_time=raw["start_time"],
        duration=raw["duration"],
        status=status,
    )


def _span_order(span: Span) -> tuple:
    return (span.start_time, span.span_id)


def build_trace_set(spans, malformed_count: int = 0) -> TraceSet:
    """Group spans into trees and extract paths; insensitive to input order."""
    by_trace: dict[str, list[Span]] = defaultdict(list)
    for span in spans:
        by_trace[span.trace_id].append(span)

    traces: dict[str, SpanNode] = {}
    paths: list[ServicePath] = []
    dropped = 0
    skipped = 0
    for trace_id in sorted(by_trace):
        group = sorted(by_trace[trace_id], key=_span_order)
        unique = []
        seen_ids = set()
        for span in group:
            if span.span_id in seen_ids:
                dropped += 1
            else:
                seen_ids.add(span.span_id)
                unique.append(span)
        roots = [s for s in unique if s.parent_span_id is None]
        if len(roots) != 1:
            skipped += 1
            continue
        children: dict[str, list[Span]] = defaultdict(list)
        for span in unique:
            if span.parent_span_id is not None:
                children[span.parent_span_id].append(span)
        root, visited = _build_tree(roots[0], children)
        dropped += len(unique) - visited
        traces[trace_id] = root
        paths.extend(extract_paths(root))

    return TraceSet(
        traces=traces,
        paths=tuple(paths),
        malformed_count=malformed_count,
        dropped_spans=dropped,
        skipped_traces=skipped,
    )


def _build_tree(root_span: Span, children_by_parent) -> tuple[SpanNode, int]:
    # Iterative preorder walk, then assemble leaves-first; spans not
    # reachable from the root (orphans, cycles) are simply never visited.
    order: list[Span] = []
    kids: dict[str, list[Span]] = {}
    seen = {root_span.span_id}
    stack = [root_span]
    while stack:
        span = stack.pop()
        order.append(span)
        childs = [
            c
            for c in sorted(children_by_parent.get(span.span_id, ()), key=_span_order)
            if c.span_id not in seen
        ]
        seen.update(c.span_id for c in childs)
        kids[span.span_id] = childs
        stack.extend(reversed(childs))

    nodes: dict[str, SpanNode] = {}
    for span in reversed(order):
        nodes[span.span_id] = SpanNode(
            span=span,
            children=tuple(nodes[c.span_id] for c in kids[span.span_id]),
        )
    return nodes[root_span.span_id], len(order)


def extract_paths(root: SpanNode) -> list[ServicePath]:
    """One path per root-to-leaf branch, depth-first in sibling order.

    Consecutive spans on the same service collapse into a single hop that
    keeps the first span's endpoint.
    """
    paths: list[ServicePath] = []
    stack: list[tuple[SpanNode, tuple[PathHop, ...]]] = [(root, ())]
    while stack:
        node, prefix = stack.pop()
        span = node.span
        if not prefix or prefix[-1].service != span.service:
            hops = prefix + (PathHop(span.service, span.endpoint),)
        else:
            hops = prefix
        if not node.children:
            paths.append(ServicePath(hops))
        else:
            for child in reversed(node.children):
                stack.append((child, hops))
    return paths
