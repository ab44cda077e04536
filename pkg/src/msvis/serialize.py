"""Canonical JSON forms for every engine artifact.

One serializer feeds the CLI, the export files, and the HTTP bodies, so the
same inputs always produce the same bytes everywhere. Every document uses
fixed key order (nodes by id, edges by (a, b), positions by node id) and
ends with a single trailing newline.
"""

from __future__ import annotations

import json

from .graph import ControllerGroup, DependencyGraph, GraphEdge, GraphNode, ServiceManifest
from .ingest import Span, TraceSet
from .layout import LayoutResult
from .metrics import DependencyRank, PathMetric, RankedPaths
from .simulation import SimEvent, SimulationRun
from .views import FunctionView, View

METRIC_PATH_HITS = "path-hits"
METRIC_PATH_LENGTH = "path-length"
METRIC_SERVICE_DEPENDENCY = "service-dependency"

_PATH_METRIC_NAMES = {
    PathMetric.HITS: METRIC_PATH_HITS,
    PathMetric.LENGTH: METRIC_PATH_LENGTH,
}


def to_json(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Manifest


def manifest_to_dict(manifest: ServiceManifest) -> dict:
    services = []
    for svc in manifest.services:
        entry = {
            "name": svc.name,
            "base_route": svc.base_route,
            "functions": [fn.name for fn in svc.functions],
            "endpoints": [
                {
                    "method": ep.method,
                    "path": ep.path,
                    "calls": [
                        {"service": c.service, "endpoint": c.endpoint} for c in ep.calls
                    ],
                    "flow": [
                        {"function": s.function, "seq": s.seq, "calls": list(s.calls)}
                        for s in ep.flow
                    ],
                }
                for ep in svc.endpoints
            ],
        }
        if svc.controller is not None:
            entry["controller"] = svc.controller
        services.append(entry)
    return {"system_name": manifest.system_name, "services": services}


def manifest_to_json(manifest: ServiceManifest) -> str:
    return to_json(manifest_to_dict(manifest))


# ---------------------------------------------------------------------------
# Graph and views


def _controller_to_dict(group: ControllerGroup) -> dict:
    return {
        "key": group.key,
        "members": list(group.members),
        "hue": group.hue,
        "color": group.color,
    }


def _node_to_dict(node: GraphNode) -> dict:
    return {
        "id": node.id,
        "kind": node.kind.value,
        "controller": node.controller_key,
        "in_degree": node.in_degree,
        "out_degree": node.out_degree,
        "size": node.size,
        "color": node.color,
        "self_calls": node.self_calls,
    }


def _edge_to_dict(edge: GraphEdge) -> dict:
    return {
        "a": edge.a,
        "b": edge.b,
        "direction": edge.direction.value,
        "dependency_count": edge.dependency_count,
        "cross_lines": edge.cross_lines,
    }


def graph_to_dict(graph: DependencyGraph) -> dict:
    return {
        "system": graph.system_name,
        "level": graph.level.value,
        "controllers": [_controller_to_dict(g) for g in graph.controllers],
        "nodes": [_node_to_dict(n) for n in graph.nodes],
        "edges": [_edge_to_dict(e) for e in graph.edges],
    }


def graph_to_json(graph: DependencyGraph) -> str:
    return to_json(graph_to_dict(graph))


def layout_to_dict(layout: LayoutResult) -> dict:
    return {
        "seed": layout.seed,
        "iterations": layout.iterations,
        "positions": {
            node_id: list(layout.positions[node_id]) for node_id in sorted(layout.positions)
        },
    }


def view_to_dict(view: View, layout: LayoutResult | None = None) -> dict:
    highlight = None
    if view.highlight is not None:
        highlight = {
            "path": view.highlight.path_key,
            "nodes": list(view.highlight.node_ids),
            "edges": [{"from": a, "to": b} for a, b in view.highlight.edges],
        }
    return {
        "level": view.level.value,
        "system": view.system_name,
        "controllers": [_controller_to_dict(g) for g in view.controllers],
        "nodes": [
            {**_node_to_dict(vn.node), "dimmed": vn.dimmed, "on_path": vn.on_path}
            for vn in view.nodes
        ],
        "edges": [_edge_to_dict(e) for e in view.edges],
        "highlight": highlight,
        "focus": view.focus,
        "layout": layout_to_dict(layout) if layout is not None else None,
    }


def view_to_json(view: View, layout: LayoutResult | None = None) -> str:
    return to_json(view_to_dict(view, layout))


def function_view_to_dict(fv: FunctionView) -> dict:
    return {
        "service": fv.service,
        "participants": list(fv.participants),
        "messages": [
            {"seq": m.seq, "from": m.sender, "to": m.receiver} for m in fv.messages
        ],
    }


def function_view_to_json(fv: FunctionView) -> str:
    return to_json(function_view_to_dict(fv))


# ---------------------------------------------------------------------------
# Metrics


def ranking_to_dict(ranking: RankedPaths | DependencyRank, top: int | None = None) -> dict:
    if isinstance(ranking, RankedPaths):
        entries = [
            {"rank": i + 1, "key": path.key, "score": score}
            for i, (path, score) in enumerate(ranking.entries)
        ]
        metric = _PATH_METRIC_NAMES[ranking.metric]
    else:
        entries = [
            {"rank": i + 1, "id": node_id, "score": score}
            for i, (node_id, score) in enumerate(ranking.entries)
        ]
        metric = METRIC_SERVICE_DEPENDENCY
    if top is not None:
        entries = entries[:top]
    return {"metric": metric, "entries": entries}


def ranking_to_json(ranking: RankedPaths | DependencyRank, top: int | None = None) -> str:
    return to_json(ranking_to_dict(ranking, top))


# ---------------------------------------------------------------------------
# Simulation and traces


def event_to_dict(event: SimEvent) -> dict:
    return {
        "step": event.step,
        "subject_kind": event.subject_kind,
        "subject": event.subject,
        "status": event.status.value,
        "detail": event.detail,
    }


def run_to_dict(run: SimulationRun) -> dict:
    return {
        "id": run.id,
        "state": run.state.value,
        "path": run.resolved_path.key,
        "events": [event_to_dict(e) for e in run.events],
    }


def span_to_dict(span: Span) -> dict:
    doc = {
        "trace_id": span.trace_id,
        "span_id": span.span_id,
        "service": span.service,
        "endpoint": span.endpoint,
        "start_time": span.start_time,
        "duration": span.duration,
        "status": span.status,
    }
    if span.parent_span_id is not None:
        doc["parent_span_id"] = span.parent_span_id
    return doc


def trace_set_spans(traces: TraceSet) -> list[Span]:
    """Flatten a trace set back to its spans (tree order per trace)."""
    spans: list[Span] = []
    for trace_id in sorted(traces.traces):
        stack = [traces.traces[trace_id]]
        while stack:
            node = stack.pop()
            spans.append(node.span)
            stack.extend(reversed(node.children))
    return spans
