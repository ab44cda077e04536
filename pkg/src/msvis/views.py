"""Level views over the dependency graph, plus node and path filters.

All operations are pure: they build new View values and never touch the
graph or the input view.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import PathNotInGraph, UnknownEndpoint, UnknownNode, UnknownService
from .graph import (
    ControllerGroup,
    DependencyGraph,
    EdgeDirection,
    GraphEdge,
    GraphLevel,
    GraphNode,
    ServiceManifest,
)
from .ingest import ServicePath


@dataclass(frozen=True)
class ViewNode:
    """A graph node plus per-view presentation state."""

    node: GraphNode
    dimmed: bool = False
    on_path: bool = False

    @property
    def id(self) -> str:
        return self.node.id


@dataclass(frozen=True)
class PathHighlight:
    path_key: str
    node_ids: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]  # (from, to) per traversed hop pair


@dataclass(frozen=True)
class View:
    level: GraphLevel
    system_name: str
    nodes: tuple[ViewNode, ...]
    edges: tuple[GraphEdge, ...]
    controllers: tuple[ControllerGroup, ...]
    highlight: PathHighlight | None = None
    focus: str | None = None

    def node_ids(self) -> set[str]:
        return {vn.id for vn in self.nodes}


@dataclass(frozen=True)
class FunctionMessage:
    seq: int
    sender: str
    receiver: str


@dataclass(frozen=True)
class FunctionView:
    """Communication-diagram data for one service's internal flows."""

    service: str
    participants: tuple[str, ...]
    messages: tuple[FunctionMessage, ...]


def _project(graph: DependencyGraph) -> View:
    return View(
        level=graph.level,
        system_name=graph.system_name,
        nodes=tuple(ViewNode(node) for node in graph.nodes),
        edges=graph.edges,
        controllers=graph.controllers,
    )


def system_view(graph: DependencyGraph) -> View:
    if graph.level is not GraphLevel.SYSTEM:
        raise ValueError("system_view requires a graph built at system level")
    return _project(graph)


def service_view(graph: DependencyGraph) -> View:
    if graph.level is not GraphLevel.SERVICE:
        raise ValueError("service_view requires a graph built at service level")
    return _project(graph)


def function_view(
    manifest: ServiceManifest, service: str, endpoint: str | None = None
) -> FunctionView:
    """Message sequence for one service's internal flows.

    With ``endpoint`` given, only that endpoint's flow is used; otherwise the
    per-endpoint blocks are concatenated in declaration order. Messages are
    renumbered 1..N across the result.
    """
    svc = manifest.service(service)
    if svc is None:
        raise UnknownService(service)
    if endpoint is not None:
        endpoints = [ep for ep in svc.endpoints if ep.endpoint_id == endpoint]
        if not endpoints:
            raise UnknownEndpoint(service, endpoint)
    else:
        endpoints = list(svc.endpoints)

    participants: list[str] = []
    seen = set()

    def note(name: str) -> None:
        if name not in seen:
            seen.add(name)
            participants.append(name)

    messages = []
    seq = 0
    for ep in endpoints:
        for step in ep.flow:
            note(step.function)
            for callee in step.calls:
                note(callee)
                seq += 1
                messages.append(FunctionMessage(seq=seq, sender=step.function, receiver=callee))

    return FunctionView(
        service=service, participants=tuple(participants), messages=tuple(messages)
    )


def node_filter(view: View, node_id: str) -> View:
    """Reduce the view to one node, its direct neighbors (both directions),
    and only the edges incident to it."""
    if node_id not in view.node_ids():
        raise UnknownNode(node_id)
    incident = tuple(e for e in view.edges if node_id in (e.a, e.b))
    keep = {node_id}
    for edge in incident:
        keep.add(edge.a)
        keep.add(edge.b)
    return View(
        level=view.level,
        system_name=view.system_name,
        nodes=tuple(vn for vn in view.nodes if vn.id in keep),
        edges=incident,
        controllers=view.controllers,
        highlight=None,
        focus=node_id,
    )


def _edge_allows(edge: GraphEdge, src: str, dst: str) -> bool:
    if {edge.a, edge.b} != {src, dst}:
        return False
    if edge.direction is EdgeDirection.BIDIRECTIONAL:
        return True
    if edge.direction is EdgeDirection.A_TO_B:
        return edge.a == src
    return edge.b == src


def path_filter(view: View, path: ServicePath) -> View:
    """Highlight a path; every other node stays visible but dimmed."""
    ids = view.node_ids()
    hops = path.services
    for src, dst in zip(hops, hops[1:]):
        if not any(_edge_allows(e, src, dst) for e in view.edges):
            raise PathNotInGraph(f"{src}>{dst}")
    for hop in hops:
        if hop not in ids:
            raise PathNotInGraph(hop)

    on_path = set(hops)
    highlight = PathHighlight(
        path_key=path.key,
        node_ids=hops,
        edges=tuple(zip(hops, hops[1:])),
    )
    return View(
        level=view.level,
        system_name=view.system_name,
        nodes=tuple(
            replace(vn, dimmed=vn.id not in on_path, on_path=vn.id in on_path)
            for vn in view.nodes
        ),
        edges=view.edges,
        controllers=view.controllers,
        highlight=highlight,
        focus=view.focus,
    )
