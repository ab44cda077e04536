"""Domain model and dependency-graph construction.

Builds controller groups, service/controller nodes with degree-derived
sizes, and aggregated directional edges from a validated service manifest.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from enum import Enum

from .errors import DanglingCallTarget

SIZE_CAP = 1_000_000
MAX_CROSS_LINES = 3

# Fixed palette components; only the hue varies per controller group.
PALETTE_SATURATION = 65
PALETTE_LIGHTNESS = 55


class NodeKind(str, Enum):
    SERVICE = "service"
    CONTROLLER = "controller"


class EdgeDirection(str, Enum):
    A_TO_B = "a_to_b"
    B_TO_A = "b_to_a"
    BIDIRECTIONAL = "bidirectional"


class GraphLevel(str, Enum):
    SYSTEM = "system"
    SERVICE = "service"


# ---------------------------------------------------------------------------
# Manifest model


@dataclass(frozen=True)
class CallDecl:
    """One declared call from an endpoint to another service's endpoint."""

    service: str
    endpoint: str


@dataclass(frozen=True)
class FunctionStep:
    """One step of an endpoint's internal flow."""

    function: str
    seq: int
    calls: tuple[str, ...] = ()


@dataclass(frozen=True)
class FunctionDecl:
    name: str


@dataclass(frozen=True)
class EndpointDecl:
    method: str
    path: str
    calls: tuple[CallDecl, ...] = ()
    flow: tuple[FunctionStep, ...] = ()

    @property
    def endpoint_id(self) -> str:
        return f"{self.method} {self.path}"


@dataclass(frozen=True)
class ServiceDecl:
    name: str
    base_route: str
    endpoints: tuple[EndpointDecl, ...] = ()
    functions: tuple[FunctionDecl, ...] = ()
    # Explicit grouping override; by default services group by base_route.
    controller: str | None = None

    @property
    def controller_key(self) -> str:
        return self.controller if self.controller else self.base_route


@dataclass(frozen=True)
class ServiceManifest:
    system_name: str
    services: tuple[ServiceDecl, ...] = ()

    def service(self, name: str) -> ServiceDecl | None:
        for svc in self.services:
            if svc.name == name:
                return svc
        return None

    def service_names(self) -> set[str]:
        return {svc.name for svc in self.services}


# ---------------------------------------------------------------------------
# Graph model


@dataclass(frozen=True)
class ControllerGroup:
    key: str
    members: tuple[str, ...]
    hue: float = 0.0
    color: str = ""


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: NodeKind
    controller_key: str
    in_degree: int
    out_degree: int
    size: int
    color: str
    # Self-directed dependencies are node metadata, never edges.
    self_calls: int = 0


@dataclass(frozen=True)
class GraphEdge:
    a: str
    b: str
    direction: EdgeDirection
    dependency_count: int
    cross_lines: int


@dataclass(frozen=True)
class DependencyGraph:
    system_name: str
    level: GraphLevel
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    controllers: tuple[ControllerGroup, ...]

    def node(self, node_id: str) -> GraphNode | None:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def node_ids(self) -> set[str]:
        return {node.id for node in self.nodes}


# ---------------------------------------------------------------------------
# Operations


def node_size(x: int, y: int) -> int:
    """Visual size for a node with ``x`` dependents and ``y`` dependencies.

    max(x**y, x, y) while both are positive; with exactly one zero the other
    value is the reference; an isolated node gets the baseline 1. The result
    saturates at SIZE_CAP so extreme fan-in/fan-out stays renderable.
    """
    if x == 0 and y == 0:
        return 1
    if x == 0 or y == 0:
        return min(max(x, y), SIZE_CAP)
    if x >= 2 and y >= 20:
        # 2**20 already exceeds the cap; skip the giant exponentiation.
        return SIZE_CAP
    return min(max(x**y, x, y), SIZE_CAP)


def cross_lines_for(dependency_count: int) -> int:
    """Tick count for an edge; suppressed (0) above MAX_CROSS_LINES."""
    if 0 < dependency_count <= MAX_CROSS_LINES:
        return dependency_count
    return 0


def derive_controllers(manifest: ServiceManifest) -> tuple[ControllerGroup, ...]:
    """Partition services into controller groups by shared routing key."""
    members: dict[str, list[str]] = defaultdict(list)
    for svc in manifest.services:
        members[svc.controller_key].append(svc.name)
    return tuple(
        ControllerGroup(key=key, members=tuple(sorted(names)))
        for key, names in sorted(members.items())
    )


def assign_colors(groups: tuple[ControllerGroup, ...]) -> tuple[ControllerGroup, ...]:
    """Give each group an evenly spaced hue; deterministic for a given order.

    Hues are i * 360 / n, so tokens stay pairwise distinct for n <= 360.
    """
    n = len(groups)
    return tuple(
        replace(group, hue=i * 360.0 / n, color=_hsl_token(i * 360.0 / n))
        for i, group in enumerate(groups)
    )


def _hsl_token(hue: float) -> str:
    text = f"{hue:.2f}".rstrip("0").rstrip(".")
    return f"hsl({text},{PALETTE_SATURATION}%,{PALETTE_LIGHTNESS}%)"


def distinct_calls(manifest: ServiceManifest) -> set[tuple[str, str, str, str]]:
    """All distinct (caller, caller endpoint id, callee, callee endpoint id)."""
    calls = set()
    for svc in manifest.services:
        for ep in svc.endpoints:
            for call in ep.calls:
                calls.add((svc.name, ep.endpoint_id, call.service, call.endpoint))
    return calls


def build_graph(manifest: ServiceManifest, level: GraphLevel | str) -> DependencyGraph:
    """Build the dependency graph at the requested level.

    Service level has one node per service and aggregates distinct
    endpoint-call pairs into edge dependency counts. System level has one
    node per controller group and counts distinct cross-group service pairs.
    """
    level = GraphLevel(level)
    groups = assign_colors(derive_controllers(manifest))
    names = manifest.service_names()
    calls = distinct_calls(manifest)
    for _, _, callee, _ in calls:
        if callee not in names:
            # Validation blocks this earlier; kept as a defensive check.
            raise DanglingCallTarget(callee)
    if level is GraphLevel.SERVICE:
        return _service_graph(manifest, groups, calls)
    return _system_graph(manifest, groups, calls)


def _edges_from_pairs(
    pair_items: dict[tuple[str, str], set],
    callers_of_pair: dict[tuple[str, str], set[str]],
) -> tuple[GraphEdge, ...]:
    edges = []
    for (a, b), items in sorted(pair_items.items()):
        callers = callers_of_pair[(a, b)]
        if a in callers and b in callers:
            direction = EdgeDirection.BIDIRECTIONAL
        elif a in callers:
            direction = EdgeDirection.A_TO_B
        else:
            direction = EdgeDirection.B_TO_A
        count = len(items)
        edges.append(GraphEdge(a, b, direction, count, cross_lines_for(count)))
    return tuple(edges)


def _service_graph(manifest, groups, calls) -> DependencyGraph:
    group_of = {name: g.key for g in groups for name in g.members}
    color_of = {g.key: g.color for g in groups}

    directed = {(c, t) for c, _, t, _ in calls if c != t}
    in_deg = Counter(t for _, t in directed)
    out_deg = Counter(c for c, _ in directed)
    self_calls = Counter(c for c, _, t, _ in calls if c == t)

    nodes = tuple(
        GraphNode(
            id=svc.name,
            kind=NodeKind.SERVICE,
            controller_key=group_of[svc.name],
            in_degree=in_deg[svc.name],
            out_degree=out_deg[svc.name],
            size=node_size(in_deg[svc.name], out_deg[svc.name]),
            color=color_of[group_of[svc.name]],
            self_calls=self_calls[svc.name],
        )
        for svc in sorted(manifest.services, key=lambda s: s.name)
    )

    pair_items: dict[tuple[str, str], set] = defaultdict(set)
    pair_callers: dict[tuple[str, str], set[str]] = defaultdict(set)
    for c, cep, t, tep in calls:
        if c == t:
            continue
        pair = (min(c, t), max(c, t))
        pair_items[pair].add((c, cep, t, tep))
        pair_callers[pair].add(c)

    return DependencyGraph(
        system_name=manifest.system_name,
        level=GraphLevel.SERVICE,
        nodes=nodes,
        edges=_edges_from_pairs(pair_items, pair_callers),
        controllers=groups,
    )


def _system_graph(manifest, groups, calls) -> DependencyGraph:
    group_of = {name: g.key for g in groups for name in g.members}
    color_of = {g.key: g.color for g in groups}

    service_pairs = {(c, t) for c, _, t, _ in calls}
    directed = {
        (group_of[c], group_of[t])
        for c, t in service_pairs
        if group_of[c] != group_of[t]
    }
    in_deg = Counter(t for _, t in directed)
    out_deg = Counter(c for c, _ in directed)
    self_calls = Counter(
        group_of[c] for c, t in service_pairs if group_of[c] == group_of[t]
    )

    nodes = tuple(
        GraphNode(
            id=g.key,
            kind=NodeKind.CONTROLLER,
            controller_key=g.key,
            in_degree=in_deg[g.key],
            out_degree=out_deg[g.key],
            size=node_size(in_deg[g.key], out_deg[g.key]),
            color=color_of[g.key],
            self_calls=self_calls[g.key],
        )
        for g in groups
    )

    pair_items: dict[tuple[str, str], set] = defaultdict(set)
    pair_callers: dict[tuple[str, str], set[str]] = defaultdict(set)
    for c, t in service_pairs:
        gc, gt = group_of[c], group_of[t]
        if gc == gt:
            continue
        pair = (min(gc, gt), max(gc, gt))
        pair_items[pair].add((c, t))
        pair_callers[pair].add(gc)

    return DependencyGraph(
        system_name=manifest.system_name,
        level=GraphLevel.SYSTEM,
        nodes=nodes,
        edges=_edges_from_pairs(pair_items, pair_callers),
        controllers=groups,
    )
