"""Dependency-graph engine and interactive explorer for microservice systems.

Builds system-, service-, and function-level views from a declarative service
manifest, ingests distributed traces, ranks call paths, simulates request
flows with failure injection, and lays the graph out in 3D deterministically.
"""

from .errors import (
    BadRoute,
    DanglingCallTarget,
    DuplicateService,
    EmptyInput,
    EmptyTraceSet,
    EmptyView,
    EngineError,
    InvalidConfig,
    PathNotInGraph,
    SchemaError,
    UnknownEndpoint,
    UnknownNode,
    UnknownService,
    UnknownSystem,
    UnknownTrace,
)
from .graph import (
    DependencyGraph,
    EdgeDirection,
    GraphEdge,
    GraphLevel,
    GraphNode,
    NodeKind,
    ServiceManifest,
    build_graph,
    cross_lines_for,
    node_size,
)
from .ingest import (
    ServicePath,
    Span,
    TraceSet,
    build_trace_set,
    parse_manifest,
    parse_traces,
)
from .layout import LayoutResult, layout_3d
from .metrics import (
    DependencyRank,
    PathMetric,
    RankedPaths,
    path_hits,
    path_length_rank,
    service_dependency_rank,
)
from .simulation import (
    EventStatus,
    FailureKind,
    FailureSpec,
    FailureTarget,
    RunState,
    SimEvent,
    SimulationConfig,
    SimulationRun,
    StartMode,
    config_from_dict,
    plan,
    run_to_completion,
)
from .views import (
    FunctionView,
    View,
    function_view,
    node_filter,
    path_filter,
    service_view,
    system_view,
)

__version__ = "0.1.0"

__all__ = [
    "BadRoute",
    "DanglingCallTarget",
    "DependencyGraph",
    "DependencyRank",
    "DuplicateService",
    "EdgeDirection",
    "EmptyInput",
    "EmptyTraceSet",
    "EmptyView",
    "EngineError",
    "EventStatus",
    "FailureKind",
    "FailureSpec",
    "FailureTarget",
    "FunctionView",
    "GraphEdge",
    "GraphLevel",
    "GraphNode",
    "InvalidConfig",
    "LayoutResult",
    "NodeKind",
    "PathMetric",
    "PathNotInGraph",
    "RankedPaths",
    "RunState",
    "SchemaError",
    "ServiceManifest",
    "ServicePath",
    "SimEvent",
    "SimulationConfig",
    "SimulationRun",
    "Span",
    "StartMode",
    "TraceSet",
    "UnknownEndpoint",
    "UnknownNode",
    "UnknownService",
    "UnknownSystem",
    "UnknownTrace",
    "View",
    "build_graph",
    "build_trace_set",
    "config_from_dict",
    "cross_lines_for",
    "function_view",
    "layout_3d",
    "node_filter",
    "node_size",
    "parse_manifest",
    "parse_traces",
    "path_filter",
    "path_hits",
    "path_length_rank",
    "plan",
    "run_to_completion",
    "service_dependency_rank",
    "service_view",
    "system_view",
]
