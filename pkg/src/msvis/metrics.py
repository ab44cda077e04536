"""Traceability metrics: path hits, path length, service dependency rank.

Rankings are total orders (score descending, key/id ascending on ties) and
always contain every entry; consumers truncate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .graph import DependencyGraph, GraphLevel
from .ingest import ServicePath, TraceSet


class PathMetric(str, Enum):
    HITS = "hits"
    LENGTH = "length"


@dataclass(frozen=True)
class RankedPaths:
    metric: PathMetric
    entries: tuple[tuple[ServicePath, int], ...]


@dataclass(frozen=True)
class DependencyRank:
    entries: tuple[tuple[str, int], ...]


def _ranked(metric: PathMetric, scores: dict[str, int]) -> RankedPaths:
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return RankedPaths(
        metric=metric,
        entries=tuple((ServicePath.from_key(key), score) for key, score in ordered),
    )


def path_hits(traces: TraceSet) -> RankedPaths:
    """Weigh each distinct service path by how many traced branches took it."""
    counts = Counter(path.key for path in traces.paths)
    return _ranked(PathMetric.HITS, counts)


def path_length_rank(traces: TraceSet) -> RankedPaths:
    """Rank distinct service paths by their number of connected nodes."""
    lengths = {path.key: len(path.hops) for path in traces.paths}
    return _ranked(PathMetric.LENGTH, lengths)


def service_dependency_rank(graph: DependencyGraph) -> DependencyRank:
    """Rank services by dependents count (in-degree); exposes bottlenecks."""
    if graph.level is not GraphLevel.SERVICE:
        raise ValueError("service_dependency_rank requires a service-level graph")
    ordered = sorted(graph.nodes, key=lambda n: (-n.in_degree, n.id))
    return DependencyRank(entries=tuple((n.id, n.in_degree) for n in ordered))
