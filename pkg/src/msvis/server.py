"""HTTP surface over the engine: registry, views, filters, metrics, and
simulation playback over Server-Sent Events.

GET responses are rendered through the canonical serializer, so identical
requests (same seed) return byte-identical bodies. The registry lives in
memory; an optional snapshot file restores it across restarts.
"""

from __future__ import annotations

import json
import re
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response, StreamingResponse

from . import serialize
from .errors import (
    EmptyInput,
    EmptyTraceSet,
    EngineError,
    InvalidConfig,
    PathNotInGraph,
    UnknownEndpoint,
    UnknownNode,
    UnknownService,
    UnknownSystem,
    UnknownTrace,
)
from .graph import GraphLevel, ServiceManifest, build_graph
from .ingest import ServicePath, build_trace_set, manifest_from_dict, parse_manifest, parse_traces, span_from_dict
from .layout import layout_3d
from .metrics import path_hits, path_length_rank, service_dependency_rank
from .simulation import config_from_dict, plan, run_to_completion
from .views import function_view, node_filter, path_filter, service_view, system_view

DEFAULT_PORT = 7400
PORT_ENV_VAR = "MSVIS_PORT"

_BAD_REQUEST = 400
_NOT_FOUND = 404
_CONFLICT = 409
_UNPROCESSABLE = 422


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "system"


class SystemEntry:
    """One registered system: manifest, built graphs, traces, simulations."""

    def __init__(self, system_id: str, manifest: ServiceManifest):
        self.system_id = system_id
        self.manifest = manifest
        self.graphs = {level: build_graph(manifest, level) for level in GraphLevel}
        self.spans = []
        self.trace_set = None
        self.malformed_total = 0
        self.simulations = {}

    def merge_traces(self, text) -> dict:
        """Parse and merge one trace upload; prior state survives a failure."""
        fresh = parse_traces(text)
        report = {
            "traces": len(fresh.traces),
            "paths": len(fresh.paths),
            "malformed_count": fresh.malformed_count,
        }
        spans = self.spans + serialize.trace_set_spans(fresh)
        malformed = self.malformed_total + fresh.malformed_count
        combined = build_trace_set(spans, malformed_count=malformed)
        # Mutate only after the whole rebuild succeeded.
        self.spans = spans
        self.malformed_total = malformed
        self.trace_set = combined
        return report


class Registry:
    def __init__(self):
        self.systems: dict[str, SystemEntry] = {}
        self._lock = threading.Lock()

    def register(self, manifest: ServiceManifest) -> SystemEntry | None:
        """Register a manifest; None when the derived id is already taken."""
        system_id = slugify(manifest.system_name)
        entry = SystemEntry(system_id, manifest)
        with self._lock:
            if system_id in self.systems:
                return None
            self.systems[system_id] = entry
        return entry

    def get(self, system_id: str) -> SystemEntry | None:
        return self.systems.get(system_id)

    def save_snapshot(self, path) -> None:
        doc = {
            "systems": [
                {
                    "manifest": serialize.manifest_to_dict(entry.manifest),
                    "spans": [serialize.span_to_dict(s) for s in entry.spans],
                    "malformed_count": entry.malformed_total,
                }
                for _, entry in sorted(self.systems.items())
            ]
        }
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")

    def load_snapshot(self, path) -> None:
        doc = json.loads(Path(path).read_text())
        for item in doc.get("systems", []):
            entry = self.register(manifest_from_dict(item["manifest"]))
            if entry is None:
                continue
            spans = [span_from_dict(raw) for raw in item.get("spans", [])]
            entry.spans = [s for s in spans if s is not None]
            entry.malformed_total = item.get("malformed_count", 0)
            if entry.spans or entry.malformed_total:
                entry.trace_set = build_trace_set(
                    entry.spans, malformed_count=entry.malformed_total
                )


def _json_response(text: str, status: int = 200) -> Response:
    return Response(content=text, status_code=status, media_type="application/json")


def _error_response(exc: Exception, status: int) -> Response:
    body = serialize.to_json({"error": type(exc).__name__, "detail": str(exc)})
    return _json_response(body, status)


_ERROR_STATUS = (
    ((UnknownSystem, UnknownService, UnknownEndpoint, UnknownNode, UnknownTrace), _NOT_FOUND),
    ((PathNotInGraph, InvalidConfig, EmptyTraceSet), _UNPROCESSABLE),
    ((EmptyInput,), _BAD_REQUEST),
)


def _status_for(exc: EngineError) -> int:
    for types, status in _ERROR_STATUS:
        if isinstance(exc, types):
            return status
    return _BAD_REQUEST


def create_app(
    registry: Registry | None = None,
    ui_origin: str = "*",
    ui_dir=None,
    snapshot_path=None,
) -> FastAPI:
    registry = registry if registry is not None else Registry()
    if snapshot_path and Path(snapshot_path).exists():
        registry.load_snapshot(snapshot_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if snapshot_path:
            registry.save_snapshot(snapshot_path)

    app = FastAPI(title="msvis", lifespan=lifespan, docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def entry_or_none(system_id: str) -> SystemEntry | None:
        return registry.get(system_id)

    @app.get("/api/systems")
    def list_systems():
        doc = {
            "systems": [
                {
                    "system_id": system_id,
                    "system_name": entry.manifest.system_name,
                    "services": len(entry.manifest.services),
                }
                for system_id, entry in sorted(registry.systems.items())
            ]
        }
        return _json_response(serialize.to_json(doc))

    @app.post("/api/systems")
    async def register_system(request: Request):
        body = await request.body()
        try:
            manifest = parse_manifest(body)
        except EngineError as exc:
            return _error_response(exc, _BAD_REQUEST)
        entry = registry.register(manifest)
        if entry is None:
            body = serialize.to_json(
                {
                    "error": "DuplicateSystem",
                    "detail": f"system '{slugify(manifest.system_name)}' is already registered",
                }
            )
            return _json_response(body, _CONFLICT)
        return _json_response(
            serialize.to_json({"system_id": entry.system_id}), status=201
        )

    @app.post("/api/systems/{system_id}/traces")
    async def ingest_traces(system_id: str, request: Request):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        body = await request.body()
        try:
            report = entry.merge_traces(body)
        except EngineError as exc:
            return _error_response(exc, _status_for(exc))
        return _json_response(serialize.to_json(report))

    @app.get("/api/systems/{system_id}/views/function/{service}")
    def get_function_view(system_id: str, service: str, endpoint: str | None = None):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        try:
            fv = function_view(entry.manifest, service, endpoint)
        except EngineError as exc:
            return _error_response(exc, _status_for(exc))
        return _json_response(serialize.function_view_to_json(fv))

    @app.get("/api/systems/{system_id}/views/{level}")
    def get_view(system_id: str, level: str, layout_seed: int = 0):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        if level == GraphLevel.SYSTEM.value:
            view = system_view(entry.graphs[GraphLevel.SYSTEM])
        elif level == GraphLevel.SERVICE.value:
            view = service_view(entry.graphs[GraphLevel.SERVICE])
        else:
            return _error_response(UnknownNode(level), _NOT_FOUND)
        layout = layout_3d(view, seed=layout_seed) if view.nodes else None
        return _json_response(serialize.view_to_json(view, layout))

    @app.get("/api/systems/{system_id}/filter/node/{node_id}")
    def get_node_filter(system_id: str, node_id: str, layout_seed: int = 0):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        try:
            view = node_filter(service_view(entry.graphs[GraphLevel.SERVICE]), node_id)
        except EngineError as exc:
            return _error_response(exc, _status_for(exc))
        layout = layout_3d(view, seed=layout_seed)
        return _json_response(serialize.view_to_json(view, layout))

    @app.get("/api/systems/{system_id}/filter/path")
    def get_path_filter(system_id: str, path: str, layout_seed: int = 0):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        try:
            service_path = ServicePath.from_key(path)
        except ValueError as exc:
            return _error_response(PathNotInGraph(str(exc)), _UNPROCESSABLE)
        try:
            view = path_filter(service_view(entry.graphs[GraphLevel.SERVICE]), service_path)
        except EngineError as exc:
            return _error_response(exc, _status_for(exc))
        layout = layout_3d(view, seed=layout_seed)
        return _json_response(serialize.view_to_json(view, layout))

    @app.get("/api/systems/{system_id}/metrics/{metric}")
    def get_metric(system_id: str, metric: str):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        service_graph = entry.graphs[GraphLevel.SERVICE]
        traces = entry.trace_set
        if metric == serialize.METRIC_SERVICE_DEPENDENCY:
            ranking = service_dependency_rank(service_graph)
        elif metric == serialize.METRIC_PATH_HITS:
            if traces is None:
                return _json_response(
                    serialize.to_json({"metric": metric, "entries": []})
                )
            ranking = path_hits(traces)
        elif metric == serialize.METRIC_PATH_LENGTH:
            if traces is None:
                return _json_response(
                    serialize.to_json({"metric": metric, "entries": []})
                )
            ranking = path_length_rank(traces)
        else:
            return _error_response(UnknownNode(metric), _NOT_FOUND)
        return _json_response(serialize.ranking_to_json(ranking))

    @app.post("/api/systems/{system_id}/simulations")
    async def create_simulation(system_id: str, request: Request):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        try:
            raw = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _error_response(InvalidConfig(f"not valid JSON: {exc}"), _UNPROCESSABLE)
        try:
            config = config_from_dict(raw)
            run = plan(config, entry.graphs[GraphLevel.SERVICE], entry.trace_set)
        except EngineError as exc:
            return _error_response(exc, _status_for(exc))
        # Runs are deterministic; completing now makes replays trivial.
        run_to_completion(run)
        entry.simulations[run.id] = run
        return _json_response(serialize.to_json({"sim_id": run.id}), status=201)

    @app.get("/api/systems/{system_id}/simulations/{sim_id}")
    def get_simulation(system_id: str, sim_id: str):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        run = entry.simulations.get(sim_id)
        if run is None:
            return _error_response(UnknownTrace(sim_id), _NOT_FOUND)
        return _json_response(serialize.to_json(serialize.run_to_dict(run)))

    @app.get("/api/systems/{system_id}/simulations/{sim_id}/events")
    def stream_simulation(system_id: str, sim_id: str):
        entry = entry_or_none(system_id)
        if entry is None:
            return _error_response(UnknownSystem(system_id), _NOT_FOUND)
        run = entry.simulations.get(sim_id)
        if run is None:
            return _error_response(UnknownTrace(sim_id), _NOT_FOUND)
        tick_seconds = run.config.tick / 1000.0

        def generate():
            for i, event in enumerate(run.events):
                if i and tick_seconds > 0:
                    time.sleep(tick_seconds)
                data = json.dumps(
                    serialize.event_to_dict(event), separators=(",", ":")
                )
                yield f"event: sim\ndata: {data}\n\n"
            state = json.dumps({"state": run.state.value}, separators=(",", ":"))
            yield f"event: state\ndata: {state}\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
