"""Command line interface.

Exit codes: 0 on success, 1 on domain errors (bad manifest content, unknown
names, failed simulation runs), 2 on usage and I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from . import __version__, serialize
from .errors import EngineError, PathNotInGraph
from .graph import GraphLevel, build_graph
from .ingest import ServicePath, parse_manifest, parse_traces
from .layout import layout_3d
from .metrics import path_hits, path_length_rank, service_dependency_rank
from .report import write_report
from .server import DEFAULT_PORT, PORT_ENV_VAR, Registry, create_app
from .simulation import RunState, config_from_dict, plan, run_to_completion
from .views import function_view, node_filter, path_filter, service_view, system_view

_METRIC_NAMES = (
    serialize.METRIC_PATH_HITS,
    serialize.METRIC_PATH_LENGTH,
    serialize.METRIC_SERVICE_DEPENDENCY,
)


def _load_manifest(path: str):
    return parse_manifest(Path(path).read_bytes())


def _load_traces(path: str):
    return parse_traces(Path(path).read_text())


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _cmd_validate(args) -> int:
    manifest = _load_manifest(args.manifest)
    system = build_graph(manifest, GraphLevel.SYSTEM)
    service = build_graph(manifest, GraphLevel.SERVICE)
    endpoints = sum(len(s.endpoints) for s in manifest.services)
    print(f"system: {manifest.system_name}")
    print(f"services: {len(manifest.services)}")
    print(f"endpoints: {endpoints}")
    print(f"controller groups: {len(system.nodes)}")
    print(f"system view: {len(system.nodes)} nodes, {len(system.edges)} edges")
    print(f"service view: {len(service.nodes)} nodes, {len(service.edges)} edges")
    return 0


def _cmd_view(args) -> int:
    manifest = _load_manifest(args.manifest)
    if args.level == "function":
        if not args.service:
            raise UsageError("--service is required for the function level")
        fv = function_view(manifest, args.service, args.endpoint)
        _emit(serialize.function_view_to_json(fv))
        return 0
    graph = build_graph(manifest, GraphLevel(args.level))
    view = system_view(graph) if args.level == "system" else service_view(graph)
    if args.focus:
        view = node_filter(view, args.focus)
    if args.path:
        view = path_filter(view, ServicePath.from_key(args.path))
    layout = layout_3d(view, seed=args.layout_seed) if view.nodes else None
    _emit(serialize.view_to_json(view, layout))
    return 0


def _cmd_metrics(args) -> int:
    manifest = _load_manifest(args.manifest)
    if args.metric == serialize.METRIC_SERVICE_DEPENDENCY:
        ranking = service_dependency_rank(build_graph(manifest, GraphLevel.SERVICE))
    else:
        if not args.traces:
            raise UsageError(f"--traces is required for the {args.metric} metric")
        traces = _load_traces(args.traces)
        if args.metric == serialize.METRIC_PATH_HITS:
            ranking = path_hits(traces)
        else:
            ranking = path_length_rank(traces)
    if args.json:
        _emit(serialize.ranking_to_json(ranking, top=args.top))
        return 0
    doc = serialize.ranking_to_dict(ranking, top=args.top)
    name_field = "id" if args.metric == serialize.METRIC_SERVICE_DEPENDENCY else "key"
    print(f"metric: {doc['metric']}")
    for entry in doc["entries"]:
        print(f"{entry['rank']:>4}  {entry['score']:>8}  {entry[name_field]}")
    return 0


def _cmd_simulate(args) -> int:
    manifest = _load_manifest(args.manifest)
    graph = build_graph(manifest, GraphLevel.SERVICE)
    raw = json.loads(Path(args.config).read_text())
    config = config_from_dict(raw)
    traces = _load_traces(args.traces) if args.traces else None
    run = plan(config, graph, traces)
    run_to_completion(run)
    if args.json:
        _emit(serialize.to_json(serialize.run_to_dict(run)))
    else:
        print(f"run: {run.id}")
        print(f"path: {run.resolved_path.key}")
        for event in run.events:
            line = f"  {event.step:>3} {event.subject_kind:<5} {event.subject:<24} {event.status}"
            if event.detail:
                line += f"  ({event.detail})"
            print(line)
        print(f"state: {run.state.value}")
    return 1 if run.state is RunState.FAILED else 0


def _port_available(host: str, port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            probe.bind((host, port))
        except OSError:
            return False
    return True


def _cmd_serve(args) -> int:
    registry = Registry()
    for path in args.manifest:
        manifest = parse_manifest(Path(path).read_bytes())
        if registry.register(manifest) is None:
            print(f"error: duplicate system in {path}", file=sys.stderr)
            return 1
    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    if not _port_available(args.host, port):
        print(f"error: port {port} is already in use", file=sys.stderr)
        return 1
    app = create_app(
        registry,
        ui_origin=args.ui_origin,
        ui_dir=args.ui_dir,
        snapshot_path=args.snapshot,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def _cmd_report(args) -> int:
    manifest = _load_manifest(args.manifest)
    traces = _load_traces(args.traces) if args.traces else None
    written = write_report(
        manifest,
        args.out,
        traces=traces,
        layout_seed=args.layout_seed,
        top=args.top,
    )
    for path in written:
        print(path)
    return 0


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msvis",
        description="Microservice dependency visualization engine.",
    )
    parser.add_argument("--version", action="version", version=f"msvis {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a manifest and summarize its graphs")
    p.add_argument("manifest")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("view", help="emit a view as JSON")
    p.add_argument("manifest")
    p.add_argument("--level", choices=["system", "service", "function"], default="service")
    p.add_argument("--service", help="service name (function level)")
    p.add_argument("--endpoint", help="endpoint id (function level)")
    p.add_argument("--focus", help="filter to one node and its neighbors")
    p.add_argument("--path", help="highlight a call path, e.g. a>b>c")
    p.add_argument("--layout-seed", type=int, default=0)
    p.set_defaults(func=_cmd_view)

    p = sub.add_parser("metrics", help="rank paths or services")
    p.add_argument("manifest")
    p.add_argument("--metric", choices=_METRIC_NAMES, required=True)
    p.add_argument("--traces", help="trace file (JSON lines)")
    p.add_argument("--top", type=int, default=None, help="limit to the top N entries")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("simulate", help="run a planned simulation to completion")
    p.add_argument("manifest")
    p.add_argument("--config", required=True, help="simulation config (JSON file)")
    p.add_argument("--traces", help="trace file, required for trace mode")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("manifest", nargs="*", help="manifests to register at startup")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui-origin", default="*", help="allowed CORS origin")
    p.add_argument("--ui-dir", help="static directory to serve at /")
    p.add_argument("--snapshot", help="snapshot file for registry persistence")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("report", help="render figures and rankings to a directory")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--traces")
    p.add_argument("--layout-seed", type=int, default=0)
    p.add_argument("--top", type=int, default=15)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
