"""Static report rendering: matplotlib figures plus CSV tables.

Gives the CLI an offline export path: node-link figures for the system and
service views (drawn from the same deterministic 3D layout the explorer
uses, projected to XY) and one CSV per metric ranking.
"""

from __future__ import annotations

import colorsys
import csv
import math
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .graph import EdgeDirection, GraphLevel, build_graph  # noqa: E402
from .layout import LayoutResult, layout_3d  # noqa: E402
from .metrics import path_hits, path_length_rank, service_dependency_rank  # noqa: E402
from .serialize import ranking_to_dict  # noqa: E402
from .views import View, service_view, system_view  # noqa: E402

_HSL_TOKEN = re.compile(r"hsl\(([0-9.]+),([0-9.]+)%,([0-9.]+)%\)")

_DIM_ALPHA = 0.25
_HIGHLIGHT_COLOR = "#d62728"


def color_token_to_rgb(token: str) -> tuple[float, float, float]:
    """Turn an "hsl(h,s%,l%)" token into an RGB triple for matplotlib."""
    match = _HSL_TOKEN.fullmatch(token)
    if not match:
        return (0.5, 0.5, 0.5)
    hue, sat, light = (float(g) for g in match.groups())
    return colorsys.hls_to_rgb(hue / 360.0, light / 100.0, sat / 100.0)


def _tick_segments(x0, y0, x1, y1, count):
    """Cross-line tick segments perpendicular to the edge, around its middle."""
    dx, dy = x1 - x0, y1 - y0
    length = math.hypot(dx, dy)
    if length == 0 or count == 0:
        return []
    ux, uy = dx / length, dy / length
    px, py = -uy, ux
    tick = 0.035
    gap = 0.06
    segments = []
    for i in range(count):
        offset = (i - (count - 1) / 2.0) * gap
        cx = (x0 + x1) / 2.0 + ux * offset
        cy = (y0 + y1) / 2.0 + uy * offset
        segments.append(((cx - px * tick, cy - py * tick), (cx + px * tick, cy + py * tick)))
    return segments


def render_view_figure(view: View, layout: LayoutResult, out_path) -> Path:
    """Draw the view as a 2D node-link figure (XY projection of the layout)."""
    out_path = Path(out_path)
    positions = {nid: (p[0], p[1]) for nid, p in layout.positions.items()}
    highlighted = set()
    if view.highlight is not None:
        highlighted = {frozenset(pair) for pair in view.highlight.edges}

    fig, ax = plt.subplots(figsize=(9, 9))
    for edge in view.edges:
        (x0, y0), (x1, y1) = positions[edge.a], positions[edge.b]
        on_path = frozenset((edge.a, edge.b)) in highlighted
        color = _HIGHLIGHT_COLOR if on_path else "0.45"
        width = 2.2 if on_path else 1.0
        arrows = []
        if edge.direction in (EdgeDirection.A_TO_B, EdgeDirection.BIDIRECTIONAL):
            arrows.append(((x0, y0), (x1, y1)))
        if edge.direction in (EdgeDirection.B_TO_A, EdgeDirection.BIDIRECTIONAL):
            arrows.append(((x1, y1), (x0, y0)))
        for (sx, sy), (tx, ty) in arrows:
            ax.annotate(
                "",
                xy=(tx, ty),
                xytext=(sx, sy),
                arrowprops=dict(
                    arrowstyle="-|>", color=color, lw=width, shrinkA=10, shrinkB=10
                ),
            )
        for (ax0, ay0), (ax1, ay1) in _tick_segments(x0, y0, x1, y1, edge.cross_lines):
            ax.plot([ax0, ax1], [ay0, ay1], color=color, lw=width)

    for vn in view.nodes:
        x, y = positions[vn.id]
        rgb = color_token_to_rgb(vn.node.color)
        alpha = _DIM_ALPHA if vn.dimmed else 1.0
        side = 120.0 * (1.0 + math.log1p(vn.node.size))
        ax.scatter(
            [x],
            [y],
            s=side,
            marker="s",
            color=[rgb],
            alpha=alpha,
            edgecolors=_HIGHLIGHT_COLOR if vn.on_path else "black",
            linewidths=1.6 if vn.on_path else 0.6,
            zorder=3,
        )
        ax.annotate(
            vn.id,
            (x, y),
            textcoords="offset points",
            xytext=(0, 9),
            ha="center",
            fontsize=7,
            alpha=max(alpha, 0.4),
            zorder=4,
        )

    title = f"{view.system_name} ({view.level.value} level)"
    if view.highlight is not None:
        title += f" | path {view.highlight.path_key}"
    if view.focus is not None:
        title += f" | focus {view.focus}"
    ax.set_title(title)
    ax.set_xlim(-1.25, 1.25)
    ax.set_ylim(-1.25, 1.25)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_ranking_chart(ranking, out_path, top: int = 15) -> Path:
    """Horizontal bar chart of the top ranking entries."""
    out_path = Path(out_path)
    doc = ranking_to_dict(ranking, top=top)
    labels = [e.get("key", e.get("id")) for e in doc["entries"]]
    scores = [e["score"] for e in doc["entries"]]

    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(labels) + 1.2)))
    ypos = range(len(labels))
    ax.barh(list(ypos), scores, color="#4878a8")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("score")
    ax.set_title(doc["metric"])
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def write_ranking_csv(ranking, out_path, top: int | None = None) -> Path:
    out_path = Path(out_path)
    doc = ranking_to_dict(ranking, top=top)
    key_column = "key" if doc["metric"] != "service-dependency" else "id"
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", key_column, "score"])
        for entry in doc["entries"]:
            writer.writerow([entry["rank"], entry[key_column], entry["score"]])
    return out_path


def write_report(
    manifest,
    out_dir,
    traces=None,
    layout_seed: int = 0,
    top: int = 15,
) -> list[Path]:
    """Render the full report bundle into ``out_dir``; returns written files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    for level, project in ((GraphLevel.SYSTEM, system_view), (GraphLevel.SERVICE, service_view)):
        graph = build_graph(manifest, level)
        if not graph.nodes:
            continue
        view = project(graph)
        layout = layout_3d(view, seed=layout_seed)
        written.append(
            render_view_figure(view, layout, out_dir / f"{level.value}_view.png")
        )

    service_graph = build_graph(manifest, GraphLevel.SERVICE)
    dep_rank = service_dependency_rank(service_graph)
    written.append(write_ranking_csv(dep_rank, out_dir / "service_dependency.csv"))
    written.append(
        render_ranking_chart(dep_rank, out_dir / "service_dependency.png", top=top)
    )

    if traces is not None:
        for name, ranking in (
            ("path_hits", path_hits(traces)),
            ("path_length", path_length_rank(traces)),
        ):
            written.append(write_ranking_csv(ranking, out_dir / f"{name}.csv"))
            written.append(
                render_ranking_chart(ranking, out_dir / f"{name}.png", top=top)
            )

    return written
