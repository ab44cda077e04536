"""Seeded force-directed 3D layout.

Spring attraction along edges (rest length shrinks as dependency count
grows), inverse-square repulsion between all pairs, fixed-step integration
with a linear cooling schedule. Everything is ordered and seeded, so the
same (view, seed, iterations) always yields bit-identical positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyView
from .views import View

MIN_SEPARATION = 0.01
DEFAULT_ITERATIONS = 300

_REST_BASE = 1.0
_SPRING = 0.08
_REPULSION = 0.05
_STEP = 0.9
_SEPARATION_PASSES = 100


@dataclass(frozen=True)
class LayoutResult:
    seed: int
    iterations: int
    positions: dict[str, tuple[float, float, float]]  # keyed by node id, sorted


def layout_3d(view: View, seed: int, iterations: int = DEFAULT_ITERATIONS) -> LayoutResult:
    """Position every view node inside the [-1, 1]^3 box.

    Raises EmptyView for a view without nodes. A post-pass pushes any pair
    closer than MIN_SEPARATION apart and re-normalizes into the box.
    """
    ids = sorted(view.node_ids())
    n = len(ids)
    if n == 0:
        raise EmptyView("cannot lay out a view with no nodes")
    if n == 1:
        return LayoutResult(seed=seed, iterations=iterations, positions={ids[0]: (0.0, 0.0, 0.0)})

    index = {node_id: i for i, node_id in enumerate(ids)}
    edges = sorted(
        (index[e.a], index[e.b], _REST_BASE / e.dependency_count) for e in view.edges
    )

    rng = np.random.default_rng(seed)
    pos = rng.normal(size=(n, 3))
    norms = np.linalg.norm(pos, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    pos = pos / norms  # seeded start on the unit sphere

    eye = np.eye(n, dtype=bool)
    for it in range(iterations):
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        dist[eye] = 1.0
        dist = np.maximum(dist, 1e-9)

        # Inverse-square repulsion between all pairs.
        push = _REPULSION / (dist**2)
        push[eye] = 0.0
        force = np.einsum("ij,ijk->ik", push / dist, diff)

        # Spring attraction along edges toward the rest length.
        for i, j, rest in edges:
            delta = pos[i] - pos[j]
            d = max(float(np.linalg.norm(delta)), 1e-9)
            pull = _SPRING * (d - rest) * (delta / d)
            force[i] -= pull
            force[j] += pull

        temp = _STEP * (1.0 - it / iterations)
        norms = np.linalg.norm(force, axis=1, keepdims=True)
        norms = np.maximum(norms, 1e-9)
        pos = pos + force / norms * np.minimum(norms, temp)

    pos = _normalize(pos)
    pos = _enforce_separation(pos)
    positions = {node_id: tuple(float(v) for v in pos[index[node_id]]) for node_id in ids}
    return LayoutResult(seed=seed, iterations=iterations, positions=positions)


def _normalize(pos: np.ndarray) -> np.ndarray:
    center = (pos.max(axis=0) + pos.min(axis=0)) / 2.0
    extent = float((pos.max(axis=0) - pos.min(axis=0)).max()) / 2.0
    if extent == 0.0:
        return np.zeros_like(pos)
    return (pos - center) / extent


def _enforce_separation(pos: np.ndarray) -> np.ndarray:
    n = len(pos)
    pos = pos.copy()
    for _ in range(_SEPARATION_PASSES):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                delta = pos[i] - pos[j]
                d = float(np.linalg.norm(delta))
                if d >= MIN_SEPARATION:
                    continue
                moved = True
                if d == 0.0:
                    # Coincident points: split along a fixed axis per pair.
                    direction = np.zeros(3)
                    direction[(i + j) % 3] = 1.0
                else:
                    direction = delta / d
                shift = (MIN_SEPARATION - d) / 2.0 + 1e-6
                pos[i] = np.clip(pos[i] + direction * shift, -1.0, 1.0)
                pos[j] = np.clip(pos[j] - direction * shift, -1.0, 1.0)
        if not moved:
            break
    return pos
