"""
Level-set extraction on regular grids: marching squares with an asymptotic decider
in two dimensions, edge-crossing point clouds in three.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from isostables.core.errors import ConfigError, EmptyLevel
from isostables.field.models import ContourSet, ScalarField
from isostables.field.schemas import Quantity

logger = logging.getLogger(__name__)

Node = Tuple[int, int]
EdgeKey = Tuple[Node, Node]

# cell corners counter-clockwise from (i, j)
CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))
# edge k joins corners k and k+1
EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))
# the two edges touching each corner
CORNER_EDGES = ((3, 0), (0, 1), (1, 2), (2, 3))


def wrapped_difference(phase: np.ndarray, level: float) -> np.ndarray:
    """angle(exp(i (phase - level))) in (-pi, pi]."""
    return np.angle(np.exp(1j * (phase - level)))


# ===============================================
# Two dimensions
# ===============================================

def _saddle_value(v: Sequence[float]) -> float:
    denominator = v[0] + v[2] - v[1] - v[3]
    if denominator == 0:
        return float(np.mean(v))
    return (v[0] * v[2] - v[1] * v[3]) / denominator


def _cell_segments(v: Sequence[float], level: float) -> List[Tuple[int, int]]:
    above = [value > level for value in v]
    crossed = [k for k, (p, q) in enumerate(EDGES) if above[p] != above[q]]
    if len(crossed) == 2:
        return [tuple(crossed)]
    if len(crossed) == 4:
        # isolate the corners on the opposite side of the saddle
        center_above = _saddle_value(v) > level
        isolated = [k for k in range(4) if above[k] != center_above]
        return [CORNER_EDGES[k] for k in isolated]
    return []


def _chain(segments: List[Tuple[EdgeKey, EdgeKey]]) -> List[List[EdgeKey]]:
    """Join segments sharing an edge into polylines; closed loops repeat their first key."""
    adjacency: Dict[EdgeKey, List[int]] = defaultdict(list)
    for index, (a, b) in enumerate(segments):
        adjacency[a].append(index)
        adjacency[b].append(index)
    used = [False] * len(segments)

    def walk(start: EdgeKey) -> List[EdgeKey]:
        line, key = [start], start
        while True:
            following = next((s for s in adjacency[key] if not used[s]), None)
            if following is None:
                return line
            used[following] = True
            a, b = segments[following]
            key = b if a == key else a
            line.append(key)

    lines = []
    for key, members in adjacency.items():
        if len(members) == 1 and not used[members[0]]:
            lines.append(walk(key))
    for index, (a, _) in enumerate(segments):
        if not used[index]:
            lines.append(walk(a))
    return lines


def marching_squares(values: np.ndarray, axes: Sequence[np.ndarray], level: float,
                     mask: Optional[np.ndarray] = None) -> List[np.ndarray]:
    """
    Polylines of the level set of `values` (shape (nx, ny), 'ij' indexing over
    `axes`). Cells with a non-finite corner, or flagged in `mask` (shape
    (nx-1, ny-1)), are skipped.
    """
    x_axis, y_axis = axes
    nx, ny = values.shape
    finite = np.isfinite(values)
    crossings: Dict[EdgeKey, np.ndarray] = {}
    segments: List[Tuple[EdgeKey, EdgeKey]] = []

    def crossing(p: Node, q: Node) -> EdgeKey:
        key = (p, q) if p <= q else (q, p)
        if key not in crossings:
            vp, vq = values[p], values[q]
            t = (level - vp) / (vq - vp)
            start = np.array([x_axis[p[0]], y_axis[p[1]]])
            end = np.array([x_axis[q[0]], y_axis[q[1]]])
            crossings[key] = start + t * (end - start)
        return key

    for i in range(nx - 1):
        for j in range(ny - 1):
            if mask is not None and mask[i, j]:
                continue
            nodes = [(i + di, j + dj) for di, dj in CORNERS]
            if not all(finite[node] for node in nodes):
                continue
            corner_values = [values[node] for node in nodes]
            for edge_a, edge_b in _cell_segments(corner_values, level):
                key_a = crossing(*(nodes[c] for c in EDGES[edge_a]))
                key_b = crossing(*(nodes[c] for c in EDGES[edge_b]))
                segments.append((key_a, key_b))

    return [np.array([crossings[key] for key in line]) for line in _chain(segments)]


# ===============================================
# Three dimensions
# ===============================================

def edge_crossings(values: np.ndarray, axes: Sequence[np.ndarray], level: float,
                   max_jump: Optional[float] = None) -> np.ndarray:
    """Linear-interpolated level crossings on every grid edge, shape (m, 3)."""
    clouds = []
    for axis in range(values.ndim):
        lower = [slice(None)] * values.ndim
        upper = [slice(None)] * values.ndim
        lower[axis], upper[axis] = slice(None, -1), slice(1, None)
        v0, v1 = values[tuple(lower)], values[tuple(upper)]
        hit = np.isfinite(v0) & np.isfinite(v1) & ((v0 > level) != (v1 > level))
        if max_jump is not None:
            hit &= np.abs(v1 - v0) <= max_jump
        index = np.nonzero(hit)
        t = (level - v0[index]) / (v1[index] - v0[index])
        coords = []
        for d, grid_axis in enumerate(axes):
            base = grid_axis[index[d]]
            if d == axis:
                base = base + t * (grid_axis[index[d] + 1] - base)
            coords.append(base)
        clouds.append(np.stack(coords, axis=1))
    return np.concatenate(clouds, axis=0) if clouds else np.empty((0, values.ndim))


# ===============================================
# Contour sets
# ===============================================

def extract_contours(field: ScalarField, levels: Sequence[float],
                     quantity: Quantity = Quantity.MAGNITUDE) -> ContourSet:
    """
    Level sets of a regular-grid field. Phase levels are taken on the wrapped
    difference to the level so the 2 pi branch cut never produces segments.
    Levels without any crossing are listed in `empty_levels` and logged.
    """
    if not field.grid.is_regular:
        raise ConfigError("Contours need a regular grid", grid="points")
    quantity = Quantity(quantity)
    values = field.gridded(quantity)
    axes = field.grid.axes()
    finite = values[np.isfinite(values)]
    low, high = (float(finite.min()), float(finite.max())) if finite.size else (np.nan, np.nan)

    polylines: List[List[np.ndarray]] = []
    clouds: List[np.ndarray] = []
    empty: List[float] = []

    for level in levels:
        level = float(level)
        if quantity is Quantity.PHASE:
            target, cut = wrapped_difference(values, level), 0.0
        else:
            target, cut = values, level

        if values.ndim == 2:
            mask = None
            if quantity is Quantity.PHASE:
                corners = np.stack([target[:-1, :-1], target[1:, :-1], target[1:, 1:], target[:-1, 1:]])
                mask = (corners.max(axis=0) - corners.min(axis=0)) > np.pi
            lines = marching_squares(target, axes, cut, mask) if finite.size else []
            polylines.append(lines)
            found = bool(lines)
        else:
            max_jump = np.pi if quantity is Quantity.PHASE else None
            cloud = edge_crossings(target, axes, cut, max_jump) if finite.size else np.empty((0, 3))
            clouds.append(cloud)
            found = cloud.shape[0] > 0

        if not found:
            empty.append(level)
            detail = EmptyLevel(level=level, quantity=quantity.value, range=[low, high]).detail
            logger.warning(f"{detail['message']}: {quantity.value} level {level} (field range [{low}, {high}])")

    return ContourSet(
        quantity=quantity,
        levels=[float(level) for level in levels],
        polylines=polylines,
        point_clouds=clouds,
        empty_levels=empty,
        dim=values.ndim,
    )
