"""Marching-squares iso-contours with subpixel edge interpolation.

Pixel centers sit at integer coordinates (x = column, y = row). Each
2x2 block of pixels forms a cell; a corner is inside when value >= level.
Crossing points are linearly interpolated along cell edges, so every
emitted point lies on a horizontal or vertical edge and interpolating
the field along that edge at the point reproduces the level exactly.
The two ambiguous saddle cases are resolved by the cell-center average:
the mean of the four corners decides which diagonal pairing is used.
Cells touching a masked pixel are skipped. Segments are chained into
polylines by matching shared endpoints (adjacent cells interpolate the
shared edge from identical inputs, so the coordinates match bitwise).
"""

from __future__ import annotations

from collections import Counter, defaultdict

import numpy as np

from .core import ScalarField

Point = tuple[float, float]
Polyline = list[Point]


def _interp(c0: float, c1: float, level: float) -> float:
    return (level - c0) / (c1 - c0)


def _cell_segments(vals, level, r, c) -> list[tuple[Point, Point]]:
    a = vals[r, c]        # top-left
    b = vals[r, c + 1]    # top-right
    d = vals[r + 1, c + 1]  # bottom-right
    e = vals[r + 1, c]    # bottom-left
    code = (a >= level) | ((b >= level) << 1) | ((d >= level) << 2) | ((e >= level) << 3)
    if code in (0, 15):
        return []

    def top() -> Point:
        return (c + _interp(a, b, level), float(r))

    def bottom() -> Point:
        return (c + _interp(e, d, level), float(r + 1))

    def left() -> Point:
        return (float(c), r + _interp(a, e, level))

    def right() -> Point:
        return (float(c + 1), r + _interp(b, d, level))

    table = {
        1: [(top, left)],
        2: [(top, right)],
        3: [(left, right)],
        4: [(right, bottom)],
        6: [(top, bottom)],
        7: [(left, bottom)],
        8: [(left, bottom)],
        9: [(top, bottom)],
        11: [(right, bottom)],
        12: [(left, right)],
        13: [(top, right)],
        14: [(top, left)],
    }
    if code == 5:  # top-left and bottom-right inside
        center_inside = (a + b + d + e) / 4.0 >= level
        pairs = [(top, right), (bottom, left)] if center_inside \
            else [(top, left), (right, bottom)]
    elif code == 10:  # top-right and bottom-left inside
        center_inside = (a + b + d + e) / 4.0 >= level
        pairs = [(top, left), (right, bottom)] if center_inside \
            else [(top, right), (bottom, left)]
    else:
        pairs = table[code]
    out = []
    for p0f, p1f in pairs:
        p0, p1 = p0f(), p1f()
        if p0 != p1:  # drop degenerate zero-length crossings
            out.append((p0, p1))
    return out


def _chain(segments: list[tuple[Point, Point]]) -> list[Polyline]:
    """Join segments sharing endpoints into polylines, open chains first."""
    adj: dict[Point, list[Point]] = defaultdict(list)
    remaining: Counter = Counter()
    for p0, p1 in segments:
        adj[p0].append(p1)
        adj[p1].append(p0)
        remaining[frozenset((p0, p1))] += 1

    def walk(start: Point) -> Polyline:
        line = [start]
        cur = start
        while True:
            nxt = None
            for cand in adj[cur]:
                edge = frozenset((cur, cand))
                if remaining[edge]:
                    remaining[edge] -= 1
                    nxt = cand
                    break
            if nxt is None:
                return line
            line.append(nxt)
            cur = nxt

    def has_unused(p: Point) -> bool:
        return any(remaining[frozenset((p, n))] for n in adj[p])

    polylines = []
    for p in sorted(adj):  # open trails anchor at odd-degree points
        if len(adj[p]) % 2 == 1:
            while has_unused(p):
                line = walk(p)
                if len(line) > 1:
                    polylines.append(line)
    for p in sorted(adj):  # whatever is left forms closed loops
        while has_unused(p):
            line = walk(p)
            if len(line) > 1:
                polylines.append(line)
    return polylines


def marching_squares(field: ScalarField, level: float) -> list[Polyline]:
    """All iso-polylines of the field at one level."""
    vals = field.values
    valid = field.valid()
    h, w = vals.shape
    inside = vals >= level
    code = (inside[:-1, :-1].astype(np.int8)
            + (inside[:-1, 1:] << 1)
            + (inside[1:, 1:] << 2)
            + (inside[1:, :-1] << 3))
    cell_ok = valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, 1:] & valid[1:, :-1]
    rows, cols = np.nonzero(cell_ok & (code != 0) & (code != 15))
    segments: list[tuple[Point, Point]] = []
    for r, c in zip(rows.tolist(), cols.tolist()):
        segments.extend(_cell_segments(vals, level, r, c))
    return _chain(segments)


def contour_levels(lo: float, hi: float, n: int) -> list[float]:
    """n levels evenly spaced strictly between lo and hi."""
    if n < 1 or hi <= lo:
        return []
    step = (hi - lo) / (n + 1)
    return [lo + step * (i + 1) for i in range(n)]
