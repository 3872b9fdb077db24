"""Pure-Python/numpy versions of the hot kernels.

Used when the compiled ``_core`` extension is unavailable, or when
``BYTEADAPT_PURE=1`` is set. Behaviour matches ``_core`` exactly, including
tie-breaking.
"""
import numpy as np


def iou_matrix(a, b):
    """IoU between every row of ``a`` and every row of ``b`` (both Nx4 tlwh)."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)), dtype=np.float64)
    ax1, ay1 = a[:, 0:1], a[:, 1:2]
    ax2, ay2 = ax1 + a[:, 2:3], ay1 + a[:, 3:4]
    bx1, by1 = b[:, 0], b[:, 1]
    bx2, by2 = bx1 + b[:, 2], by1 + b[:, 3]
    iw = np.minimum(ax2, bx2) - np.maximum(ax1, bx1)
    ih = np.minimum(ay2, by2) - np.maximum(ay1, by1)
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    area_a = a[:, 2:3] * a[:, 3:4]
    area_b = b[:, 2] * b[:, 3]
    union = (area_a + area_b) - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0)
    # rounding in the corner differences can overshoot 1 by an ulp or so
    np.minimum(out, 1.0, out=out)
    return out


def steepest_drop(scores):
    """Upper endpoint of the steepest drop in the descending-sorted scores.

    Raises ``ValueError`` for an empty input or scores outside [0, 1].
    """
    s = np.sort(np.asarray(scores, dtype=np.float64))[::-1]
    if len(s) == 0:
        raise ValueError("adaptive threshold needs at least one score")
    # NaN sorts to the front of the descending array and fails this test
    if not (s[0] <= 1.0 and s[-1] >= 0.0):
        raise ValueError("confidence scores must lie in [0, 1]")
    if len(s) == 1:
        return float(s[0])
    return float(s[int(np.argmin(np.diff(s)))])


def lsa_gated(cost, gate):
    """Gated min-cost assignment, maximum cardinality first.

    Successive shortest augmenting paths from a virtual source attached to
    every free row, with Johnson potentials so Dijkstra sees non-negative
    reduced costs. Pairs with ``cost > gate`` are not edges at all.

    Returns ``(rows, cols)`` int64 arrays sorted by row.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n_rows, n_cols = cost.shape
    if n_rows == 0 or n_cols == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()

    feasible = cost <= gate
    masked = np.where(feasible, cost, np.inf)
    row_match = np.full(n_rows, -1, dtype=np.int64)
    col_match = np.full(n_cols, -1, dtype=np.int64)

    pot_row = np.zeros(n_rows)
    col_min = masked.min(axis=0)
    pot_col = np.where(np.isfinite(col_min), col_min, 0.0)
    pot_sink = pot_col.min()

    for _ in range(min(n_rows, n_cols)):
        dist_row = np.full(n_rows, np.inf)
        free = row_match < 0
        dist_row[free] = -pot_row[free]

        reduced = masked[free] + (dist_row[free] + pot_row[free])[:, None] - pot_col
        if reduced.shape[0] == 0:
            break
        best = np.argmin(reduced, axis=0)
        dist_col = reduced[best, np.arange(n_cols)]
        prev_row = np.flatnonzero(free)[best]
        visited = np.zeros(n_cols, dtype=bool)

        dist_sink = np.inf
        sink_col = -1
        while True:
            open_dist = np.where(visited, np.inf, dist_col)
            j = int(np.argmin(open_dist))
            d = open_dist[j]
            if not d < dist_sink:
                break
            visited[j] = True
            r = col_match[j]
            if r < 0:
                d_sink = d + pot_col[j] - pot_sink
                if d_sink < dist_sink:
                    dist_sink = d_sink
                    sink_col = j
                continue
            d_row = d - cost[r, j] + pot_col[j] - pot_row[r]
            dist_row[r] = d_row
            cand = masked[r] + (d_row + pot_row[r]) - pot_col
            cand[j] = np.inf
            better = (cand < dist_col) & ~visited
            dist_col[better] = cand[better]
            prev_row[better] = r

        if sink_col < 0:
            break

        pot_row += np.minimum(dist_row, dist_sink)
        pot_col += np.minimum(dist_col, dist_sink)
        pot_sink += dist_sink

        j = sink_col
        while True:
            r = prev_row[j]
            nxt = row_match[r]
            row_match[r] = j
            col_match[j] = r
            if nxt < 0:
                break
            j = nxt

    rows = np.flatnonzero(row_match >= 0).astype(np.int64)
    return rows, row_match[rows].astype(np.int64)
