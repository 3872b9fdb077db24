# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``byteadapt._pure`` bit for bit in outcome."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def iou_matrix(a, b):
    cdef double[:, ::1] A = np.ascontiguousarray(np.asarray(a, dtype=np.float64).reshape(-1, 4))
    cdef double[:, ::1] B = np.ascontiguousarray(np.asarray(b, dtype=np.float64).reshape(-1, 4))
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j
    out = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] O = out
    cdef double ax1, ay1, ax2, ay2, area_a, iw, ih, inter, union
    for i in range(n):
        ax1 = A[i, 0]
        ay1 = A[i, 1]
        ax2 = ax1 + A[i, 2]
        ay2 = ay1 + A[i, 3]
        area_a = A[i, 2] * A[i, 3]
        for j in range(m):
            iw = min(ax2, B[j, 0] + B[j, 2]) - max(ax1, B[j, 0])
            ih = min(ay2, B[j, 1] + B[j, 3]) - max(ay1, B[j, 1])
            if iw > 0 and ih > 0:
                inter = iw * ih
            else:
                inter = 0.0
            union = (area_a + B[j, 2] * B[j, 3]) - inter
            if union > 0:
                O[i, j] = min(inter / union, 1.0)
    return out


def steepest_drop(scores):
    cdef double[::1] s = np.sort(np.asarray(scores, dtype=np.float64))
    cdef Py_ssize_t n = s.shape[0], k
    cdef double best, d
    cdef Py_ssize_t best_k
    # ascending order: the descending index j maps to k = n - 1 - j, and the
    # earliest descending tie is the highest ascending gap position
    if n == 0:
        raise ValueError("adaptive threshold needs at least one score")
    # NaN sorts last and fails the upper test
    if not (s[n - 1] <= 1.0 and s[0] >= 0.0):
        raise ValueError("confidence scores must lie in [0, 1]")
    if n == 1:
        return s[0]
    best = INFINITY
    best_k = n - 1
    for k in range(n - 1, 0, -1):
        d = s[k - 1] - s[k]
        if d < best:
            best = d
            best_k = k
    return s[best_k]


def lsa_gated(cost, double gate):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n_rows = c.shape[0], n_cols = c.shape[1]
    if n_rows == 0 or n_cols == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)

    row_match_a = np.full(n_rows, -1, dtype=np.int64)
    col_match_a = np.full(n_cols, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] row_match = row_match_a
    cdef cnp.int64_t[::1] col_match = col_match_a
    cdef double[::1] pot_row = np.zeros(n_rows)
    cdef double[::1] pot_col = np.zeros(n_cols)
    cdef double[::1] dist_row = np.empty(n_rows)
    cdef double[::1] dist_col = np.empty(n_cols)
    cdef cnp.int64_t[::1] prev_row = np.empty(n_cols, dtype=np.int64)
    cdef unsigned char[::1] visited = np.empty(n_cols, dtype=np.uint8)
    cdef double pot_sink, dist_sink, d, d_row, cand, v
    cdef Py_ssize_t i, j, r, nxt, sink_col, it, n_free

    for j in range(n_cols):
        v = INFINITY
        for i in range(n_rows):
            if c[i, j] <= gate and c[i, j] < v:
                v = c[i, j]
        pot_col[j] = v if v != INFINITY else 0.0
    pot_sink = INFINITY
    for j in range(n_cols):
        if pot_col[j] < pot_sink:
            pot_sink = pot_col[j]

    for it in range(min(n_rows, n_cols)):
        n_free = 0
        for j in range(n_cols):
            dist_col[j] = INFINITY
            prev_row[j] = 0
            visited[j] = 0
        for i in range(n_rows):
            if row_match[i] < 0:
                n_free += 1
                dist_row[i] = -pot_row[i]
                for j in range(n_cols):
                    if c[i, j] <= gate:
                        cand = c[i, j] + (dist_row[i] + pot_row[i]) - pot_col[j]
                        if cand < dist_col[j]:
                            dist_col[j] = cand
                            prev_row[j] = i
            else:
                dist_row[i] = INFINITY
        if n_free == 0:
            break

        dist_sink = INFINITY
        sink_col = -1
        while True:
            d = INFINITY
            j = -1
            for i in range(n_cols):
                if not visited[i] and dist_col[i] < d:
                    d = dist_col[i]
                    j = i
            if j < 0 or not d < dist_sink:
                break
            visited[j] = 1
            r = col_match[j]
            if r < 0:
                v = d + pot_col[j] - pot_sink
                if v < dist_sink:
                    dist_sink = v
                    sink_col = j
                continue
            d_row = d - c[r, j] + pot_col[j] - pot_row[r]
            dist_row[r] = d_row
            for i in range(n_cols):
                if i == j or visited[i] or not c[r, i] <= gate:
                    continue
                cand = c[r, i] + (d_row + pot_row[r]) - pot_col[i]
                if cand < dist_col[i]:
                    dist_col[i] = cand
                    prev_row[i] = r

        if sink_col < 0:
            break

        for i in range(n_rows):
            pot_row[i] += min(dist_row[i], dist_sink)
        for j in range(n_cols):
            pot_col[j] += min(dist_col[j], dist_sink)
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

    rows = np.flatnonzero(row_match_a >= 0).astype(np.int64)
    return rows, row_match_a[rows]
