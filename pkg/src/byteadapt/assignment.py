"""Gated linear assignment between tracks (rows) and detections (columns).

``solve`` returns, among all one-to-one matchings that only use pairs with
``cost <= gate``, one with the most pairs and, among those, the lowest total
cost. ``solve_bruteforce`` enumerates every such matching and serves as the
test oracle for it.
"""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

BRUTEFORCE_LIMIT = 8


@dataclass
class AssignmentResult:
    matches: list = field(default_factory=list)
    unmatched_rows: list = field(default_factory=list)
    unmatched_cols: list = field(default_factory=list)

    def total_cost(self, cost):
        """Sum of matched costs, accumulated in row order."""
        total = 0.0
        for i, j in self.matches:
            total += float(cost[i][j])
        return total


def _as_cost(cost):
    c = np.asarray(cost, dtype=np.float64)
    if c.size == 0:
        c = c.reshape(c.shape if c.ndim == 2 else (0, 0))
    if c.ndim != 2:
        raise ValueError(f"cost must be a 2-D matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix contains non-finite entries")
    return c


def _result(n_rows, n_cols, pairs):
    pairs = sorted(pairs)
    rows = {i for i, _ in pairs}
    cols = {j for _, j in pairs}
    return AssignmentResult(
        matches=pairs,
        unmatched_rows=[i for i in range(n_rows) if i not in rows],
        unmatched_cols=[j for j in range(n_cols) if j not in cols],
    )


def solve(cost, gate):
    """Maximum-cardinality, minimum-cost matching restricted to ``cost <= gate``.

    >>> solve([[0.1, 0.9], [0.9, 0.1]], 1.0).matches
    [(0, 0), (1, 1)]
    """
    c = _as_cost(cost)
    rows, cols = kernels.lsa_gated(c, float(gate))
    return _result(c.shape[0], c.shape[1], list(zip(rows.tolist(), cols.tolist())))


def solve_bruteforce(cost, gate):
    """Exhaustive search over all gated partial matchings (at most 8x8).

    Ties on (cardinality, cost) go to the lexicographically smallest match list,
    rows visited in order and each row trying columns before staying unmatched.
    """
    c = _as_cost(cost)
    n_rows, n_cols = c.shape
    if n_rows > BRUTEFORCE_LIMIT or n_cols > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTEFORCE_LIMIT}x{BRUTEFORCE_LIMIT}, got {n_rows}x{n_cols}")
    allowed = [[j for j in range(n_cols) if c[i, j] <= gate] for i in range(n_rows)]
    nonneg = bool(np.all(c >= 0))
    best = [-1, 0.0, []]
    used = [False] * n_cols
    chosen = []

    def visit(i, card, total):
        # cardinality bound: remaining rows can add at most this many pairs
        bound = card + min(n_rows - i, n_cols - sum(used))
        if bound < best[0] or (nonneg and bound == best[0] and total > best[1]):
            return
        if i == n_rows:
            if card > best[0] or (card == best[0] and total < best[1]):
                best[:] = [card, total, list(chosen)]
            return
        for j in allowed[i]:
            if not used[j]:
                used[j] = True
                chosen.append((i, j))
                visit(i + 1, card + 1, total + c[i, j])
                chosen.pop()
                used[j] = False
        visit(i + 1, card, total)

    visit(0, 0, 0.0)
    return _result(n_rows, n_cols, best[2])
