"""Small max-flow / min-cut solver (Dinic's algorithm).

Built for the l1 boundary-extension problem: a few thousand nodes, real
capacities. Undirected edges become arc pairs that share residual capacity
in both directions. The min-cut side returned is the set of nodes reachable
from the source in the final residual network, which is the smallest source
side among minimum cuts.
"""

from __future__ import annotations

import sys
from collections import deque
from typing import List, Tuple

import numpy as np

__all__ = ["min_cut"]


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.head: List[List[int]] = [[] for _ in range(n)]
        self.to: List[int] = []
        self.cap: List[float] = []

    def add_undirected(self, u: int, v: int, c: float) -> None:
        # paired arcs; each is the other's reverse, both start at capacity c
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(c)

    def _levels(self, s: int, t: int, eps: float):
        level = [-1] * self.n
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for aid in self.head[u]:
                v = self.to[aid]
                if level[v] < 0 and self.cap[aid] > eps:
                    level[v] = level[u] + 1
                    dq.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, u: int, t: int, limit: float, level, it, eps: float) -> float:
        if u == t:
            return limit
        while it[u] < len(self.head[u]):
            aid = self.head[u][it[u]]
            v = self.to[aid]
            if self.cap[aid] > eps and level[v] == level[u] + 1:
                pushed = self._augment(u=v, t=t, limit=min(limit, self.cap[aid]),
                                       level=level, it=it, eps=eps)
                if pushed > 0.0:
                    self.cap[aid] -= pushed
                    self.cap[aid ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0.0

    def max_flow(self, s: int, t: int, eps: float) -> float:
        # augmentation recurses once per path vertex
        sys.setrecursionlimit(max(sys.getrecursionlimit(), self.n + 1000))
        total = 0.0
        while True:
            level = self._levels(s, t, eps)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._augment(s, t, np.inf, level, it, eps)
                if pushed <= 0.0:
                    break
                total += pushed

    def source_side(self, s: int, eps: float) -> np.ndarray:
        seen = np.zeros(self.n, dtype=bool)
        seen[s] = True
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for aid in self.head[u]:
                v = self.to[aid]
                if not seen[v] and self.cap[aid] > eps:
                    seen[v] = True
                    dq.append(v)
        return seen


def min_cut(
    n: int, arcs: List[Tuple[int, int, float]], s: int, t: int
) -> Tuple[float, np.ndarray]:
    """Minimum s-t cut of an undirected capacitated graph.

    Returns (value, source_side_mask). The value is recomputed as the exact
    sum of capacities crossing the returned cut, so integer capacities give
    an integer result regardless of augmentation arithmetic. The mask is the
    residual-reachable set: the unique smallest source side among min cuts.
    """
    if s == t:
        raise ValueError("source and sink must differ")
    net = _Dinic(n)
    cmax = 0.0
    for u, v, c in arcs:
        if c < 0:
            raise ValueError("capacities must be nonnegative")
        if u == v:
            continue
        net.add_undirected(u, v, float(c))
        cmax = max(cmax, float(c))
    eps = 1e-11 * max(cmax, 1.0)
    net.max_flow(s, t, eps)
    side = net.source_side(s, eps)
    value = 0.0
    for u, v, c in arcs:
        if u != v and side[u] != side[v]:
            value += float(c)
    return value, side
