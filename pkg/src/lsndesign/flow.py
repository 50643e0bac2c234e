"""Integer maximum flow (Dinic) on small directed networks."""
from __future__ import annotations

from collections import deque


class FlowNetwork:
    """Residual network over nodes ``0..n-1`` with integer capacities.

    On unit-capacity networks Dinic runs in O(E * sqrt(V)).
    """

    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add arc ``u -> v``; returns the arc index (its reverse is ``index ^ 1``)."""
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.head[u].append(idx)
        self.head[v].append(idx + 1)
        return idx

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, s: int, t: int, level: list[int], it: list[int]) -> int:
        # iterative DFS along the level graph; returns bottleneck pushed (0 if stuck)
        path: list[int] = []
        u = s
        while True:
            if u == t:
                push = min(self.cap[e] for e in path)
                for e in path:
                    self.cap[e] -= push
                    self.cap[e ^ 1] += push
                return push
            adv = False
            heads = self.head[u]
            while it[u] < len(heads):
                e = heads[it[u]]
                v = self.to[e]
                if self.cap[e] > 0 and level[v] == level[u] + 1:
                    path.append(e)
                    u = v
                    adv = True
                    break
                it[u] += 1
            if adv:
                continue
            if not path:
                return 0
            level[u] = -1  # dead end, prune
            e = path.pop()
            u = self.to[e ^ 1]
            it[u] += 1

    def max_flow(self, s: int, t: int, limit: int | None = None) -> int:
        """Maximum s-t flow; with ``limit``, stops as soon as that much is routed."""
        if s == t:
            raise ValueError("source and sink coincide")
        total = 0
        while (level := self._levels(s, t)) is not None:
            it = [0] * self.n
            while (pushed := self._augment(s, t, level, it)) > 0:
                total += pushed
                if limit is not None and total >= limit:
                    return total
        return total

    def flow_on(self, arc: int) -> int:
        """Flow currently routed on arc ``arc`` (as returned by ``add_edge``)."""
        return self.cap[arc ^ 1]
