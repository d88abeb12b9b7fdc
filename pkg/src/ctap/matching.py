"""Maximum bipartite matching by Hopcroft-Karp (layered BFS + augmenting DFS)."""
from __future__ import annotations

from collections import deque
from typing import Sequence

_FREE = -1


def hopcroft_karp(n_left: int, n_right: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Maximum matching of a bipartite graph.

    ``adj[u]`` lists the right vertices adjacent to left vertex ``u``.  Returns
    ``match_left`` with ``match_left[u]`` the partner of ``u`` or -1.
    """
    match_l = [_FREE] * n_left
    match_r = [_FREE] * n_right
    inf = n_left + 1

    def bfs(dist):
        queue = deque()
        for u in range(n_left):
            if match_l[u] == _FREE:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= found:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w == _FREE:
                    found = min(found, dist[u] + 1)
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found != inf

    def dfs(u, dist):
        # iterative DFS along the BFS layers
        stack = [(u, iter(adj[u]))]
        path = []
        while stack:
            x, it = stack[-1]
            for v in it:
                w = match_r[v]
                if w == _FREE:
                    path.append((x, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[x] + 1:
                    path.append((x, v))
                    stack.append((w, iter(adj[w])))
                    break
            else:
                dist[x] = inf
                stack.pop()
                if path:
                    path.pop()
        return False

    dist = [0] * n_left
    while bfs(dist):
        for u in range(n_left):
            if match_l[u] == _FREE:
                dfs(u, dist)
    return match_l
