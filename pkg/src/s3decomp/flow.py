"""Small max-flow routines: prescribed in-degree orientations and edge connectivity.

Graphs here have at most a few dozen vertices, so a plain Edmonds-Karp on
dict-of-dict residual capacities is enough.
"""
from collections import defaultdict, deque


def max_flow(capacity, source, sink):
    """Edmonds-Karp max-flow value for a ``capacity[u][v]`` mapping (left unchanged)."""
    return max_flow_residual(capacity, source, sink)[0]


def max_flow_residual(capacity, source, sink):
    """``(flow value, residual capacities)``."""
    res = defaultdict(lambda: defaultdict(int))
    for u, row in capacity.items():
        for v, c in row.items():
            res[u][v] += c
            res[v][u] += 0
    capacity = res
    flow = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, c in capacity[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow, capacity
        bottleneck = float("inf")
        v = sink
        while parent[v] is not None:
            u = parent[v]
            bottleneck = min(bottleneck, capacity[u][v])
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            capacity[u][v] -= bottleneck
            capacity[v][u] += bottleneck
            v = u
        flow += bottleneck


def orient_with_indegrees(n, edges, demand):
    """Orient ``edges`` so vertex ``v`` receives exactly ``demand[v]`` heads.

    A loop always hands exactly one head to its vertex. Returns a list with the
    head vertex of every edge, or ``None`` when no such orientation exists.
    """
    if sum(demand) != len(edges):
        return None
    cap = defaultdict(lambda: defaultdict(int))
    src, snk = ("s",), ("t",)
    for i, (u, v) in enumerate(edges):
        cap[src][("e", i)] = 1
        cap[("e", i)][("v", u)] = 1
        cap[("e", i)][("v", v)] = 1
    for v in range(n):
        if demand[v]:
            cap[("v", v)][snk] = demand[v]
    value, cap = max_flow_residual(cap, src, snk)
    if value != len(edges):
        return None
    heads = []
    for i, (u, v) in enumerate(edges):
        heads.append(u if cap[("e", i)][("v", u)] == 0 else v)
    return heads


def local_edge_connectivity(n, edges, s, t):
    cap = defaultdict(lambda: defaultdict(int))
    for u, v in edges:
        if u == v:
            continue
        cap[u][v] += 1
        cap[v][u] += 1
    return max_flow(cap, s, t)


def edge_connectivity(g):
    """Global min edge cut via max-flow from vertex 0 to every other vertex; 0 if disconnected."""
    if g.n <= 1:
        return 0
    return min(local_edge_connectivity(g.n, g.edges, 0, t) for t in range(1, g.n))
