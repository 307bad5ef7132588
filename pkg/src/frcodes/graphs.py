"""Regular graphs of known girth and the edge-placement FR codes built on them."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import FRCode
from .errors import NotRegular
from .fields import FiniteField


def girth(n: int, edges) -> Optional[int]:
    """Length of the shortest cycle (BFS from every vertex); None for forests."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    best = None
    for src in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[src] = 0
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    dq.append(w)
                elif parent[u] != w:
                    cyc = dist[u] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
    return best


@dataclass(frozen=True)
class GraphSpec:
    n: int
    edges: tuple
    name: str = ""

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        if len(set(edges)) != len(edges) or any(u == v for u, v in edges):
            raise ValueError("graph must be simple")
        object.__setattr__(self, "edges", edges)

    def degrees(self) -> list:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def s(self) -> Optional[int]:
        d = set(self.degrees())
        return d.pop() if len(d) == 1 else None

    @property
    def g(self) -> Optional[int]:
        return girth(self.n, self.edges)


def complete_graph(n: int) -> GraphSpec:
    return GraphSpec(n, tuple(itertools.combinations(range(n), 2)), f"K{n}")


def complete_bipartite(s: int) -> GraphSpec:
    return GraphSpec(2 * s, tuple((i, s + j) for i in range(s) for j in range(s)), f"K{s},{s}")


def petersen() -> GraphSpec:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return GraphSpec(10, tuple(outer + spokes + inner), "petersen")


def pg_incidence_graph(field: FiniteField) -> GraphSpec:
    """Point-line incidence graph of PG(2, q): points 0..N-1, lines N..2N-1."""
    from .designs import projective_plane

    plane = projective_plane(field)
    N = plane.n
    edges = [(p, N + j) for j, line in enumerate(plane.nodes) for p in line]
    return GraphSpec(2 * N, tuple(edges), f"PG2({field.q})-incidence")


def graph_by_name(name: str) -> GraphSpec:
    """Parse ``petersen``, ``K5``, ``K3,3`` / ``K3x3`` or ``pg2-q``."""
    from .fields import field_for_order

    key = name.strip().lower()
    if key == "petersen":
        return petersen()
    if key.startswith("pg2-"):
        return pg_incidence_graph(field_for_order(int(key[4:])))
    if key.startswith("k"):
        body = key[1:].replace("x", ",")
        if "," in body:
            a, b = body.split(",")
            if a != b:
                raise ValueError("only balanced complete bipartite graphs are regular")
            return complete_bipartite(int(a))
        return complete_graph(int(body))
    raise ValueError(f"unknown graph {name!r}")


def girth_code(graph: GraphSpec) -> FRCode:
    """Edges become symbols, each vertex stores the edges incident to it."""
    s = graph.s
    if s is None:
        raise NotRegular(f"graph {graph.name or ''} is not regular (degrees {sorted(set(graph.degrees()))})")
    if s < 2:
        raise NotRegular("degree must be at least 2")
    nodes = [set() for _ in range(graph.n)]
    for idx, (u, v) in enumerate(graph.edges):
        nodes[u].add(idx)
        nodes[v].add(idx)
    meta = {"family": "girth", "graph": graph.name, "s": s, "g": graph.g,
            "edges": [list(e) for e in graph.edges], "repair": {"d": s, "beta": 1}}
    return FRCode(len(graph.edges), tuple(frozenset(v) for v in nodes), None, meta)
