"""Directed network topology: incidence matrices, edge adjacency, cycle structure.

Vertices and edges are numbered from 1 in the public API. Edge j runs from its
tail vertex to its head vertex. The edge adjacency matrix ``b`` is oriented so
that ``b[i][j] = 1`` means "edge j is followed by edge i": the head of e_j is
the tail of e_i. All downstream matrix-vector products assume this orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GraphError


@dataclass(frozen=True)
class NetworkGraph:
    """Finite directed graph with 0/1 outgoing (phi_minus) and incoming (phi_plus) incidence."""

    n: int
    m: int
    edges: tuple[tuple[int, int], ...]
    phi_minus: np.ndarray
    phi_plus: np.ndarray

    def tail(self, j: int) -> int:
        return self.edges[j - 1][0]

    def head(self, j: int) -> int:
        return self.edges[j - 1][1]

    def out_edges(self, i: int) -> tuple[int, ...]:
        """Edges whose tail is vertex i, in edge order."""
        return tuple(j for j in range(1, self.m + 1) if self.edges[j - 1][0] == i)

    def in_edges(self, i: int) -> tuple[int, ...]:
        """Edges whose head is vertex i, in edge order."""
        return tuple(j for j in range(1, self.m + 1) if self.edges[j - 1][1] == i)


@dataclass(frozen=True)
class LineGraphAdjacency:
    """0/1 adjacency on edge nodes: b[i][j] = 1 iff head(e_j) = tail(e_i)."""

    b: np.ndarray

    @property
    def m(self) -> int:
        return self.b.shape[0]


def build_graph(edge_list, n: int) -> NetworkGraph:
    """Build a NetworkGraph from 1-based (tail, head) pairs.

    Parallel edges and self-loops are permitted.
    """
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    edges = tuple((int(t), int(h)) for t, h in edge_list)
    if not edges:
        raise GraphError("edge list is empty")
    for j, (t, h) in enumerate(edges, start=1):
        if not (1 <= t <= n):
            raise GraphError(f"edge {j} tail vertex {t} outside 1..{n}")
        if not (1 <= h <= n):
            raise GraphError(f"edge {j} head vertex {h} outside 1..{n}")
    m = len(edges)
    phi_minus = np.zeros((n, m), dtype=np.int64)
    phi_plus = np.zeros((n, m), dtype=np.int64)
    for j, (t, h) in enumerate(edges):
        phi_minus[t - 1, j] = 1
        phi_plus[h - 1, j] = 1
    phi_minus.setflags(write=False)
    phi_plus.setflags(write=False)
    return NetworkGraph(n=n, m=m, edges=edges, phi_minus=phi_minus, phi_plus=phi_plus)


def line_graph_adjacency(g: NetworkGraph) -> LineGraphAdjacency:
    """Adjacency of the line graph: b = support of phi_minus^T phi_plus."""
    b = (g.phi_minus.T @ g.phi_plus > 0).astype(np.int64)
    b.setflags(write=False)
    return LineGraphAdjacency(b=b)


def _successors(b: np.ndarray):
    """Successor lists of the edge-node digraph: j -> i whenever b[i][j] = 1."""
    m = b.shape[0]
    return [np.nonzero(b[:, j])[0].tolist() for j in range(m)]


def _tarjan_scc_count(succ) -> int:
    """Number of strongly connected components (iterative Tarjan)."""
    m = len(succ)
    index = [-1] * m
    lowlink = [0] * m
    on_stack = [False] * m
    stack: list[int] = []
    count = 0
    next_index = 0
    for root in range(m):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = lowlink[v] = next_index
                next_index += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index[v]:
                count += 1
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    if w == v:
                        break
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return count


def is_strongly_connected(adj: LineGraphAdjacency | np.ndarray) -> bool:
    """True iff b is irreducible, i.e. the edge-node digraph is a single SCC.

    A 1x1 matrix counts as irreducible only with a self-loop (b = [[1]]); the
    zero 1x1 matrix has no cycles and is treated as reducible.
    """
    b = adj.b if isinstance(adj, LineGraphAdjacency) else np.asarray(adj)
    m = b.shape[0]
    if m == 1:
        return bool(b[0, 0] != 0)
    return _tarjan_scc_count(_successors(b)) == 1


def cyclic_index(adj: LineGraphAdjacency | np.ndarray) -> int:
    """Index of imprimitivity: gcd of the lengths of all directed cycles.

    Requires an irreducible matrix. Computed by BFS level labeling from an
    arbitrary node: every arc u -> v contributes level(u) + 1 - level(v) to
    the gcd, which for a strongly connected digraph equals the cycle-length
    gcd without enumerating cycles.
    """
    b = adj.b if isinstance(adj, LineGraphAdjacency) else np.asarray(adj)
    if not is_strongly_connected(b):
        raise GraphError("cyclic index is defined only for irreducible matrices")
    succ = _successors(b)
    m = b.shape[0]
    level = [-1] * m
    level[0] = 0
    queue = [0]
    while queue:
        nxt = []
        for u in queue:
            for v in succ[u]:
                if level[v] == -1:
                    level[v] = level[u] + 1
                    nxt.append(v)
        queue = nxt
    g = 0
    for u in range(m):
        for v in succ[u]:
            g = math.gcd(g, level[u] + 1 - level[v])
    return g
