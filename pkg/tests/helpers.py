"""Shared fixtures-by-hand: known graphs, random generators, brute-force oracles.

The brute-force routines here are deliberately independent of the package's
algorithms (transitive closure instead of Tarjan, cycle enumeration via
networkx instead of BFS level gcd) so tests cross-check two routes.
"""

from __future__ import annotations

import json
import math
import random

import networkx as nx
import numpy as np

from flownet import build_graph

EXAMPLE1_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (4, 5), (5, 3)]
EXAMPLE1_WEIGHTS = {
    (1, 1): "1",
    (2, 2): "1",
    (3, 3): "1",
    (4, 4): "0.25 + 0.5*cos(pi*t)^2",
    (4, 5): "0.25 + 0.5*sin(pi*t)^2",
    (5, 6): "1",
}

EXAMPLE2_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (2, 1),
                  (1, 4), (4, 3), (3, 2), (2, 5), (5, 2)]
EXAMPLE2_WEIGHTS = {
    (1, 1): "cos(pi*t)^2",
    (1, 6): "sin(pi*t)^2",
    (2, 2): "0.5*cos(pi*t)^2",
    (2, 5): "0.5*sin(pi*t)^2",
    (2, 9): "0.5",
    (3, 3): "cos(pi*t)^2",
    (3, 8): "sin(pi*t)^2",
    (4, 4): "cos(pi*t)^2",
    (4, 7): "sin(pi*t)^2",
    (5, 10): "1",
}


def example1_graph():
    return build_graph(EXAMPLE1_EDGES, 5)


def example2_graph():
    return build_graph(EXAMPLE2_EDGES, 5)


def two_cycle_graph():
    return build_graph([(1, 2), (2, 1)], 2)


def cycle_graph(length: int):
    edges = [(i, i % length + 1) for i in range(1, length + 1)]
    return build_graph(edges, length)


def example1_matrix_value(t: float) -> np.ndarray:
    """The 6x6 flow matrix of the first worked example, written out directly."""
    c = math.cos(math.pi * t) ** 2
    s = math.sin(math.pi * t) ** 2
    B = np.zeros((6, 6))
    B[0, 3] = 1.0
    B[1, 0] = 1.0
    B[2, 1] = 1.0
    B[2, 5] = 1.0
    B[3, 2] = 0.25 + 0.5 * c
    B[4, 2] = 0.25 + 0.5 * s
    B[5, 4] = 1.0
    return B


def to_digraph(pattern: np.ndarray) -> nx.DiGraph:
    """Edge-node digraph of a 0/1 pattern: arc j -> i whenever pattern[i][j] = 1."""
    g = nx.DiGraph()
    m = pattern.shape[0]
    g.add_nodes_from(range(m))
    for i in range(m):
        for j in range(m):
            if pattern[i, j]:
                g.add_edge(j, i)
    return g


def closure_strongly_connected(pattern: np.ndarray) -> bool:
    """Irreducibility by brute force: every pair joined by a path of length >= 1.

    Matches the matrix notion, so a single node counts only with a self-loop.
    """
    adj = pattern.astype(bool)
    reach = adj.copy()
    for _ in range(pattern.shape[0]):
        reach = reach | (reach @ adj)
    return bool(reach.all())


def enumerated_cycle_gcd(pattern: np.ndarray) -> int:
    """gcd of all simple-cycle lengths, by exhaustive enumeration."""
    g = 0
    for cycle in nx.simple_cycles(to_digraph(pattern)):
        g = math.gcd(g, len(cycle))
    return g


def random_pattern(rng: random.Random, m: int, density: float = 0.3) -> np.ndarray:
    pattern = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            if rng.random() < density:
                pattern[i, j] = 1
    return pattern


def random_strong_graph(rng: random.Random, max_m: int = 8):
    """Strongly connected graph with at most max_m edges (spanning cycle + extras)."""
    n = rng.randint(2, min(5, max_m))
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = [(order[i], order[(i + 1) % n]) for i in range(n)]
    for _ in range(rng.randint(0, max_m - n)):
        edges.append((rng.randint(1, n), rng.randint(1, n)))
    return build_graph(edges, n)


def random_flow_weights(rng: random.Random, g) -> dict[tuple[int, int], str]:
    """Strictly positive column-stochastic vertex weights with a trig wobble."""
    weights: dict[tuple[int, int], str] = {}
    for i in range(1, g.n + 1):
        out = g.out_edges(i)
        if not out:
            continue
        if len(out) == 1:
            weights[(i, out[0])] = "1"
            continue
        raw = [rng.uniform(0.2, 1.0) for _ in out]
        total = sum(raw)
        consts = [r / total for r in raw]
        p, q = rng.sample(range(len(out)), 2)
        beta = 0.4 * min(consts[p], consts[q])
        freq = rng.randint(1, 3)
        for idx, j in enumerate(out):
            if idx == p:
                weights[(i, j)] = (
                    f"{consts[idx]!r} + {beta!r}*cos({freq}*pi*t)^2 - {beta!r}*sin({freq}*pi*t)^2"
                )
            elif idx == q:
                weights[(i, j)] = (
                    f"{consts[idx]!r} + {beta!r}*sin({freq}*pi*t)^2 - {beta!r}*cos({freq}*pi*t)^2"
                )
            else:
                weights[(i, j)] = repr(consts[idx])
    return weights


def random_piecewise_initial(rng: random.Random, m: int, cells: int) -> dict:
    """Nonnegative piecewise-constant profiles with breakpoints on the cell grid."""
    initial = {}
    for j in range(1, m + 1):
        k = rng.randint(1, 4)
        cuts = sorted(rng.sample(range(1, cells), k)) if k < cells else []
        breaks = [0.0] + [c / cells for c in cuts] + [1.0]
        values = [round(rng.uniform(0.0, 3.0), 6) for _ in range(len(breaks) - 1)]
        initial[str(j)] = {"breaks": breaks, "values": values}
    return initial


def random_imprimitive_stochastic(rng: random.Random, m: int):
    """(column-stochastic matrix, its 0/1 pattern) with block-cyclic structure.

    Nodes are split into d classes arranged in a cycle; arcs only go from one
    class to the next, so every cycle length is a multiple of d. Retries until
    the pattern is strongly connected (checked with networkx, independently of
    the code under test).
    """
    while True:
        d = rng.choice([1, 1, 2, 2, 3, 4])
        if d > m:
            continue
        nodes = list(range(m))
        rng.shuffle(nodes)
        classes = [nodes[i::d] for i in range(d)]
        pattern = np.zeros((m, m), dtype=np.int64)
        for g_idx in range(d):
            nxt = classes[(g_idx + 1) % d]
            for u in classes[g_idx]:
                pattern[rng.choice(nxt), u] = 1
            for v in nxt:
                pattern[v, rng.choice(classes[g_idx])] = 1
            for u in classes[g_idx]:
                for v in nxt:
                    if rng.random() < 0.3:
                        pattern[v, u] = 1
        if not nx.is_strongly_connected(to_digraph(pattern)):
            continue
        matrix = np.zeros((m, m))
        for j in range(m):
            rows = np.nonzero(pattern[:, j])[0]
            raw = np.array([rng.uniform(0.1, 1.0) for _ in rows])
            matrix[rows, j] = raw / raw.sum()
        return matrix, pattern


def write_scenario(tmp_path, doc, name: str = "scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# 30 parser round-trip sources (parse -> print -> parse must be a fixed point)
ROUND_TRIP_CASES = [
    "1",
    "0.25",
    "pi",
    "t",
    "-t",
    "1 + 2",
    "1 - 2 - 3",
    "1 - (2 - 3)",
    "2*t - 1 + 0.5",
    "2 * 3 * 4",
    "2 / 3 / 4",
    "2 / (3 / 4)",
    "(1 + 2) * 3",
    "1 + 2 * 3",
    "-(1 + 2)",
    "--1",
    "2^3",
    "2^-2",
    "t^1",
    "(1 + t)^2",
    "-t^2",
    "-(t^2)",
    "(-t)^2",
    "-(1/2)",
    "sin(pi*t)",
    "cos(pi*t)^2",
    "0.25 + 0.5*cos(pi*t)^2",
    "sin(2*pi*t + 1)",
    "cos(pi*t) * sin(pi*t)",
    "1/2 + 1/3 + 1/6",
    "sin(cos(1))",
    "0.5*sin(3*pi*t)^4 - 0.125",
    "(t - 0.5)^3 + pi^2",
]

# (source, offset of the reported fault)
MALFORMED_CASES = [
    ("cos(", 4),
    ("", 0),
    ("1 +", 3),
    ("(1", 2),
    ("2 * * 3", 4),
    ("t^2.5", 2),
    ("$", 0),
    ("sin 2", 4),
    ("1..2", 2),
    (")", 0),
]


def base_flow_scenario() -> dict:
    """Minimal valid flow scenario on the two-cycle graph."""
    return {
        "graph": {"n": 2, "edges": [[1, 2], [2, 1]]},
        "mode": "flow",
        "weights": {"1,1": "1", "2,2": "1"},
        "initial": {"1": "1", "2": "0"},
        "s": 0.0,
        "N": 64,
    }
