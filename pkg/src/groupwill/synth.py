"""Synthetic instances: random topologies plus score synthesis.

Interest scores are drawn from a power law (density exponent beta, inverse-CDF
Pareto sampling with x_min = 1) and min-max normalized to [0, 1]; tightness of
an undirected edge is the common-neighbor count normalized by the largest
count, with a small positive floor for edges whose endpoints share no friends.
"""

from __future__ import annotations

import random

import numpy as np

from .graph import SocialGraph


def barabasi_albert_edges(n: int, attach: int, seed: int = 0) -> list[tuple[int, int]]:
    """Preferential-attachment topology: each new node links to ``attach``
    distinct earlier nodes chosen proportionally to degree."""
    if n < 2:
        raise ValueError("need at least two nodes")
    attach = max(1, min(attach, n - 1))
    rng = random.Random(f"ba/{seed}")
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []
    # Star seed keeps the graph connected from the first attachment on.
    for v in range(1, attach + 1):
        edges.append((0, v))
        repeated += [0, v]
    for v in range(attach + 1, n):
        chosen: set[int] = set()
        while len(chosen) < attach:
            u = repeated[rng.randrange(len(repeated))]
            if u != v:
                chosen.add(u)
        for u in sorted(chosen):
            edges.append((u, v))
            repeated += [u, v]
    return edges


def erdos_renyi_edges(n: int, prob: float, seed: int = 0) -> list[tuple[int, int]]:
    if not 0.0 <= prob <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    return [(i, j) for i in range(n) for j in range(i + 1, n)
            if rng.random() < prob]


def power_law_scores(n: int, beta: float, rng: random.Random) -> np.ndarray:
    """Pareto(x_min=1) draws with density exponent beta (CCDF slope beta-1)."""
    if beta <= 1.0:
        raise ValueError("beta must exceed 1")
    u = np.array([rng.random() for _ in range(n)])
    return (1.0 - u) ** (-1.0 / (beta - 1.0))


def common_neighbor_counts(n: int, edges: list[tuple[int, int]]) -> list[int]:
    nbr: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        nbr[u].add(v)
        nbr[v].add(u)
    counts = []
    for u, v in edges:
        small, large = (nbr[u], nbr[v]) if len(nbr[u]) < len(nbr[v]) else (nbr[v], nbr[u])
        counts.append(sum(1 for w in small if w in large))
    return counts


def synthesize_scores(n: int, edges: list[tuple[int, int]], beta: float = 2.5,
                      seed: int = 0, tightness_floor: float = 0.01) -> SocialGraph:
    """Attach synthesized interest and tightness scores to a topology."""
    rng = random.Random(f"scores/{seed}")
    raw = power_law_scores(n, beta, rng)
    span = float(raw.max() - raw.min())
    eta = (raw - raw.min()) / span if span > 0 else np.zeros(n)
    counts = common_neighbor_counts(n, edges)
    peak = max(counts) if counts else 0
    weighted = []
    for (u, v), c in zip(edges, counts):
        t = c / peak if peak > 0 else 0.0
        weighted.append((u, v, t if t > 0.0 else tightness_floor))
    return SocialGraph.from_undirected(eta, weighted)


def synthetic_graph(nodes: int, topology: str = "ba", beta: float = 2.5,
                    seed: int = 0, edges_per_node: int = 3,
                    edge_prob: float | None = None,
                    tightness_floor: float = 0.01) -> SocialGraph:
    """One-call synthetic instance; topology is 'ba' or 'er'."""
    if topology == "ba":
        edges = barabasi_albert_edges(nodes, edges_per_node, seed)
    elif topology == "er":
        p = edge_prob if edge_prob is not None else min(1.0, 2.0 * edges_per_node / max(1, nodes - 1))
        edges = erdos_renyi_edges(nodes, p, seed)
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return synthesize_scores(nodes, edges, beta=beta, seed=seed,
                             tightness_floor=tightness_floor)


def write_instance(graph: SocialGraph, prefix: str) -> tuple[str, str]:
    """Write PREFIX.edges / PREFIX.scores in the loader formats."""
    edge_path, score_path = f"{prefix}.edges", f"{prefix}.scores"
    seen: set[tuple[int, int]] = set()
    with open(edge_path, "w", encoding="utf-8") as fh:
        fh.write("# u v t\n")
        for i, j, t in graph.arcs():
            key = (min(i, j), max(i, j))
            if key in seen:
                continue
            seen.add(key)
            # Stored weights are half the undirected weight.
            fh.write(f"{graph.labels[key[0]]} {graph.labels[key[1]]} {t * 2.0!r}\n")
    with open(score_path, "w", encoding="utf-8") as fh:
        fh.write("# v eta lambda\n")
        for i in range(graph.n):
            fh.write(f"{graph.labels[i]} {float(graph.eta[i])!r} {float(graph.lam[i])!r}\n")
    return edge_path, score_path
