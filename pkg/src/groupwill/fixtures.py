"""Small hand-built graphs with known optima, used by tests, demos, and the UI.

``ten_node_graph`` is a 10-node instance whose two strongest nodes tie at 4.2,
whose best connected 5-group scores 9.7, and whose sampled-batch statistics
under :func:`scripted_trace` hit c=5.9/d=9.2 and c=6.9/d=8.9 for the two start
nodes.  ``greedy_trap_graph`` is a 4-node instance where deterministic greedy
reaches 27 while the best 3-group scores 30.
"""

from __future__ import annotations

from .graph import SocialGraph
from .sampling import BatchJob, BatchResult, batch_from_member_sets

# Labels v1..v10 map to ids 0..9; edge order keeps first appearances sorted
# so the file loader assigns the same ids.
TEN_NODE_ETA = [1.3, 0.5, 0.8, 1.3, 1.1, 0.9, 1.2, 0.0, 0.8, 0.9]
TEN_NODE_EDGES = [
    ("v1", "v2", 0.9), ("v1", "v3", 0.6), ("v2", "v3", 0.5),
    ("v3", "v4", 0.9), ("v3", "v5", 1.0), ("v3", "v6", 0.4),
    ("v5", "v6", 0.6), ("v6", "v7", 0.9), ("v6", "v8", 0.1),
    ("v9", "v10", 0.9), ("v6", "v10", 0.6), ("v7", "v10", 0.8),
    ("v8", "v10", 1.0), ("v4", "v7", 0.6),
]

V3, V10 = 2, 9  # ids of the two start nodes

# Five scripted expansions per start node (1-based v-labels).  The first batch
# sorts to <9.2, 8.9, 8.9, 7.9, 5.9>; the second to <8.9, 8.1, 7.6, 7.4, 6.9>.
TRACE_STAGE1_V3 = [
    (1, 3, 4, 5, 6),   # 8.9
    (1, 2, 3, 4, 5),   # 8.9
    (2, 3, 5, 6, 8),   # 5.9
    (2, 3, 4, 5, 7),   # 7.9
    (3, 5, 6, 7, 10),  # 9.2
]
TRACE_STAGE1_V10 = [
    (4, 6, 7, 9, 10),  # 8.9
    (6, 7, 8, 9, 10),  # 8.1
    (3, 6, 7, 8, 10),  # 7.6
    (3, 5, 6, 8, 10),  # 7.4
    (3, 4, 6, 8, 10),  # 6.9
]
# Stage-2 bests: 9.2 again for v3 under plain budget allocation, 9.7 (the
# optimum) once selection probabilities have been refit.
TRACE_STAGE2_V3 = [(3, 5, 6, 7, 10), (2, 3, 4, 5, 7)]
TRACE_STAGE2_V3_REFIT = [(3, 4, 5, 6, 7), (3, 5, 6, 7, 10)]
TRACE_STAGE2_V10 = [(4, 6, 7, 9, 10), (6, 7, 8, 9, 10)]

OPTIMUM_MEMBERS = (3, 4, 5, 6, 7)   # willingness 9.7
OPTIMUM_WILLINGNESS = 9.7
CBAS_TRACE_RESULT = (3, 5, 6, 7, 10)  # willingness 9.2
CBAS_TRACE_WILLINGNESS = 9.2


def ten_node_graph() -> SocialGraph:
    labels = [f"v{i}" for i in range(1, 11)]
    ids = {lab: i for i, lab in enumerate(labels)}
    edges = [(ids[u], ids[v], t) for u, v, t in TEN_NODE_EDGES]
    return SocialGraph.from_undirected(TEN_NODE_ETA, edges, labels=labels)


def members_from_vlabels(vs: tuple[int, ...]) -> frozenset[int]:
    """Translate 1-based v-numbers into graph ids."""
    return frozenset(v - 1 for v in vs)


def scripted_trace() -> dict[tuple[int, int], list[frozenset[int]]]:
    """Member sets per (start id, stage) for the scripted-sampler runs."""
    return {
        (V3, 1): [members_from_vlabels(s) for s in TRACE_STAGE1_V3],
        (V10, 1): [members_from_vlabels(s) for s in TRACE_STAGE1_V10],
        (V3, 2): [members_from_vlabels(s) for s in TRACE_STAGE2_V3],
        (V10, 2): [members_from_vlabels(s) for s in TRACE_STAGE2_V10],
    }


def scripted_trace_refit() -> dict[tuple[int, int], list[frozenset[int]]]:
    """As :func:`scripted_trace` but stage 2 of v3 reaches the optimum."""
    trace = scripted_trace()
    trace[(V3, 2)] = [members_from_vlabels(s) for s in TRACE_STAGE2_V3_REFIT]
    return trace


# Greedy trap: start at v1 (largest eta), then v2, then v3 for a total of 27;
# the best 3-group is {v2, v3, v4} at 30.
TRAP_ETA = [6.0, 5.0, 4.0, 3.0]
TRAP_EDGES = [(0, 1, 6.0), (0, 2, 1.0), (1, 2, 5.0), (1, 3, 6.0), (2, 3, 7.0)]
TRAP_GREEDY_WILLINGNESS = 27.0
TRAP_OPT_WILLINGNESS = 30.0
TRAP_OPT_MEMBERS = frozenset({1, 2, 3})


def greedy_trap_graph() -> SocialGraph:
    labels = [f"v{i}" for i in range(1, 5)]
    return SocialGraph.from_undirected(TRAP_ETA, TRAP_EDGES, labels=labels)


def scripted_sampler(trace: dict[tuple[int, int], list[frozenset[int]]]):
    """A drop-in sampler that replays predetermined member sets.

    Counts beyond the scripted list cycle through it, so any budget split
    reproduces the same best/worst statistics.
    """
    def sampler(graph: SocialGraph, job: BatchJob) -> BatchResult:
        sets = trace[(job.start, job.stage)]
        picked = [sets[i % len(sets)] for i in range(job.count)]
        return batch_from_member_sets(graph, picked)

    return sampler


def edge_list_text() -> str:
    """Edge-list file body for the ten-node fixture (upload/demo format)."""
    lines = ["# ten-node demo graph"]
    lines += [f"{u} {v} {t}" for u, v, t in TEN_NODE_EDGES]
    return "\n".join(lines) + "\n"


def score_text() -> str:
    lines = ["# node scores: v eta [lambda]"]
    lines += [f"v{i + 1} {e}" for i, e in enumerate(TEN_NODE_ETA)]
    return "\n".join(lines) + "\n"
