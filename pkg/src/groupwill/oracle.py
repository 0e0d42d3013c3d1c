"""Exact ground truth: exhaustive search over k-node groups.

Connected subsets are enumerated once each by anchored frontier extension:
for every anchor a, subsets whose minimum id is a are grown using only nodes
with larger ids, with an extension queue that prevents revisiting.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from .errors import InfeasibleError, ScaleGuardError
from .graph import SocialGraph, Solution, WeightMode, is_connected, willingness

MAX_NODES = 25
MAX_SUBSETS = 10_000_000


def _guard(graph: SocialGraph, k: int, override: bool) -> None:
    if k < 1 or k > graph.n:
        raise ValueError(f"k={k} outside 1..{graph.n}")
    if override:
        return
    if graph.n > MAX_NODES or comb(graph.n, k) > MAX_SUBSETS:
        raise ScaleGuardError(
            f"refusing exhaustive search at n={graph.n}, k={k}; "
            "pass override=True to force")


def connected_subsets(graph: SocialGraph, k: int) -> Iterator[frozenset[int]]:
    """Yield every connected k-subset exactly once."""
    if k == 1:
        for v in range(graph.n):
            yield frozenset((v,))
        return
    nbrs = graph.nbrs

    def extend(sub: list[int], ext: list[int], anchor: int) -> Iterator[frozenset[int]]:
        if len(sub) == k:
            yield frozenset(sub)
            return
        # Each frame consumes its own copy of the queue so a node skipped
        # here can never re-enter via a deeper frame.
        queue = list(ext)
        while queue:
            v = queue.pop()
            sub.append(v)
            grown = queue + [w for w in nbrs[v]
                             if w > anchor and w not in sub and w not in queue
                             and not any(w in nbrs[u] for u in sub[:-1])]
            yield from extend(sub, grown, anchor)
            sub.pop()

    for anchor in range(graph.n):
        ext = [v for v in nbrs[anchor] if v > anchor]
        yield from extend([anchor], ext, anchor)


def _best(graph: SocialGraph, subsets: Iterable[frozenset[int]],
          mode: WeightMode) -> Solution | None:
    best_w = -float("inf")
    best_members: tuple[int, ...] | None = None
    for sub in subsets:
        w = willingness(graph, sub, mode)
        key = tuple(sorted(sub))
        if w > best_w or (w == best_w and best_members is not None
                          and key < best_members):
            best_w = w
            best_members = key
    if best_members is None:
        return None
    members = frozenset(best_members)
    return Solution(members, best_w, is_connected(graph, members))


def brute_force(graph: SocialGraph, k: int,
                mode: WeightMode = WeightMode.UNWEIGHTED,
                override: bool = False) -> Solution:
    """Maximum-willingness connected k-group; ties break to the
    lexicographically smallest member set."""
    _guard(graph, k, override)
    best = _best(graph, connected_subsets(graph, k), mode)
    if best is None:
        raise InfeasibleError(f"no connected {k}-node group exists")
    return best


def brute_force_dis(graph: SocialGraph, k: int,
                    mode: WeightMode = WeightMode.UNWEIGHTED,
                    override: bool = False) -> Solution:
    """Maximum-willingness k-group with no connectivity requirement."""
    _guard(graph, k, override)
    subsets = (frozenset(c) for c in combinations(range(graph.n), k))
    best = _best(graph, subsets, mode)
    assert best is not None
    return best


def brute_force_containing(graph: SocialGraph, k: int, required: Iterable[int],
                           mode: WeightMode = WeightMode.UNWEIGHTED,
                           override: bool = False) -> Solution | None:
    """Best connected k-group that contains every required node, or None."""
    _guard(graph, k, override)
    req = frozenset(required)
    subsets = (s for s in connected_subsets(graph, k) if req <= s)
    return _best(graph, subsets, mode)
