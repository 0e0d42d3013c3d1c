"""Graph transforms for planning scenarios.

Couples are merged into one node, foes get a prohibitive negative tightness,
invitation/exhibition/party adjust the lambda profile, and a dominant virtual
node relaxes the connectivity requirement so disconnected groups can be found
with the same solvers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

from .errors import EmptyCandidateError, InvalidMemberError
from .graph import (SocialGraph, Solution, WeightMode, induced_subgraph,
                    is_connected, willingness)


@dataclass(frozen=True)
class ScenarioResult:
    """Transformed graph plus how to interpret it."""

    graph: SocialGraph
    mode: WeightMode = WeightMode.UNWEIGHTED
    old_ids: list[int] | None = None   # old id per new id, when nodes were dropped
    notes: tuple[str, ...] = ()


def _check_node(graph: SocialGraph, i: int) -> None:
    if not 0 <= i < graph.n:
        raise InvalidMemberError(f"node id {i} outside 0..{graph.n - 1}")


def merge_couple(graph: SocialGraph, i: int, j: int) -> SocialGraph:
    """Replace nodes i and j by one node a with summed scores.

    eta_a = eta_i + eta_j; for every outside neighbor b, tau(a, b) =
    tau(i, b) + tau(j, b) and symmetrically for incoming arcs.  Arcs between
    i and j are dropped.  The caller must shrink the group size k accordingly.
    """
    if i == j:
        raise ValueError("cannot merge a node with itself")
    _check_node(graph, i)
    _check_node(graph, j)
    lo, hi = min(i, j), max(i, j)

    def new_id(old: int) -> int:
        # Merged node takes lo's slot; ids above hi shift down by one.
        if old in (i, j):
            return lo
        return old - 1 if old > hi else old

    eta = [graph.eta[v] for v in range(graph.n) if v != hi]
    eta[lo] = float(graph.eta[i] + graph.eta[j])
    lam = [graph.lam[v] for v in range(graph.n) if v != hi]
    lam[lo] = float((graph.lam[i] + graph.lam[j]) / 2.0)
    labels = [graph.labels[v] for v in range(graph.n) if v != hi]
    labels[lo] = f"{graph.labels[i]}+{graph.labels[j]}"

    acc: dict[tuple[int, int], float] = {}
    for u, v, t in graph.arcs():
        if {u, v} == {i, j}:
            continue
        a, b = new_id(u), new_id(v)
        acc[(a, b)] = acc.get((a, b), 0.0) + t
    arcs = [(a, b, t) for (a, b), t in sorted(acc.items())]
    warnings.warn("node merge shrinks the graph; adjust the group size k",
                  stacklevel=2)
    return SocialGraph(eta, lam, arcs, labels)


def default_foe_penalty(graph: SocialGraph, i: int, j: int) -> float:
    """1 + sum|eta| + sum|tau| over all arcs except the pair being marked."""
    total = float(sum(abs(float(e)) for e in graph.eta))
    for u, v, t in graph.arcs():
        if (u, v) in ((i, j), (j, i)):
            continue
        total += abs(t)
    return 1.0 + total


def mark_foe(graph: SocialGraph, i: int, j: int,
             penalty: float | None = None) -> SocialGraph:
    """Set tau(i, j) and tau(j, i) to -penalty so no group keeps both nodes.

    The default penalty (computed without the pair's current arcs, which makes
    repeated marking idempotent) guarantees any group containing both has
    negative willingness.
    """
    _check_node(graph, i)
    _check_node(graph, j)
    if i == j:
        raise ValueError("a node cannot be its own foe")
    if penalty is None:
        penalty = default_foe_penalty(graph, i, j)
    if penalty <= 0:
        raise ValueError("penalty must be positive")
    arcs = [(u, v, t) for u, v, t in graph.arcs()
            if (u, v) not in ((i, j), (j, i))]
    arcs.append((i, j, -penalty))
    arcs.append((j, i, -penalty))
    return SocialGraph(graph.eta, graph.lam, arcs, graph.labels)


def _with_lambda(graph: SocialGraph, lam: list[float]) -> SocialGraph:
    return SocialGraph(graph.eta, lam, list(graph.arcs()), graph.labels)


def exhibition_profile(graph: SocialGraph) -> ScenarioResult:
    """Interest only: lambda = 1 everywhere."""
    g = _with_lambda(graph, [1.0] * graph.n)
    return ScenarioResult(g, WeightMode.LAMBDA_WEIGHTED)


def party_profile(graph: SocialGraph) -> ScenarioResult:
    """Tightness only: lambda = 0 everywhere."""
    g = _with_lambda(graph, [0.0] * graph.n)
    return ScenarioResult(g, WeightMode.LAMBDA_WEIGHTED)


def invitation_profile(graph: SocialGraph, host: int) -> ScenarioResult:
    """Restrict candidates to the host and its neighbors; guests get lambda=1."""
    _check_node(graph, host)
    neighbors = graph.nbrs[host]
    if not neighbors:
        raise EmptyCandidateError(f"host {host} has no neighbors to invite")
    keep = sorted(set(neighbors) | {host})
    sub, old_ids = induced_subgraph(graph, keep)
    lam = list(sub.lam)
    for new, old in enumerate(old_ids):
        if old != host:
            lam[new] = 1.0
    return ScenarioResult(_with_lambda(sub, lam), WeightMode.LAMBDA_WEIGHTED,
                          old_ids=old_ids)


def apply_lambda_profile(graph: SocialGraph, kind: str,
                         host: int | None = None) -> ScenarioResult:
    if kind == "exhibition":
        return exhibition_profile(graph)
    if kind == "party":
        return party_profile(graph)
    if kind == "invitation":
        if host is None:
            raise ValueError("invitation requires a host node")
        return invitation_profile(graph, host)
    raise ValueError(f"unknown lambda profile {kind!r}")


def add_virtual_node(graph: SocialGraph, eps: float = 1.0,
                     mode: WeightMode = WeightMode.UNWEIGHTED
                     ) -> tuple[SocialGraph, int]:
    """Append a node adjacent to everyone with zero tightness both ways.

    Its interest exceeds the whole graph's willingness mass by eps, so every
    optimal (k+1)-group must contain it; any k nodes plus it form a connected
    group, which removes the connectivity constraint for the remaining k.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if mode is WeightMode.LAMBDA_WEIGHTED:
        mass = float(sum(graph.lam[i] * graph.eta[i]
                         + (1.0 - graph.lam[i]) * sum(t for _, t in graph.adj_out[i])
                         for i in range(graph.n)))
    else:
        mass = float(graph.eta.sum() + sum(t for _, _, t in graph.arcs()))
    vbar = graph.n
    eta = list(graph.eta) + [eps + mass]
    lam = list(graph.lam) + [1.0]
    arcs = list(graph.arcs())
    for j in range(graph.n):
        arcs.append((vbar, j, 0.0))
        arcs.append((j, vbar, 0.0))
    label = "_virtual"
    while label in graph.labels:
        label += "_"
    return SocialGraph(eta, lam, arcs, graph.labels + [label]), vbar


def apply_scenario_spec(graph: SocialGraph, spec: dict) -> "ScenarioApplication":
    """Apply a {kind, ...} scenario object as used by the CLI and service.

    Kinds: couple {pairs}, foe {pairs, penalty?}, invitation {host},
    exhibition, party, separate_groups {eps?}.  Node references may be labels
    or integer ids.  Couple merges shrink the graph, so the caller must add a
    note's worth of attention to the group size k.
    """
    def node_id(g: SocialGraph, ref) -> int:
        return g.id_of(ref) if isinstance(ref, str) else int(ref)

    kind = spec.get("kind")
    notes: list[str] = []
    if kind == "couple":
        g = graph
        for pair in spec["pairs"]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                g = merge_couple(g, node_id(g, pair[0]), node_id(g, pair[1]))
            notes.append(f"merged {pair[0]} and {pair[1]}; adjust k down by 1")
        return ScenarioApplication(g, WeightMode.UNWEIGHTED, None, tuple(notes), None)
    if kind == "foe":
        g = graph
        for pair in spec["pairs"]:
            g = mark_foe(g, node_id(g, pair[0]), node_id(g, pair[1]),
                         spec.get("penalty"))
        return ScenarioApplication(g, WeightMode.UNWEIGHTED, None, tuple(notes), None)
    if kind in ("invitation", "exhibition", "party"):
        host = node_id(graph, spec["host"]) if kind == "invitation" else None
        res = apply_lambda_profile(graph, kind, host)
        return ScenarioApplication(res.graph, res.mode, res.old_ids, res.notes, None)
    if kind == "separate_groups":
        eps = float(spec.get("eps", 1.0))
        if eps <= 0:
            raise ValueError("eps must be positive")
        return ScenarioApplication(graph, WeightMode.UNWEIGHTED, None,
                                   ("connectivity constraint relaxed",), eps)
    raise ValueError(f"unknown scenario kind {kind!r}")


@dataclass(frozen=True)
class ScenarioApplication:
    """Result of applying a scenario spec: graph, evaluation mode, and how to
    run the solver (separate_eps set means solve without connectivity)."""

    graph: SocialGraph
    mode: WeightMode
    old_ids: list[int] | None
    notes: tuple[str, ...]
    separate_eps: float | None


def solve_waso_dis(graph: SocialGraph, k: int,
                   solver: Callable[[SocialGraph, int], Solution],
                   mode: WeightMode = WeightMode.UNWEIGHTED,
                   eps: float = 1.0) -> Solution:
    """Best k-group with no connectivity requirement, via the virtual node.

    ``solver(graph, k)`` must return a connected-group Solution; it is run at
    size k+1 on the augmented graph, the virtual node is stripped, and the
    willingness of the remaining k nodes is reported on the original graph.
    """
    if not 1 <= k <= graph.n:
        raise ValueError(f"k={k} outside 1..{graph.n}")
    augmented, vbar = add_virtual_node(graph, eps, mode)
    sol = solver(augmented, k + 1)
    members = frozenset(sol.members) - {vbar}
    if len(members) != k:
        # The virtual node dominates every group, so a correct solver always
        # includes it; if a heuristic missed it, keep the best k of its picks.
        members = max((frozenset(c) for c in combinations(sorted(members), k)),
                      key=lambda c: (willingness(graph, c, mode),
                                     [-v for v in sorted(c)]))
    return Solution(members, willingness(graph, members, mode),
                    is_connected(graph, members))
