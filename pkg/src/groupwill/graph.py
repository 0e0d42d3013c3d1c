"""Social graph substrate: interest/tightness scores, willingness, connectivity.

Nodes carry an interest score eta and a blending weight lambda; edges carry a
directed tightness score tau(i, j) that may differ from tau(j, i).  Undirected
input is stored half-weight in both directions so that the directed double sum
used by :func:`willingness` reproduces single-counted arithmetic for symmetric
instances.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidMemberError


class WeightMode(Enum):
    """How node interest and edge tightness combine into willingness."""

    UNWEIGHTED = "unweighted"
    LAMBDA_WEIGHTED = "lambda"


@dataclass(frozen=True)
class NodeRecord:
    """Per-node scores: interest eta and blending weight lambda in [0, 1]."""

    interest: float
    lam: float = 0.5

    def __post_init__(self) -> None:
        if not np.isfinite(self.interest):
            raise ValueError(f"interest must be finite, got {self.interest}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")


class SocialGraph:
    """Immutable directed graph over dense integer node ids 0..n-1.

    ``adj_out[i]`` / ``adj_in[i]`` hold (neighbor, tau) pairs sorted by
    neighbor id; ``nbrs[i]`` is the sorted union of out- and in-neighbors and
    defines undirected reachability.  Safe to share across threads/processes.
    """

    __slots__ = ("n", "eta", "lam", "adj_out", "adj_in", "nbrs", "labels",
                 "_id_of", "_component", "_arc_np")

    def __init__(self, eta: Sequence[float], lam: Sequence[float],
                 arcs: Iterable[tuple[int, int, float]],
                 labels: Sequence[str] | None = None) -> None:
        self.n = len(eta)
        self.eta = np.asarray(eta, dtype=np.float64)
        self.lam = np.asarray(lam, dtype=np.float64)
        if self.lam.shape != (self.n,):
            raise ValueError("eta and lambda must have the same length")
        if not np.all(np.isfinite(self.eta)):
            raise ValueError("interest scores must be finite")
        if np.any(self.lam < 0.0) or np.any(self.lam > 1.0):
            raise ValueError("lambda values must lie in [0, 1]")
        if labels is None:
            labels = [str(i) for i in range(self.n)]
        if len(labels) != self.n:
            raise ValueError("label table length mismatch")
        self.labels = list(labels)
        self._id_of = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._id_of) != self.n:
            raise ValueError("duplicate node labels")

        out: list[dict[int, float]] = [dict() for _ in range(self.n)]
        inn: list[dict[int, float]] = [dict() for _ in range(self.n)]
        for i, j, t in arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidMemberError(f"arc ({i}, {j}) references unknown node")
            if i == j:
                raise ValueError(f"self-loop on node {i} is not allowed")
            if j in out[i]:
                raise ValueError(f"duplicate arc ({i}, {j})")
            t = float(t)
            if not np.isfinite(t):
                raise ValueError(f"tightness on arc ({i}, {j}) must be finite")
            out[i][j] = t
            inn[j][i] = t
        self.adj_out: list[list[tuple[int, float]]] = [
            sorted(d.items()) for d in out]
        self.adj_in: list[list[tuple[int, float]]] = [
            sorted(d.items()) for d in inn]
        self.nbrs: list[list[int]] = [
            sorted(set(out[i]) | set(inn[i])) for i in range(self.n)]
        self._component: np.ndarray | None = None
        self._arc_np: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_directed(cls, eta: Sequence[float],
                      arcs: Iterable[tuple[int, int, float]],
                      lam: Sequence[float] | None = None,
                      labels: Sequence[str] | None = None) -> "SocialGraph":
        """Build from directed (i, j, tau) arcs; weights stored verbatim."""
        if lam is None:
            lam = [0.5] * len(eta)
        return cls(eta, lam, arcs, labels)

    @classmethod
    def from_undirected(cls, eta: Sequence[float],
                        edges: Iterable[tuple[int, int, float]],
                        lam: Sequence[float] | None = None,
                        labels: Sequence[str] | None = None) -> "SocialGraph":
        """Build from undirected (i, j, t) edges, stored as tau = t/2 each way."""
        arcs: list[tuple[int, int, float]] = []
        for i, j, t in edges:
            arcs.append((i, j, t / 2.0))
            arcs.append((j, i, t / 2.0))
        return cls.from_directed(eta, arcs, lam, labels)

    # -- basic queries -----------------------------------------------------

    def id_of(self, label: str) -> int:
        try:
            return self._id_of[label]
        except KeyError:
            raise InvalidMemberError(f"unknown node label {label!r}") from None

    def tau(self, i: int, j: int) -> float:
        """Stored tightness on arc (i, j); 0.0 when the arc is absent."""
        row = self.adj_out[i]
        pos = bisect_left(row, (j, -np.inf))
        if pos < len(row) and row[pos][0] == j:
            return row[pos][1]
        return 0.0

    def arcs(self) -> Iterator[tuple[int, int, float]]:
        for i, row in enumerate(self.adj_out):
            for j, t in row:
                yield i, j, t

    def arc_count(self) -> int:
        return sum(len(row) for row in self.adj_out)

    def node_strength(self, i: int) -> float:
        """eta_i plus every incident tau, both directions."""
        return float(self.eta[i]
                     + sum(t for _, t in self.adj_out[i])
                     + sum(t for _, t in self.adj_in[i]))

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sources, targets, taus) arrays in (i, j) order, cached."""
        if self._arc_np is None:
            m = self.arc_count()
            src = np.empty(m, dtype=np.int64)
            dst = np.empty(m, dtype=np.int64)
            tau = np.empty(m, dtype=np.float64)
            pos = 0
            for i, row in enumerate(self.adj_out):
                for j, t in row:
                    src[pos] = i
                    dst[pos] = j
                    tau[pos] = t
                    pos += 1
            self._arc_np = (src, dst, tau)
        return self._arc_np

    def component_labels(self) -> np.ndarray:
        """Connected-component id per node, under undirected reachability."""
        if self._component is None:
            import scipy.sparse as sp
            from scipy.sparse.csgraph import connected_components
            src, dst, _ = self.arc_arrays()
            mat = sp.coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)),
                                shape=(self.n, self.n))
            _, labels = connected_components(mat, directed=False)
            self._component = labels.astype(np.int64)
        return self._component

    def component_sizes(self) -> np.ndarray:
        comp = self.component_labels()
        return np.bincount(comp)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "eta": self.eta.tolist(),
            "lam": self.lam.tolist(),
            "labels": self.labels,
            "arcs": [[i, j, t] for i, j, t in self.arcs()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SocialGraph":
        return cls(d["eta"], d["lam"], [tuple(a) for a in d["arcs"]], d["labels"])


@dataclass(frozen=True)
class Solution:
    """A k-node group with its willingness and connectivity flag."""

    members: frozenset[int]
    willingness: float
    connected: bool

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def verify(self, graph: SocialGraph,
               mode: WeightMode = WeightMode.UNWEIGHTED,
               rel_tol: float = 1e-9) -> None:
        fresh = willingness(graph, self.members, mode)
        scale = max(1.0, abs(fresh))
        if abs(fresh - self.willingness) > rel_tol * scale:
            raise AssertionError(
                f"cached willingness {self.willingness} != recomputed {fresh}")
        if self.connected != is_connected(graph, self.members):
            raise AssertionError("connectivity flag inconsistent")


def _validate_members(graph: SocialGraph, members: Iterable[int]) -> list[int]:
    out = []
    for v in members:
        v = int(v)
        if not 0 <= v < graph.n:
            raise InvalidMemberError(f"node id {v} outside 0..{graph.n - 1}")
        out.append(v)
    return out


def willingness(graph: SocialGraph, members: Iterable[int],
                mode: WeightMode = WeightMode.UNWEIGHTED) -> float:
    """Total willingness of a member set.

    Unweighted: sum over members of eta_i plus tau(i, j) for every arc whose
    endpoints both lie in the set (so a symmetric pair tau(i,j), tau(j,i) is
    counted once in each direction).  Lambda-weighted: eta is scaled by
    lambda_i and the tightness sum by (1 - lambda_i).
    """
    mem = set(_validate_members(graph, members))
    lam_mode = mode is WeightMode.LAMBDA_WEIGHTED
    total = 0.0
    for i in sorted(mem):
        if lam_mode:
            edge_sum = 0.0
            for j, t in graph.adj_out[i]:
                if j in mem:
                    edge_sum += t
            li = graph.lam[i]
            total += li * graph.eta[i] + (1.0 - li) * edge_sum
        else:
            # Linear accumulation in (node, arc) order; the exported model's
            # objective replays the identical sequence of additions.
            total += float(graph.eta[i])
            for j, t in graph.adj_out[i]:
                if j in mem:
                    total += t
    return float(total)


def is_connected(graph: SocialGraph, members: Iterable[int]) -> bool:
    """True iff the induced subgraph on members is connected.

    An edge exists between members when tau is stored in either direction.
    """
    mem = set(_validate_members(graph, members))
    if not mem:
        raise ValueError("members must be nonempty")
    start = next(iter(mem))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in graph.nbrs[u]:
            if v in mem and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(mem)


def frontier(graph: SocialGraph, partial: Iterable[int]) -> set[int]:
    """Nodes outside the partial set adjacent (either direction) to it."""
    part = set(_validate_members(graph, partial))
    out: set[int] = set()
    for u in part:
        out.update(graph.nbrs[u])
    return out - part


def solution_for(graph: SocialGraph, members: Iterable[int],
                 mode: WeightMode = WeightMode.UNWEIGHTED) -> Solution:
    mem = frozenset(_validate_members(graph, members))
    return Solution(mem, willingness(graph, mem, mode),
                    is_connected(graph, mem) if mem else False)


# -- derived graphs ---------------------------------------------------------

def induced_subgraph(graph: SocialGraph,
                     keep: Iterable[int]) -> tuple[SocialGraph, list[int]]:
    """Restrict to ``keep``; returns the new graph and old-id-of-new-id table."""
    old_ids = sorted(set(_validate_members(graph, keep)))
    new_of = {o: i for i, o in enumerate(old_ids)}
    arcs = [(new_of[i], new_of[j], t) for i, j, t in graph.arcs()
            if i in new_of and j in new_of]
    sub = SocialGraph(graph.eta[old_ids], graph.lam[old_ids], arcs,
                      [graph.labels[o] for o in old_ids])
    return sub, old_ids


def subgraph_without(graph: SocialGraph,
                     removed: Iterable[int]) -> tuple[SocialGraph, list[int]]:
    gone = set(_validate_members(graph, removed))
    return induced_subgraph(graph, (i for i in range(graph.n) if i not in gone))


def fold_lambda(graph: SocialGraph) -> SocialGraph:
    """Graph whose unweighted willingness equals the lambda-weighted one here.

    eta'_i = lambda_i * eta_i and tau'(i, j) = (1 - lambda_i) * tau(i, j).
    """
    arcs = [(i, j, (1.0 - graph.lam[i]) * t) for i, j, t in graph.arcs()]
    return SocialGraph(graph.lam * graph.eta, graph.lam, arcs, graph.labels)


def normalized(graph: SocialGraph) -> SocialGraph:
    """Min-max rescale eta and tau to [0, 1]; constant ranges are left as-is."""
    eta = graph.eta.copy()
    span = float(eta.max() - eta.min()) if graph.n else 0.0
    if span > 0.0:
        eta = (eta - eta.min()) / span
    taus = [t for _, _, t in graph.arcs()]
    if taus:
        lo, hi = min(taus), max(taus)
        if hi > lo:
            arcs = [(i, j, (t - lo) / (hi - lo)) for i, j, t in graph.arcs()]
        else:
            arcs = list(graph.arcs())
    else:
        arcs = []
    return SocialGraph(eta, graph.lam, arcs, graph.labels)


# -- file formats -------------------------------------------------------------

def parse_edge_list(text: str) -> tuple[list[tuple[str, str, float]], bool]:
    """Parse an edge-list file body.

    One edge per line, ``u v t`` with t optional (default 1.0); ``#`` starts a
    comment; a bare ``directed`` line anywhere in the header region switches
    the file to directed arcs (no half-weight storage).
    """
    edges: list[tuple[str, str, float]] = []
    directed = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "directed":
            if edges:
                raise ValueError("'directed' flag must precede all edges")
            directed = True
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 'u v [t]', got {raw!r}")
        t = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((parts[0], parts[1], t))
    return edges, directed


def parse_node_scores(text: str) -> dict[str, tuple[float, float | None]]:
    """Parse a score file body: ``v eta [lambda]`` per line, ``#`` comments."""
    scores: dict[str, tuple[float, float | None]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 'v eta [lambda]', got {raw!r}")
        lam = float(parts[2]) if len(parts) == 3 else None
        if parts[0] in scores:
            raise ValueError(f"line {lineno}: duplicate score for node {parts[0]}")
        scores[parts[0]] = (float(parts[1]), lam)
    return scores


def build_graph(edge_text: str, score_text: str | None = None,
                normalize: bool = False) -> SocialGraph:
    """Assemble a graph from edge-list and node-score file bodies.

    Node ids are assigned by numeric order when every label parses as an
    integer, otherwise by first appearance (edge file first, then scores).
    Unlisted nodes default to eta = 0 and lambda = 0.5.
    """
    edges, directed = parse_edge_list(edge_text)
    scores = parse_node_scores(score_text) if score_text else {}

    seen: dict[str, None] = {}
    for u, v, _ in edges:
        seen.setdefault(u)
        seen.setdefault(v)
    for v in scores:
        seen.setdefault(v)
    labels = list(seen)
    if labels and all(lab.lstrip("+-").isdigit() for lab in labels):
        labels.sort(key=int)
    ids = {lab: i for i, lab in enumerate(labels)}

    eta = [0.0] * len(labels)
    lam = [0.5] * len(labels)
    for lab, (e, l) in scores.items():
        eta[ids[lab]] = e
        if l is not None:
            lam[ids[lab]] = l

    triples = [(ids[u], ids[v], t) for u, v, t in edges]
    if directed:
        graph = SocialGraph.from_directed(eta, triples, lam, labels)
    else:
        graph = SocialGraph.from_undirected(eta, triples, lam, labels)
    return normalized(graph) if normalize else graph


def load_graph(edge_path: str, score_path: str | None = None,
               normalize: bool = False) -> SocialGraph:
    with open(edge_path, "r", encoding="utf-8") as fh:
        edge_text = fh.read()
    score_text = None
    if score_path is not None:
        with open(score_path, "r", encoding="utf-8") as fh:
            score_text = fh.read()
    return build_graph(edge_text, score_text, normalize=normalize)
