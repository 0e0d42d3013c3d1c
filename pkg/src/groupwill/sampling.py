"""Random expansion of partial solutions into connected k-node samples.

Each sample owns an rng stream derived from (master seed, start node, stage,
sample index), so the multiset of samples per (start, stage) is identical no
matter how the work is split across workers.
"""

from __future__ import annotations

import multiprocessing
import random
import threading
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleStartError
from .graph import SocialGraph, frontier, is_connected, willingness


@dataclass(frozen=True)
class SampleVector:
    """One sampled group: sorted member ids plus its willingness."""

    members: tuple[int, ...]
    willingness: float

    def bits(self, n: int) -> tuple[int, ...]:
        row = [0] * n
        for v in self.members:
            row[v] = 1
        return tuple(row)


def pick_better(a: SampleVector | None, b: SampleVector | None) -> SampleVector | None:
    """Commutative max by willingness; ties prefer the smaller member tuple."""
    if a is None:
        return b
    if b is None:
        return a
    if a.willingness != b.willingness:
        return a if a.willingness > b.willingness else b
    return a if a.members <= b.members else b


def stream(seed: int, start: int, stage: int, index: int) -> random.Random:
    """Deterministic per-sample rng; stable across platforms and runs."""
    return random.Random(f"{seed}/{start}/{stage}/{index}")


class _Workspace:
    """Reusable visited/member stamps so expansions avoid per-sample sets."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.mark = [0] * n          # member or frontier this sample
        self.member_stamp = [0] * n  # member this sample (value-weighted path)
        self.stamp = 0

    def next_stamp(self) -> int:
        self.stamp += 1
        return self.stamp


_LOCAL = threading.local()


def _workspace(n: int) -> _Workspace:
    ws = getattr(_LOCAL, "ws", None)
    if ws is None or ws.n < n:
        ws = _Workspace(n)
        _LOCAL.ws = ws
    return ws


def _delta(graph: SocialGraph, v: int, member_stamp: list[int], stamp: int) -> float:
    """Willingness increment from adding v to the stamped member set."""
    total = float(graph.eta[v])
    for j, t in graph.adj_out[v]:
        if member_stamp[j] == stamp:
            total += t
    for j, t in graph.adj_in[v]:
        if member_stamp[j] == stamp:
            total += t
    return total


def _expand(graph: SocialGraph, k: int, rng: random.Random,
            ws: _Workspace, initial: Sequence[int],
            p: np.ndarray | None = None,
            value_weighted: bool = False) -> SampleVector:
    """Grow ``initial`` to k nodes by repeated frontier draws.

    p = None draws uniformly; otherwise the selection-probability vector is
    restricted to the frontier and renormalized (uniform fallback when all
    restricted mass is zero).  value_weighted draws each node proportionally
    to the willingness of the group it would create, shifted to be positive.
    """
    stamp = ws.next_stamp()
    mark = ws.mark
    nbrs = graph.nbrs
    members: list[int] = list(initial)
    front: list[int] = []
    for v in members:
        mark[v] = stamp
    if value_weighted:
        member_stamp = ws.member_stamp
        total = 0.0
        for v in members:
            total += _delta(graph, v, member_stamp, stamp)
            member_stamp[v] = stamp
    for v in members:
        for u in nbrs[v]:
            if mark[u] != stamp:
                mark[u] = stamp
                front.append(u)

    while len(members) < k:
        if not front:
            raise InfeasibleStartError(
                f"component around {initial[0]} has fewer than {k} nodes")
        if value_weighted:
            weights = [total + _delta(graph, v, member_stamp, stamp) for v in front]
            lo = min(weights)
            if lo <= 0.0:
                shift = 1.0 - lo
                weights = [w + shift for w in weights]
            pos = _draw(rng, weights)
        elif p is not None:
            weights = p[front]
            mass = float(weights.sum())
            if mass <= 0.0:
                pos = rng.randrange(len(front))
            else:
                cum = np.cumsum(weights)
                pos = int(np.searchsorted(cum, rng.random() * mass, side="right"))
                if pos >= len(front):
                    pos = len(front) - 1
        else:
            pos = rng.randrange(len(front))
        v = front[pos]
        front[pos] = front[-1]
        front.pop()
        members.append(v)
        if value_weighted:
            total += _delta(graph, v, member_stamp, stamp)
            member_stamp[v] = stamp
        for u in nbrs[v]:
            if mark[u] != stamp:
                mark[u] = stamp
                front.append(u)
    return SampleVector(tuple(sorted(members)), willingness(graph, members))


def _draw(rng: random.Random, weights: Sequence[float]) -> int:
    total = 0.0
    for w in weights:
        total += w
    r = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if r < acc:
            return i
    return len(weights) - 1


def expand_uniform(graph: SocialGraph, start: int, k: int,
                   rng: random.Random) -> SampleVector:
    """Uniform random frontier expansion from a single start node."""
    return _expand(graph, k, rng, _workspace(graph.n), [start])


def expand_weighted(graph: SocialGraph, start: int, k: int,
                    p: np.ndarray, rng: random.Random) -> SampleVector:
    """Frontier expansion drawing from a selection-probability vector."""
    if len(p) != graph.n:
        raise ValueError("probability vector length must equal node count")
    return _expand(graph, k, rng, _workspace(graph.n), [start],
                   p=np.asarray(p, dtype=np.float64))


def frontier_distribution(graph: SocialGraph, partial: Iterable[int],
                          p: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Frontier nodes with their renormalized selection probabilities."""
    nodes = sorted(frontier(graph, partial))
    weights = np.asarray([p[v] for v in nodes], dtype=np.float64)
    mass = weights.sum()
    if mass <= 0.0:
        probs = np.full(len(nodes), 1.0 / len(nodes)) if nodes else weights
    else:
        probs = weights / mass
    return nodes, probs


@dataclass
class BatchResult:
    """Aggregate of a batch of samples from one start node."""

    samples: list[SampleVector] = field(default_factory=list)
    count: int = 0
    worst: float = float("inf")     # c
    best_value: float = -float("inf")  # d
    best: SampleVector | None = None
    sum_w: float = 0.0
    sumsq_w: float = 0.0

    def add(self, sample: SampleVector, keep: bool = True) -> None:
        if keep:
            self.samples.append(sample)
        self.count += 1
        self.worst = min(self.worst, sample.willingness)
        self.best_value = max(self.best_value, sample.willingness)
        self.best = pick_better(self.best, sample)
        self.sum_w += sample.willingness
        self.sumsq_w += sample.willingness * sample.willingness

    def merge(self, other: "BatchResult") -> None:
        self.samples.extend(other.samples)
        self.count += other.count
        self.worst = min(self.worst, other.worst)
        self.best_value = max(self.best_value, other.best_value)
        self.best = pick_better(self.best, other.best)
        self.sum_w += other.sum_w
        self.sumsq_w += other.sumsq_w


def sample_batch(graph: SocialGraph, start: int, k: int, count: int,
                 p: np.ndarray | None = None, seed: int = 0, stage: int = 1,
                 partial: Sequence[int] | None = None,
                 stream_key: int | None = None,
                 value_weighted: bool = False,
                 keep_samples: bool = True) -> BatchResult:
    """Draw ``count`` samples from one start node and aggregate their stats.

    Aggregation (worst c, best d, argmax sample) is order-independent.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if p is not None:
        p = np.asarray(p, dtype=np.float64)
    initial = list(partial) if partial is not None else [start]
    key = start if stream_key is None else stream_key
    ws = _workspace(graph.n)
    out = BatchResult()
    for idx in range(count):
        rng = stream(seed, key, stage, idx)
        out.add(_expand(graph, k, rng, ws, initial, p=p,
                        value_weighted=value_weighted), keep=keep_samples)
    return out


def batch_from_member_sets(graph: SocialGraph,
                           member_sets: Iterable[Iterable[int]],
                           k: int | None = None) -> BatchResult:
    """Aggregate pre-chosen member sets as if they had been sampled.

    Used to replay scripted expansion traces; every set must be connected and,
    when k is given, of size k.
    """
    out = BatchResult()
    for ms in member_sets:
        members = tuple(sorted(ms))
        if k is not None and len(members) != k:
            raise ValueError(f"scripted sample {members} does not have {k} members")
        if not is_connected(graph, members):
            raise ValueError(f"scripted sample {members} is not connected")
        out.add(SampleVector(members, willingness(graph, members)))
    return out


# -- parallel batch execution -------------------------------------------------

@dataclass(frozen=True)
class BatchJob:
    """One start node's sampling order for a stage."""

    start: int
    stage: int
    count: int
    p: np.ndarray | None = None
    partial: tuple[int, ...] | None = None
    stream_key: int | None = None
    value_weighted: bool = False
    keep_samples: bool = True


_FORK_STATE: tuple[SocialGraph, int, int, list[BatchJob]] | None = None


def _run_chunk(task: tuple[int, int, int]) -> tuple[int, BatchResult]:
    job_idx, lo, hi = task
    assert _FORK_STATE is not None
    graph, k, seed, jobs = _FORK_STATE
    job = jobs[job_idx]
    initial = list(job.partial) if job.partial is not None else [job.start]
    key = job.start if job.stream_key is None else job.stream_key
    ws = _workspace(graph.n)
    out = BatchResult()
    for idx in range(lo, hi):
        rng = stream(seed, key, job.stage, idx)
        out.add(_expand(graph, k, rng, ws, initial, p=job.p,
                        value_weighted=job.value_weighted),
                keep=job.keep_samples)
    return job_idx, out


def run_jobs(graph: SocialGraph, k: int, jobs: Sequence[BatchJob], seed: int,
             workers: int = 1) -> list[BatchResult]:
    """Run sampling jobs, fanning samples out across worker processes.

    Results are bit-identical at any worker count because each sample's rng
    stream is derived from its own index.
    """
    global _FORK_STATE
    if workers > 1 and "fork" not in multiprocessing.get_all_start_methods():
        warnings.warn("fork start method unavailable; sampling sequentially")
        workers = 1
    if workers <= 1:
        return [sample_batch(graph, job.start, k, job.count, p=job.p, seed=seed,
                             stage=job.stage, partial=job.partial,
                             stream_key=job.stream_key,
                             value_weighted=job.value_weighted,
                             keep_samples=job.keep_samples)
                if job.count > 0 else BatchResult() for job in jobs]

    tasks: list[tuple[int, int, int]] = []
    total = sum(job.count for job in jobs)
    chunk = max(1, total // (workers * 4))
    for ji, job in enumerate(jobs):
        lo = 0
        while lo < job.count:
            hi = min(job.count, lo + chunk)
            tasks.append((ji, lo, hi))
            lo = hi
    results = [BatchResult() for _ in jobs]
    ctx = multiprocessing.get_context("fork")
    _FORK_STATE = (graph, k, seed, list(jobs))
    try:
        with ctx.Pool(processes=workers) as pool:
            batched = max(1, len(tasks) // (workers * 8))
            for ji, part in pool.map(_run_chunk, tasks, chunksize=batched):
                results[ji].merge(part)
    finally:
        _FORK_STATE = None
    return results
