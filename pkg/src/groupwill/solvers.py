"""Group solvers: deterministic/randomized greedy and the staged
budget-allocating samplers with cross-entropy refinement.

The staged solvers pick m promising start nodes, then spend a total sample
budget T over r stages; after each stage, budget moves toward the start
whose best sample leads, in the ratio ((d_i - c_b)/(d_j - c_b))^N_b.  The
neighbor-differentiating variant additionally refits a per-start node
selection probability vector to the top-rho samples after every stage.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .errors import InfeasibleError
from .graph import (SocialGraph, Solution, WeightMode, fold_lambda,
                    is_connected, subgraph_without, willingness)
from .sampling import (BatchJob, BatchResult, SampleVector, pick_better,
                       run_jobs)

ALGORITHMS = ("dgreedy", "rgreedy", "cbas", "cbas-nd", "cbas-nd-g", "brute")
DISTRIBUTIONS = ("uniform", "gaussian")

Sampler = Callable[[SocialGraph, BatchJob], BatchResult]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by every solver.

    budget is T, the total number of sampled groups; starts is m (None means
    ceil(n/k)); stages is r (None derives it from the confidence bound);
    rho/smoothing/alpha/confidence are the elite fraction, smoothing weight w,
    closeness ratio, and target probability of identifying the best start.
    """

    k: int
    budget: int = 1000
    starts: int | None = None
    stages: int | None = None
    rho: float = 0.3
    smoothing: float = 0.9
    alpha: float = 0.99
    confidence: float = 0.7
    seed: int = 0
    algorithm: str = "cbas-nd"
    distribution: str = "uniform"
    backtrack_threshold: float = 0.0
    mode: WeightMode = WeightMode.UNWEIGHTED
    workers: int = 1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.starts is not None and self.starts < 1:
            raise ValueError("starts must be >= 1")
        if self.stages is not None and self.stages < 1:
            raise ValueError("stages must be >= 1")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not 0.0 <= self.smoothing <= 1.0:
            raise ValueError("smoothing weight must lie in [0, 1]")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if self.backtrack_threshold < 0.0:
            raise ValueError("backtrack threshold must be >= 0")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def resolved_starts(self, n: int) -> int:
        m = self.starts if self.starts is not None else math.ceil(n / self.k)
        return max(1, min(m, n))


@dataclass
class StartNodeStats:
    """Cumulative sampling record for one start node."""

    start: int
    n_samples: int = 0            # N_i
    worst: float = float("inf")   # c_i
    best_value: float = -float("inf")  # d_i
    best: SampleVector | None = None
    pruned: bool = False
    p: np.ndarray | None = None
    gamma: float = -float("inf")
    sum_w: float = 0.0
    sumsq_w: float = 0.0

    def absorb(self, batch: BatchResult) -> None:
        if batch.count == 0:
            return
        self.n_samples += batch.count
        self.worst = min(self.worst, batch.worst)
        self.best_value = max(self.best_value, batch.best_value)
        self.best = pick_better(self.best, batch.best)
        self.sum_w += batch.sum_w
        self.sumsq_w += batch.sumsq_w

    def mean_std(self, floor: float = 1e-9) -> tuple[float, float]:
        mean = self.sum_w / self.n_samples
        if self.n_samples < 2:
            return mean, floor
        var = (self.sumsq_w - self.n_samples * mean * mean) / (self.n_samples - 1)
        return mean, max(math.sqrt(max(var, 0.0)), floor)


# -- start selection and staging ---------------------------------------------

def select_start_nodes(graph: SocialGraph, m: int) -> list[int]:
    """The m nodes with the largest eta plus incident tau (both directions),
    ties broken toward lower ids."""
    if not 1 <= m <= graph.n:
        raise ValueError(f"m={m} outside 1..{graph.n}")
    src, dst, tau = graph.arc_arrays()
    strength = (graph.eta
                + np.bincount(src, weights=tau, minlength=graph.n)
                + np.bincount(dst, weights=tau, minlength=graph.n))
    if m <= 64 and graph.n > 4 * m:
        order = heapq.nsmallest(m, range(graph.n),
                                key=lambda i: (-strength[i], i))
        return list(order)
    # Stable sort on (-strength, id): ties resolve to the lower id.
    order = np.argsort(-strength, kind="stable")
    return [int(v) for v in order[:m]]


def stage_count(budget: int, m: int, confidence: float, alpha: float,
                k: int, n: int) -> int:
    """Stage count r from the confidence bound, floor-clamped to at least 1.

    r = floor(T*k*ln(alpha) / (n * ln(2(1-P_b) / (n/k - 1)))); when the log
    argument reaches 1 the bound is vacuous and the fallback of 2 applies.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if budget < 1 or k < 1 or n < 1:
        raise ValueError("budget, k and n must be >= 1")
    if not 0.0 < confidence < 1.0 or not 0.0 < alpha <= 1.0:
        raise ValueError("confidence and alpha must lie in (0, 1)")
    if n / k <= 1.0:
        return 2
    arg = 2.0 * (1.0 - confidence) / (n / k - 1.0)
    if arg >= 1.0:
        return 2
    r = math.floor(budget * k * math.log(alpha) / (n * math.log(arg)))
    return max(1, r)


def min_stage_budget(m: int, confidence: float, alpha: float) -> int:
    """Per-stage sample count needed for the start-identification bound."""
    if m < 2:
        raise ValueError("needs at least two start nodes")
    if not 0.0 < confidence < 1.0 or not 0.0 < alpha < 1.0:
        raise ValueError("confidence and alpha must lie in (0, 1)")
    arg = 2.0 * (1.0 - confidence) / (m - 1)
    if arg >= 1.0:
        return m
    return math.ceil(m * math.log(arg) / math.log(alpha))


def stages_for_budget(best_budget: float, stage_budget: int, k: int, n: int) -> int:
    """Stage count that accumulates best_budget on the leading start."""
    if stage_budget < 1:
        raise ValueError("stage budget must be >= 1")
    return max(1, math.ceil(4.0 * best_budget / stage_budget - 4.0 * k / n + 1.0))


def largest_remainder(weights: Sequence[float], total: int) -> list[int]:
    """Integer split of ``total`` proportional to weights; ties favor lower index."""
    if total < 0:
        raise ValueError("total must be >= 0")
    mass = float(sum(weights))
    if total == 0 or mass <= 0.0:
        return [0] * len(weights)
    quotas = [w / mass * total for w in weights]
    out = [math.floor(q) for q in quotas]
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - out[i]), i))
    for i in order[: total - sum(out)]:
        out[i] += 1
    return out


def allocate_budget(stats: Sequence[StartNodeStats], stage_budget: int) -> list[int]:
    """Split a stage budget across unpruned starts by the best-lead ratio.

    b is the start with the largest d (ties to the lowest id); start i weighs
    ((d_i - c_b)/(d_b - c_b))^N_b, clamped to 0 when d_i <= c_b.  Integerized
    by largest remainder; starts allocated 0 are marked pruned.
    """
    if stage_budget < 0:
        raise ValueError("stage budget must be >= 0")
    active = [s for s in stats if not s.pruned and s.n_samples > 0]
    if not active:
        raise InfeasibleError("no start node has any samples to allocate from")
    b = min(active, key=lambda s: (-s.best_value, s.start))
    cb, db, nb = b.worst, b.best_value, b.n_samples
    if db == cb:
        weights = {id(s): 1.0 for s in active}
    else:
        weights = {}
        for s in active:
            if s.best_value <= cb:
                weights[id(s)] = 0.0
            else:
                weights[id(s)] = ((s.best_value - cb) / (db - cb)) ** nb
    if all(w == 0.0 for w in weights.values()):
        weights[id(b)] = 1.0
    shares = largest_remainder([weights[id(s)] for s in active], stage_budget)
    by_id = {id(s): share for s, share in zip(active, shares)}
    out = []
    for s in stats:
        share = by_id.get(id(s), 0)
        if stage_budget > 0 and not s.pruned and share == 0:
            s.pruned = True
        out.append(share)
    return out


def allocate_budget_gaussian(stats: Sequence[StartNodeStats],
                             stage_budget: int) -> list[int]:
    """Budget split where the ratio uses exceed-probabilities of per-start
    normal fits instead of the bounded-range ratio."""
    active = [s for s in stats if not s.pruned and s.n_samples > 0]
    if not active:
        raise InfeasibleError("no start node has any samples to allocate from")
    b = min(active, key=lambda s: (-s.best_value, s.start))
    mu_b, sigma_b = b.mean_std()
    weights = []
    for s in active:
        mu_i, sigma_i = s.mean_std()
        weights.append(gaussian_exceed_probability(
            mu_b, sigma_b, b.n_samples, mu_i, sigma_i, s.n_samples))
    shares = largest_remainder(weights, stage_budget)
    by_id = {id(s): share for s, share in zip(active, shares)}
    out = []
    for s in stats:
        share = by_id.get(id(s), 0)
        if stage_budget > 0 and not s.pruned and share == 0:
            s.pruned = True
        out.append(share)
    return out


def gaussian_exceed_probability(mu_b: float, sigma_b: float, n_b: int,
                                mu_i: float, sigma_i: float, n_i: int) -> float:
    """P(max of n_i draws from N(mu_i, sigma_i) >= max of n_b draws from
    N(mu_b, sigma_b)), by numeric quadrature on a mu_b +- 10 sigma_b window."""
    if sigma_b <= 0.0 or sigma_i <= 0.0:
        raise ValueError("standard deviations must be positive")
    if n_b < 1 or n_i < 1:
        raise ValueError("sample counts must be >= 1")

    def integrand(x: float) -> float:
        zb = (x - mu_b) / sigma_b
        phi = math.exp(-0.5 * zb * zb) / math.sqrt(2.0 * math.pi)
        return n_b * ndtr(zb) ** (n_b - 1) * phi / sigma_b * ndtr((x - mu_i) / sigma_i) ** n_i

    lo, hi = mu_b - 10.0 * sigma_b, mu_b + 10.0 * sigma_b
    points = [mu_i] if lo < mu_i < hi else None
    val, _ = quad(integrand, lo, hi, epsabs=1e-9, limit=400, points=points)
    return 1.0 - val


# -- selection-probability machinery ------------------------------------------

def init_selection_probability(n: int, start: int, k: int) -> np.ndarray:
    """Homogeneous start vector: 1 at the start node, (k-1)/(n-1) elsewhere."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    if n == 1:
        return np.ones(1)
    p = np.full(n, (k - 1) / (n - 1), dtype=np.float64)
    p[start] = 1.0
    return p


def _init_probability_for_partial(n: int, partial: Sequence[int], k: int) -> np.ndarray:
    c = len(partial)
    if n == c:
        return np.ones(n)
    p = np.full(n, (k - c) / (n - c), dtype=np.float64)
    p[list(partial)] = 1.0
    return p


def update_selection_probability(samples: Sequence[SampleVector], rho: float,
                                 gamma_prev: float, n: int,
                                 p_prev: np.ndarray | None = None
                                 ) -> tuple[np.ndarray | None, float]:
    """Refit the selection probabilities to the elite samples.

    The elite threshold is the ceil(rho*N)-th highest willingness, kept
    monotone via max with gamma_prev; p_j is the fraction of elite samples
    containing node j.  If the carried-over threshold leaves no elite
    samples, the previous vector is returned unchanged.
    """
    if not samples:
        raise ValueError("samples must be nonempty")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    ws = sorted((s.willingness for s in samples), reverse=True)
    gamma_cand = ws[math.ceil(rho * len(samples)) - 1]
    gamma = max(gamma_prev, gamma_cand)
    elite = [s for s in samples if s.willingness >= gamma]
    if not elite:
        return p_prev, gamma
    counts = np.zeros(n, dtype=np.float64)
    for s in elite:
        counts[list(s.members)] += 1.0
    return counts / len(elite), gamma


def smooth(p_new: np.ndarray, p_old: np.ndarray, w: float) -> np.ndarray:
    """Convex combination w*p_new + (1-w)*p_old, elementwise."""
    p_new = np.asarray(p_new, dtype=np.float64)
    p_old = np.asarray(p_old, dtype=np.float64)
    if p_new.shape != p_old.shape:
        raise ValueError("probability vectors differ in length")
    if not 0.0 <= w <= 1.0:
        raise ValueError("w must lie in [0, 1]")
    return w * p_new + (1.0 - w) * p_old


def probability_shift(p_t: np.ndarray, p_prev: np.ndarray) -> float:
    """Squared Euclidean distance between consecutive selection vectors."""
    p_t = np.asarray(p_t, dtype=np.float64)
    p_prev = np.asarray(p_prev, dtype=np.float64)
    if p_t.shape != p_prev.shape:
        raise ValueError("probability vectors differ in length")
    diff = p_t - p_prev
    return float(np.dot(diff, diff))


def backtrack_check(p_t: np.ndarray, p_prev: np.ndarray, z_t: float) -> bool:
    """True when the vector has converged (shift below z_t) and the caller
    should reset p_t to p_prev and resample."""
    return probability_shift(p_t, p_prev) < z_t


# -- greedy algorithms ---------------------------------------------------------

def _effective(graph: SocialGraph, mode: WeightMode) -> SocialGraph:
    return fold_lambda(graph) if mode is WeightMode.LAMBDA_WEIGHTED else graph


def dgreedy(graph: SocialGraph, k: int,
            mode: WeightMode = WeightMode.UNWEIGHTED) -> Solution:
    """Deterministic greedy: start at the largest eta, then repeatedly add
    the frontier node with the largest willingness increment (ties to the
    lowest id)."""
    if not 1 <= k <= graph.n:
        raise ValueError(f"k={k} outside 1..{graph.n}")
    g = _effective(graph, mode)
    start = int(np.argmax(g.eta))
    members = {start}
    front = set(g.nbrs[start])
    while len(members) < k:
        if not front:
            raise InfeasibleError(
                f"component around node {start} has fewer than {k} nodes")
        best_v, best_delta = -1, -float("inf")
        for v in sorted(front):
            delta = float(g.eta[v])
            delta += sum(t for j, t in g.adj_out[v] if j in members)
            delta += sum(t for j, t in g.adj_in[v] if j in members)
            if delta > best_delta:
                best_v, best_delta = v, delta
        members.add(best_v)
        front.discard(best_v)
        front.update(u for u in g.nbrs[best_v] if u not in members)
    return Solution(frozenset(members), willingness(graph, members, mode),
                    is_connected(graph, members))


def _feasible_starts(graph: SocialGraph, starts: Sequence[int], k: int) -> list[int]:
    comp = graph.component_labels()
    sizes = graph.component_sizes()
    good = [s for s in starts if sizes[comp[s]] >= k]
    if len(good) < len(starts):
        skipped = sorted(set(starts) - set(good))
        warnings.warn(f"skipping start nodes in components smaller than k: {skipped}")
    if not good:
        raise InfeasibleError(f"no selected start node lies in a component with >= {k} nodes")
    return good


def _even_split(total: int, bins: int) -> list[int]:
    """total/bins each, flooring, remainder to the lowest indices."""
    base, rem = divmod(total, bins)
    return [base + (1 if i < rem else 0) for i in range(bins)]


def rgreedy(graph: SocialGraph, config: SolverConfig) -> Solution:
    """Randomized greedy: grow each sample by drawing frontier nodes with
    probability proportional to the willingness of the group they create
    (scores shifted positive when any are <= 0)."""
    g = _effective(graph, config.mode)
    k = config.k
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} outside 1..{g.n}")
    m = config.resolved_starts(g.n)
    starts = _feasible_starts(g, select_start_nodes(g, m), k)
    counts = _even_split(config.budget, len(starts))
    jobs = [BatchJob(start=s, stage=0, count=c, value_weighted=True,
                     keep_samples=False)
            for s, c in zip(starts, counts) if c > 0]
    best: SampleVector | None = None
    for batch in run_jobs(g, k, jobs, config.seed, config.workers):
        best = pick_better(best, batch.best)
    assert best is not None
    return Solution(frozenset(best.members),
                    willingness(graph, best.members, config.mode),
                    is_connected(graph, best.members))


# -- staged budget-allocation solvers -----------------------------------------

@dataclass
class SolverRun:
    """Optional diagnostics from a staged solver run."""

    solution: Solution
    stage_best: list[float] = field(default_factory=list)
    allocations: list[list[int]] = field(default_factory=list)
    samples_drawn: int = 0
    stats: list[StartNodeStats] = field(default_factory=list)


def _staged_engine(graph: SocialGraph, config: SolverConfig, weighted: bool,
                   sampler: Sampler | None = None,
                   initial_partial: Sequence[int] | None = None) -> SolverRun:
    g = _effective(graph, config.mode)
    k = config.k
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} outside 1..{g.n}")
    gaussian = config.distribution == "gaussian"

    if initial_partial is None:
        m = config.resolved_starts(g.n)
        starts = _feasible_starts(g, select_start_nodes(g, m), k)
        partials: list[tuple[int, ...]] = [(s,) for s in starts]
        keys = list(starts)
    else:
        partial = tuple(sorted(initial_partial))
        comp = g.component_labels()
        sizes = g.component_sizes()
        if sizes[comp[partial[0]]] < k:
            raise InfeasibleError(
                f"fewer than {k} nodes reachable from the confirmed set")
        m = config.resolved_starts(g.n)
        starts = [partial[0]] * m
        partials = [partial] * m
        keys = [-(i + 1) for i in range(m)]  # distinct rng streams per copy

    T = config.budget
    if T < len(starts):
        warnings.warn(f"budget {T} below start count {len(starts)}; "
                      "running a single uniform stage")
        r = 1
    elif config.stages is not None:
        r = config.stages
    else:
        r = stage_count(T, len(starts), config.confidence, config.alpha, k, g.n)
    r = max(1, min(r, T))

    stage_budgets = _even_split(T, r)
    stats = [StartNodeStats(start=s) for s in starts]
    # Selection vectors stay None (homogeneous) until the first refit; a
    # restriction of a constant vector to the frontier is the uniform draw.

    def init_p(partial: tuple[int, ...]) -> np.ndarray:
        if len(partial) == 1:
            return init_selection_probability(g.n, partial[0], k)
        return _init_probability_for_partial(g.n, partial, k)

    run = SolverRun(solution=None)  # type: ignore[arg-type]
    best: SampleVector | None = None
    drawn = 0
    for stage in range(1, r + 1):
        budget_t = stage_budgets[stage - 1]
        if budget_t <= 0:
            continue
        if stage == 1:
            alloc = _even_split(budget_t, len(stats))
        elif gaussian:
            alloc = allocate_budget_gaussian(stats, budget_t)
        else:
            alloc = allocate_budget(stats, budget_t)
        run.allocations.append(list(alloc))
        jobs = [BatchJob(start=st.start, stage=stage, count=c,
                         p=st.p if weighted else None,
                         partial=partial if len(partial) > 1 else None,
                         stream_key=key,
                         keep_samples=weighted and stage < r)
                for st, partial, key, c in zip(stats, partials, keys, alloc)]
        live = [(i, job) for i, job in enumerate(jobs) if job.count > 0]
        results = (run_jobs(g, k, [j for _, j in live], config.seed, config.workers)
                   if sampler is None else [sampler(g, j) for _, j in live])
        for (i, _), batch in zip(live, results):
            stats[i].absorb(batch)
            best = pick_better(best, batch.best)
            drawn += batch.count
            if weighted and stage < r:
                st = stats[i]
                p_prev = st.p if st.p is not None else init_p(partials[i])
                p_new, st.gamma = update_selection_probability(
                    batch.samples, config.rho, st.gamma, g.n, p_prev=p_prev)
                if p_new is not None and p_new is not p_prev:
                    smoothed = smooth(p_new, p_prev, config.smoothing)
                    if config.backtrack_threshold > 0.0 and backtrack_check(
                            smoothed, p_prev, config.backtrack_threshold):
                        st.p = p_prev  # converged: revert and resample
                    else:
                        st.p = smoothed
        if best is not None:
            run.stage_best.append(best.willingness)
        # Starts that never received a first sample cannot be compared.
        if stage == 1:
            for st in stats:
                if st.n_samples == 0:
                    st.pruned = True

    assert best is not None
    run.solution = Solution(frozenset(best.members),
                            willingness(graph, best.members, config.mode),
                            is_connected(graph, best.members))
    run.samples_drawn = drawn
    run.stats = stats
    return run


def cbas(graph: SocialGraph, config: SolverConfig,
         sampler: Sampler | None = None, full_output: bool = False
         ) -> Solution | SolverRun:
    """Staged budget allocation over start nodes with uniform expansion."""
    run = _staged_engine(graph, config, weighted=False, sampler=sampler)
    return run if full_output else run.solution


def cbas_nd(graph: SocialGraph, config: SolverConfig,
            sampler: Sampler | None = None, full_output: bool = False
            ) -> Solution | SolverRun:
    """Staged budget allocation with per-start selection probabilities refit
    to elite samples after every stage."""
    run = _staged_engine(graph, config, weighted=True, sampler=sampler)
    return run if full_output else run.solution


def online_replan(graph: SocialGraph, previous: Solution,
                  confirmed: Sequence[int], declined: Sequence[int],
                  config: SolverConfig) -> Solution:
    """Re-solve after RSVP responses: declined nodes leave the graph and every
    expansion starts from the confirmed set, which is always retained."""
    confirmed_set = frozenset(int(v) for v in confirmed)
    declined_set = frozenset(int(v) for v in declined)
    if not confirmed_set <= previous.members:
        raise ValueError("confirmed attendees must belong to the previous group")
    if confirmed_set & declined_set:
        raise ValueError("a node cannot be both confirmed and declined")
    if len(confirmed_set) > config.k:
        raise ValueError("confirmed set larger than the group size")
    if confirmed_set and not is_connected(graph, confirmed_set):
        raise ValueError("confirmed attendees must form a connected group")
    if len(confirmed_set) == config.k:
        return Solution(confirmed_set,
                        willingness(graph, confirmed_set, config.mode),
                        is_connected(graph, confirmed_set))

    sub, old_ids = subgraph_without(graph, declined_set)
    if sub.n < config.k:
        raise InfeasibleError("fewer nodes remain than the group size")
    new_of = {o: i for i, o in enumerate(old_ids)}
    if confirmed_set:
        partial = tuple(sorted(new_of[v] for v in confirmed_set))
        run = _staged_engine(sub, config, weighted=True, initial_partial=partial)
    else:
        run = _staged_engine(sub, config, weighted=True)
    members = frozenset(old_ids[v] for v in run.solution.members)
    return Solution(members, willingness(graph, members, config.mode),
                    is_connected(graph, members))


def solve(graph: SocialGraph, config: SolverConfig) -> Solution:
    """Dispatch on config.algorithm."""
    algo = config.algorithm
    if algo == "dgreedy":
        return dgreedy(graph, config.k, config.mode)
    if algo == "rgreedy":
        return rgreedy(graph, config)
    if algo == "cbas":
        return cbas(graph, config)  # type: ignore[return-value]
    if algo == "cbas-nd":
        return cbas_nd(graph, config)  # type: ignore[return-value]
    if algo == "cbas-nd-g":
        return cbas_nd(graph, replace(config, distribution="gaussian"))  # type: ignore[return-value]
    if algo == "brute":
        from .oracle import brute_force
        return brute_force(graph, config.k, config.mode)
    raise ValueError(f"unknown algorithm {algo!r}")
