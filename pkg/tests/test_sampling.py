import math
import random
from collections import Counter

import numpy as np
import pytest

from groupwill import (InfeasibleStartError, SocialGraph, expand_uniform,
                       expand_weighted, fixtures, is_connected, sample_batch,
                       willingness)
from groupwill.oracle import connected_subsets
from groupwill.sampling import (BatchJob, batch_from_member_sets,
                                frontier_distribution, pick_better, run_jobs,
                                stream, SampleVector)

from conftest import random_instance


def test_stream_reproducible():
    a = stream(1, 2, 3, 4).random()
    b = stream(1, 2, 3, 4).random()
    assert a == b
    assert stream(1, 2, 3, 5).random() != a


def test_forced_path_expansion(path3):
    s = expand_uniform(path3, 1, 3, stream(0, 1, 1, 0))
    assert s.members == (0, 1, 2)


def test_k1_returns_start(ten):
    s = expand_uniform(ten, 2, 1, stream(0, 2, 1, 0))
    assert s.members == (2,)
    assert s.willingness == pytest.approx(0.8, abs=1e-12)


def test_infeasible_start_raises():
    g = SocialGraph.from_undirected([0.0] * 4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(InfeasibleStartError):
        expand_uniform(g, 0, 3, stream(0, 0, 1, 0))


def test_samples_are_connected_k_sets(ten):
    for idx in range(200):
        s = expand_uniform(ten, 2, 5, stream(7, 2, 1, idx))
        assert len(s.members) == 5
        assert is_connected(ten, s.members)
        assert s.willingness == pytest.approx(willingness(ten, s.members), abs=1e-9)


def test_all_connected_subsets_reachable():
    rng = random.Random(13)
    g = random_instance(rng, 7, edge_prob=0.5, connected=True)
    k = 3
    want = {s for s in connected_subsets(g, k) if 0 in s}
    seen = set()
    for idx in range(20000):
        seen.add(frozenset(expand_uniform(g, 0, k, stream(1, 0, 1, idx)).members))
        if seen == want:
            break
    assert seen == want


def test_weighted_uniform_matches_uniform_distribution(ten):
    # homogeneous p draws the same first-step distribution as plain uniform
    p = np.full(10, 4.0 / 9.0)
    p[2] = 1.0
    uni, wei = Counter(), Counter()
    for idx in range(20000):
        uni[expand_uniform(ten, 2, 2, stream(3, 2, 1, idx)).members] += 1
        wei[expand_weighted(ten, 2, 2, p, stream(4, 2, 1, idx)).members] += 1
    for key in uni:
        assert abs(uni[key] / 20000 - wei[key] / 20000) < 0.02


def test_weighted_all_mass_on_one_node(ten):
    p = np.zeros(10)
    p[2] = 1.0
    p[5] = 1.0  # v6 is in v3's frontier
    s = expand_weighted(ten, 2, 2, p, stream(0, 2, 1, 0))
    assert s.members == (2, 5)


def test_weighted_zero_mass_falls_back_to_uniform(ten):
    p = np.zeros(10)
    p[2] = 1.0
    seen = {expand_weighted(ten, 2, 2, p, stream(0, 2, 1, idx)).members
            for idx in range(300)}
    assert len(seen) == 5  # every frontier node of v3 appears


def test_smoothed_example_vector_pick_odds(ten):
    p = np.array([5.2, 3.4, 9.0, 5.2, 7.0, 5.2, 3.4, 1.6, 1.6, 1.6]) / 9.0
    nodes, probs = frontier_distribution(ten, {2}, p)
    assert nodes == [0, 1, 3, 4, 5]
    by = dict(zip(nodes, probs))
    assert by[4] / by[1] == pytest.approx(7.0 / 3.4, abs=1e-12)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_batch_stats_single_sample(ten):
    b = sample_batch(ten, 2, 5, 1, seed=5)
    assert b.count == 1
    assert b.worst == b.best_value == b.best.willingness


def test_batch_aggregation_order_independent(ten):
    b = sample_batch(ten, 2, 5, 40, seed=9)
    ws = [s.willingness for s in b.samples]
    assert b.worst == pytest.approx(min(ws))
    assert b.best_value == pytest.approx(max(ws))
    assert b.best.willingness == pytest.approx(max(ws))


def test_scripted_batches_match_pinned_stats(ten):
    tr = fixtures.scripted_trace()
    b3 = batch_from_member_sets(ten, tr[(fixtures.V3, 1)], k=5)
    assert b3.worst == pytest.approx(5.9, abs=1e-9)
    assert b3.best_value == pytest.approx(9.2, abs=1e-9)
    b10 = batch_from_member_sets(ten, tr[(fixtures.V10, 1)], k=5)
    assert b10.worst == pytest.approx(6.9, abs=1e-9)
    assert b10.best_value == pytest.approx(8.9, abs=1e-9)


def test_scripted_batch_rejects_disconnected(ten):
    with pytest.raises(ValueError):
        batch_from_member_sets(ten, [{0, 9}], k=2)


def test_pick_better_tie_breaks_lexicographically():
    a = SampleVector((0, 1), 5.0)
    b = SampleVector((0, 2), 5.0)
    assert pick_better(a, b) is a
    assert pick_better(b, a) is a
    assert pick_better(None, b) is b


def test_run_jobs_matches_sequential_at_any_worker_count(ten):
    jobs = [BatchJob(start=2, stage=1, count=30),
            BatchJob(start=9, stage=1, count=25)]
    seq = run_jobs(ten, 5, jobs, seed=11, workers=1)
    for workers in (2, 4, 8):
        par = run_jobs(ten, 5, jobs, seed=11, workers=workers)
        for a, b in zip(seq, par):
            assert [s.members for s in a.samples] == [s.members for s in b.samples]
            assert a.worst == b.worst and a.best_value == b.best_value
            assert a.best.members == b.best.members


def test_stream_multiset_independent_of_split(ten):
    # the (start, stage) multiset is fixed by indices, however the batch is cut
    whole = sample_batch(ten, 2, 5, 20, seed=2)
    first = sample_batch(ten, 2, 5, 9, seed=2)
    assert [s.members for s in whole.samples][:9] == \
        [s.members for s in first.samples]
