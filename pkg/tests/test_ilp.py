import random
from itertools import combinations

import pytest

from groupwill import ScaleGuardError, SocialGraph, is_connected, willingness
from groupwill.ilp import (check_member_set, export_ilp, feasible_member_sets,
                           write_lp)
from groupwill.oracle import connected_subsets

from conftest import random_instance


def test_triangle_k2_feasible_sets_are_edges():
    g = SocialGraph.from_undirected([1.0, 2.0, 3.0],
                                    [(0, 1, 0.5), (1, 2, 0.25), (0, 2, 0.75)])
    model = export_ilp(g, 2)
    feas = feasible_member_sets(model, g, 2)
    assert set(feas) == {frozenset(p) for p in [(0, 1), (1, 2), (0, 2)]}
    for members, obj in feas.items():
        assert obj == willingness(g, members)


def test_k1_objective_is_interest():
    g = SocialGraph.from_undirected([1.0, 5.0], [(0, 1, 2.0)])
    model = export_ilp(g, 1)
    feas = feasible_member_sets(model, g, 1)
    assert feas == {frozenset({0}): 1.0, frozenset({1}): 5.0}


def test_disconnected_pair_infeasible():
    g = SocialGraph.from_undirected([1.0, 1.0], [])
    model = export_ilp(g, 2)
    ok, _ = check_member_set(model, g, {0, 1})
    assert not ok


def test_detour_pair_infeasible_by_default_but_feasible_relaxed():
    # a - c - b with c unselected: the relaxed endpoint rule lets the path
    # hop through c, the default form does not
    g = SocialGraph.from_undirected([1.0, 0.0, 1.0], [(0, 1, 0.1), (1, 2, 0.1)])
    tight = export_ilp(g, 2)
    ok, _ = check_member_set(tight, g, {0, 2})
    assert not ok
    loose = export_ilp(g, 2, relaxed_endpoints=True)
    ok, _ = check_member_set(loose, g, {0, 2}, relaxed_endpoints=True)
    assert ok


def test_random_equivalence_small():
    rng = random.Random(97)
    for _ in range(8):
        g = random_instance(rng, rng.randint(4, 6),
                            edge_prob=rng.uniform(0.3, 0.8),
                            eta_range=(-0.5, 1.0), tau_range=(-0.5, 1.0))
        k = rng.randint(1, 4)
        model = export_ilp(g, k)
        feas = feasible_member_sets(model, g, k)
        assert set(feas) == set(connected_subsets(g, k))
        for members, obj in feas.items():
            assert obj == willingness(g, members)


def test_scale_guard():
    g = SocialGraph.from_directed([0.0] * 61, [])
    with pytest.raises(ScaleGuardError):
        export_ilp(g, 3)


def test_variable_counts_and_names():
    g = SocialGraph.from_undirected([0.0, 0.0, 0.0], [(0, 1, 1.0), (1, 2, 1.0)])
    model = export_ilp(g, 2)
    names = model.variable_names()
    n, arcs, pairs = 3, 4, 6
    assert sum(1 for v in names if v.startswith("x_")) == n
    assert sum(1 for v in names if v.startswith("y_")) == arcs
    assert sum(1 for v in names if v.startswith("r_")) == n
    assert sum(1 for v in names if v.startswith("p_")) == pairs * arcs
    assert sum(1 for v in names if v.startswith("d_")) == pairs * n
    assert "p_0_2_1_2" in names and "d_0_2_1" in names


def test_lp_text_sections_and_determinism(tmp_path):
    g = SocialGraph.from_undirected([1.0, 2.0, 0.0], [(0, 1, 0.4), (1, 2, 0.6)])
    model = export_ilp(g, 2)
    text = model.to_lp_text()
    for section in ("Maximize", "Subject To", "Bounds", "Binaries",
                    "Generals", "End"):
        assert section in text
    assert text == export_ilp(g, 2).to_lp_text()
    out = tmp_path / "model.lp"
    write_lp(model, str(out))
    assert out.read_text() == text


def test_constraints_reference_declared_variables_only():
    g = SocialGraph.from_undirected([1.0, 0.5, 0.2], [(0, 1, 0.4), (1, 2, 0.6)])
    model = export_ilp(g, 2)
    declared = model.variable_names()
    for con in model.constraints:
        for _, name in con.terms:
            assert name in declared
    for _, name in model.objective:
        assert name in declared


def test_integer_order_bounds_present():
    g = SocialGraph.from_undirected([0.0, 0.0], [(0, 1, 1.0)])
    model = export_ilp(g, 2)
    d_vars = [v for v in model.variables if v.name.startswith("d_")]
    assert d_vars
    assert all(v.integer and v.lower == 0 and v.upper == 2 for v in d_vars)
