import random

import pytest

from groupwill import SocialGraph, fixtures


@pytest.fixture
def ten():
    return fixtures.ten_node_graph()


@pytest.fixture
def trap():
    return fixtures.greedy_trap_graph()


@pytest.fixture
def path3():
    # a - b - c
    return SocialGraph.from_undirected([0.0, 0.0, 0.0], [(0, 1, 1.0), (1, 2, 1.0)])


def random_instance(rng: random.Random, n: int, edge_prob: float = 0.45,
                    eta_range=(0.0, 1.0), tau_range=(0.0, 1.0),
                    connected: bool = False) -> SocialGraph:
    """Small random undirected instance for oracle-backed tests."""
    while True:
        edges = [(i, j, round(rng.uniform(*tau_range), 3))
                 for i in range(n) for j in range(i + 1, n)
                 if rng.random() < edge_prob]
        eta = [round(rng.uniform(*eta_range), 3) for _ in range(n)]
        g = SocialGraph.from_undirected(eta, edges)
        if not connected or int(g.component_sizes().max()) == n:
            return g


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One visible line per acceptance criterion."""
    lines = []
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance" in getattr(rep, "nodeid", ""):
                name = rep.nodeid.split("::")[-1]
                lines.append((name, status.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status:7s} {name}")
