from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from coarse_lab.metric import FiniteMetricSpace

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"


@pytest.fixture
def configs_dir():
    return CONFIGS


def random_connected_graph(rng, n, extra):
    """Adjacency lists of a random tree on n vertices plus ``extra`` random edges."""
    adj = [set() for _ in range(n)]
    for v in range(1, n):
        u = int(rng.integers(0, v))
        adj[u].add(v)
        adj[v].add(u)
    for _ in range(extra):
        a, b = (int(v) for v in rng.integers(0, n, 2))
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return [sorted(a) for a in adj]


def graph_space(adj, base_point=0):
    sp = FiniteMetricSpace.from_graph(list(range(len(adj))), adj, base_point=base_point)
    return FiniteMetricSpace(sp.labels, sp.backing, base_point=base_point,
                             truncation_radius=int(sp.radial().max()))


def bfs_oracle(adj, s):
    dist = [-1] * len(adj)
    dist[s] = 0
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return np.array(dist)


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
