import itertools
import random

import pytest
from hypothesis import HealthCheck, settings

from dyntri.graph import UGraph
from dyntri.template import FIXTURES, fixture

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def random_graph(rng: random.Random, n: int, p: float, cards=(2, 5)) -> UGraph:
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return UGraph.from_edges(n, edges, [rng.randint(*cards) for _ in range(n)])


def path(n: int) -> UGraph:
    return UGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> UGraph:
    return UGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture(params=FIXTURES)
def any_fixture(request):
    return request.param, fixture(request.param)
