"""Seeded random dynamic templates with one frame per partition.

The sampler follows the usual random-DAG recipe: intra-frame edges respect
a random topological order of the variable names, and every candidate
edge, within a frame or between adjacent frames, is drawn with the same
probability.  Backward (future to past) edges are accepted one at a time
and only while the template stays acyclic and every child keeps its
inter-frame parents on a single side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .template import Template, TemplateError, Variable, unroll, validate

RETRY_LIMIT = 100


@dataclass(frozen=True)
class GenParams:
    """Parameters of :func:`generate`.

    ``edge_density`` is the probability of each candidate edge.  The
    default keeps the expected number of parents per node near 1.5 for
    every size.
    """

    nodes_per_slice: int = 5
    card_range: tuple[int, int] = (2, 50)
    edge_density: float | None = None
    allow_backward: bool = False
    seed: int = 0

    def density(self) -> float:
        if self.edge_density is not None:
            return self.edge_density
        return min(1.0, 1.5 / self.nodes_per_slice)

    def check(self) -> None:
        if self.nodes_per_slice < 1:
            raise ValueError("nodes_per_slice must be >= 1")
        lo, hi = self.card_range
        if not 2 <= lo <= hi:
            raise ValueError("card_range must satisfy 2 <= low <= high")
        if not 0.0 <= self.density() <= 1.0:
            raise ValueError("edge_density must lie in [0, 1]")


# canvas frames: P=0, chunk=1, implied second chunk copy=2, E=3
_FRAMES = (0, 1, 3)


def _components(names: list[str], edges: set[tuple[str, str]]) -> list[list[str]]:
    parent = {n: n for n in names}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    groups: dict[str, list[str]] = {}
    for n in names:
        groups.setdefault(find(n), []).append(n)
    return list(groups.values())


def _build(names, cards, intra, forward, backward) -> Template:
    variables = tuple(Variable(n, f, cards[n]) for f in _FRAMES for n in names)
    edges = [((a, f), (b, f)) for f in _FRAMES for a, b in sorted(intra)]
    edges += [((a, f), (b, f + 1)) for f in (0, 1, 2) for a, b in sorted(forward)]
    edges += [((a, f + 1), (b, f)) for f in (0, 1, 2) for a, b in sorted(backward)]
    return Template(1, 1, 1, variables, tuple(edges))


def _attempt(p: GenParams, rng: random.Random) -> Template:
    n = p.nodes_per_slice
    d = p.density()
    names = [f"V{i}" for i in range(n)]
    cards = {name: rng.randint(*p.card_range) for name in names}
    order = names[:]
    rng.shuffle(order)

    intra = {(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < d}
    comps = _components(names, intra)
    if len(comps) > 1:
        # join components along the topological order so no cycle appears
        rank = {name: i for i, name in enumerate(order)}
        heads = sorted((min(c, key=rank.get) for c in comps), key=rank.get)
        for a, b in zip(heads, heads[1:]):
            intra.add((a, b))

    candidates = [("f", a, b) for a in names for b in names if rng.random() < d]
    if p.allow_backward:
        candidates += [("b", a, b) for a in names for b in names if rng.random() < d]
    rng.shuffle(candidates)
    forward: set[tuple[str, str]] = set()
    backward: set[tuple[str, str]] = set()
    for kind, a, b in candidates:
        if kind == "f":
            # a child keeps its inter-frame parents on one side
            if any(child == b for _, child in backward):
                continue
            forward.add((a, b))
            continue
        if any(child == b for _, child in forward):
            continue
        backward.add((a, b))
        if unroll(_build(names, cards, intra, forward, backward), 3).graph.find_cycle():
            backward.discard((a, b))
    return _build(names, cards, intra, forward, backward)


def generate(p: GenParams) -> Template:
    """Random template with T(P) = T(C) = T(E) = 1, deterministic in ``p.seed``."""
    p.check()
    rng = random.Random(p.seed)
    for _ in range(RETRY_LIMIT):
        t = _attempt(p, rng)
        if not validate(t):
            return t
    raise TemplateError(f"no valid template after {RETRY_LIMIT} attempts (seed {p.seed})")


def backward_edge_count(t: Template) -> int:
    return sum(1 for (_, fa), (_, fb) in t.edges if fb < fa)
