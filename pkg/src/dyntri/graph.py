"""Directed and undirected graphs, moralization and vertex elimination.

Nodes are integer ids carrying a :class:`NodeInfo` annotation (name, frame,
cardinality).  Graph values are immutable once built; every algorithm
iterates in ascending id order so results are deterministic.
"""

from __future__ import annotations

import graphlib
import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Raised on malformed graph input (unknown ids, loops, bad orders)."""


@dataclass(frozen=True)
class NodeInfo:
    name: str
    frame: int = 0
    card: int = 2
    hint: int = 0
    position: int = 0

    @property
    def label(self) -> str:
        return f"{self.name}@{self.frame}"


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _default_info(nodes: Iterable[int]) -> dict[int, NodeInfo]:
    return {v: NodeInfo(name=str(v), position=v) for v in nodes}


class UGraph:
    """Undirected simple graph over integer node ids."""

    def __init__(self, info: Mapping[int, NodeInfo], edges: Iterable[tuple[int, int]] = ()):
        self.info = dict(sorted(info.items()))
        adj: dict[int, set[int]] = {v: set() for v in self.info}
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge ({u}, {v}) references an unknown node")
            adj[u].add(v)
            adj[v].add(u)
        self.adj: dict[int, frozenset[int]] = {v: frozenset(s) for v, s in adj.items()}

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], cards: Sequence[int] | None = None):
        info = _default_info(range(n))
        if cards is not None:
            info = {v: NodeInfo(name=str(v), card=c, position=v) for v, c in zip(range(n), cards)}
        return cls(info, edges)

    @property
    def nodes(self) -> list[int]:
        return list(self.info)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def card(self, v: int) -> int:
        return self.info[v].card

    def label(self, v: int) -> str:
        return self.info[v].label

    def __len__(self) -> int:
        return len(self.info)

    def __contains__(self, v) -> bool:
        return v in self.info

    def __eq__(self, other) -> bool:
        return isinstance(other, UGraph) and self.info == other.info and self.adj == other.adj

    def __repr__(self) -> str:
        return f"UGraph(n={len(self)}, m={len(self.edges())})"

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "UGraph":
        return UGraph(self.info, itertools.chain(self.edges(), extra))

    def completed(self, *groups: Iterable[int]) -> "UGraph":
        """Copy of the graph with each node group made a clique."""
        extra = []
        for group in groups:
            extra.extend(itertools.combinations(sorted(group), 2))
        return self.with_edges(extra)

    def dump(self) -> str:
        """Line-per-edge text form used by fixtures and debugging."""
        lines = [f"node {v} {i.label} card={i.card}" for v, i in self.info.items()]
        lines += [f"{self.label(u)} -- {self.label(v)}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def to_dot(self, highlight: Iterable[int] = ()) -> str:
        marked = set(highlight)
        out = ["graph G {"]
        for v, i in self.info.items():
            style = ", style=filled, fillcolor=lightgray" if v in marked else ""
            out.append(f'  {v} [label="{i.label}"{style}];')
        out += [f"  {u} -- {v};" for u, v in self.edges()]
        out.append("}")
        return "\n".join(out) + "\n"


class DGraph:
    """Directed graph over integer node ids (parent -> child edges)."""

    def __init__(self, info: Mapping[int, NodeInfo], edges: Iterable[tuple[int, int]] = ()):
        self.info = dict(sorted(info.items()))
        self.parents: dict[int, set[int]] = {v: set() for v in self.info}
        self.children: dict[int, set[int]] = {v: set() for v in self.info}
        for p, c in edges:
            if p == c:
                raise GraphError(f"self-loop on node {p}")
            if p not in self.info or c not in self.info:
                raise GraphError(f"edge ({p}, {c}) references an unknown node")
            self.parents[c].add(p)
            self.children[p].add(c)

    @property
    def nodes(self) -> list[int]:
        return list(self.info)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((p, c) for c, ps in self.parents.items() for p in ps)

    def __len__(self) -> int:
        return len(self.info)

    def find_cycle(self) -> list[int] | None:
        """Return a directed cycle as a closed node list, or None if acyclic."""
        sorter = graphlib.TopologicalSorter({v: sorted(self.parents[v]) for v in self.info})
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            return list(exc.args[1])
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


def moralize(g: DGraph) -> UGraph:
    """Drop edge directions and marry every pair of co-parents."""
    edges = [(p, c) for p, c in g.edges()]
    for c in g.nodes:
        edges.extend(itertools.combinations(sorted(g.parents[c]), 2))
    return UGraph(g.info, edges)


def induced_subgraph(g: UGraph, nodes: Iterable[int]) -> UGraph:
    keep = set(nodes)
    unknown = keep - set(g.info)
    if unknown:
        raise GraphError(f"unknown nodes {sorted(unknown)}")
    return UGraph({v: g.info[v] for v in keep},
                  ((u, v) for u, v in g.edges() if u in keep and v in keep))


def is_separator(g: UGraph, sep: Iterable[int], left: Iterable[int], right: Iterable[int]) -> bool:
    """True iff no edge of ``g`` joins ``left`` to ``right``.

    The three sets must be pairwise disjoint and cover the node set.
    """
    sep, left, right = set(sep), set(left), set(right)
    if sep & left or sep & right or left & right:
        raise GraphError("separator, left and right sets must be disjoint")
    if sep | left | right != set(g.info):
        raise GraphError("separator, left and right sets must cover the graph")
    return not any(g.adj[u] & right for u in left)


@dataclass(frozen=True)
class EliminationResult:
    """Outcome of eliminating (a subset of) the nodes of a graph.

    ``cliques[i]`` is ``{order[i]}`` plus the neighbours it still had when it
    was eliminated.  ``log_weight`` is log10 of the summed state space of
    those step cliques, the cost the engine optimises.
    """

    order: tuple[int, ...]
    fill: frozenset[tuple[int, int]]
    cliques: tuple[frozenset[int], ...]
    maxclique: int
    states: int
    log_weight: float

    def filled(self, g: UGraph) -> UGraph:
        return g.with_edges(self.fill)


def _check_order(g: UGraph, order: Sequence[int]) -> None:
    seen = set()
    for v in order:
        if v not in g.info:
            raise GraphError(f"unknown node {v} in elimination order")
        if v in seen:
            raise GraphError(f"node {v} repeated in elimination order")
        seen.add(v)


def state_space(clique: Iterable[int], g: UGraph) -> int:
    return math.prod(g.card(v) for v in clique)


def eliminate(g: UGraph, order: Sequence[int]) -> EliminationResult:
    """Simulate vertex elimination of ``order`` (a subset of the nodes is allowed)."""
    _check_order(g, order)
    adj = {v: set(n) for v, n in g.adj.items()}
    fill: set[tuple[int, int]] = set()
    cliques = []
    for v in order:
        nbrs = sorted(adj[v])
        cliques.append(frozenset([v, *nbrs]))
        for a, b in itertools.combinations(nbrs, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                fill.add((a, b))
        for u in nbrs:
            adj[u].discard(v)
        del adj[v]
    states = sum(state_space(c, g) for c in cliques)
    return EliminationResult(
        order=tuple(order),
        fill=frozenset(fill),
        cliques=tuple(cliques),
        maxclique=max((len(c) for c in cliques), default=0),
        states=states,
        log_weight=math.log10(states) if states else 0.0,
    )


def fill_oracle(g: UGraph, order: Sequence[int]) -> set[tuple[int, int]]:
    """New edges implied by ``order`` through the path characterisation.

    ``uv`` is an edge of the eliminated graph iff some path joins ``u`` and
    ``v`` whose interior nodes are all eliminated before both endpoints.
    Nodes missing from a partial order count as eliminated last.
    """
    _check_order(g, order)
    rank = {v: i for i, v in enumerate(order)}
    never = len(order)
    result = set()
    for u in g.nodes:
        ru = rank.get(u, never)
        # nodes reachable from u through interiors eliminated before u
        seen = {u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in g.adj[x]:
                if y in seen:
                    continue
                seen.add(y)
                if rank.get(y, never) < ru:
                    queue.append(y)
        for w in seen:
            if w != u and rank.get(w, never) >= ru and not g.has_edge(u, w):
                result.add(_pair(u, w))
    return result


def mcs(g: UGraph) -> tuple[list[int], bool]:
    """Maximum cardinality search.

    Returns an elimination order (the reverse of the visit order) and
    whether it is a perfect elimination order, i.e. whether ``g`` is chordal.
    """
    weight = {v: 0 for v in g.nodes}
    visited: list[int] = []
    remaining = set(g.nodes)
    while remaining:
        v = min(remaining, key=lambda x: (-weight[x], x))
        remaining.remove(v)
        visited.append(v)
        for u in g.adj[v]:
            if u in remaining:
                weight[u] += 1
    order = visited[::-1]
    return order, _is_perfect(g, order)


def _is_perfect(g: UGraph, order: Sequence[int]) -> bool:
    rank = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in g.adj[v] if rank[u] > rank[v]]
        if not later:
            continue
        # standard PEO test: the earliest later neighbour must see the rest
        first = min(later, key=rank.__getitem__)
        if any(u != first and not g.has_edge(first, u) for u in later):
            return False
    return True


def is_chordal(g: UGraph) -> bool:
    return mcs(g)[1]


def prune_cliques(cliques: Iterable[Iterable[int]]) -> list[frozenset[int]]:
    """Drop duplicates and cliques contained in another clique."""
    uniq = sorted({frozenset(c) for c in cliques}, key=lambda c: (-len(c), sorted(c)))
    kept: list[frozenset[int]] = []
    for c in uniq:
        if not any(c <= k for k in kept):
            kept.append(c)
    return sorted(kept, key=sorted)


def maximal_cliques(g: UGraph) -> list[frozenset[int]]:
    order, chordal = mcs(g)
    if not chordal:
        raise GraphError("graph is not chordal; triangulate it first")
    return prune_cliques(eliminate(g, order).cliques)


def log_weight(cliques: Sequence[Iterable[int]], g: UGraph) -> float:
    """log10 of the summed state space of ``cliques``."""
    if not cliques:
        raise GraphError("weight of an empty clique list is undefined")
    return math.log10(sum(state_space(c, g) for c in cliques))
