"""Triangulation engine: prioritized greedy elimination, exhaustive order
search, an anytime controller and the 1.5-chunk partition protocol."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .graph import EliminationResult, GraphError, UGraph, eliminate, mcs, prune_cliques, state_space

HEURISTICS = ("cliqueSize", "fillin", "weight", "temporalPosition", "filePosition", "hint", "random")
_ALIASES = {
    "size": "cliqueSize", "clique": "cliqueSize", "fill": "fillin", "time": "temporalPosition",
    "temporal": "temporalPosition", "position": "filePosition", "file": "filePosition",
}
OBJECTIVES = ("maxclique", "weight")


def parse_chain(text: str | Sequence[str]) -> tuple[str, ...]:
    """Turn ``"fillin,size"`` (or a sequence) into a validated heuristic chain."""
    items = text.split(",") if isinstance(text, str) else list(text)
    chain = tuple(_ALIASES.get(s.strip(), s.strip()) for s in items if s.strip())
    if not chain:
        raise ValueError("heuristic chain must not be empty")
    for h in chain:
        if h not in HEURISTICS:
            raise ValueError(f"unknown heuristic {h!r}; choose from {', '.join(HEURISTICS)}")
    if "random" in chain[:-1]:
        raise ValueError("'random' may only appear as the last tie-breaker")
    return chain


def score_key(res: EliminationResult, objective: str = "maxclique") -> tuple:
    """Ranking key, lower is better: maxclique, then state space, then fill."""
    if objective == "weight":
        return (res.states, res.maxclique, len(res.fill))
    return (res.maxclique, res.states, len(res.fill))


def _targets(g: UGraph, nodes: Iterable[int] | None) -> list[int]:
    if nodes is None:
        return g.nodes
    nodes = sorted(set(nodes))
    missing = [v for v in nodes if v not in g]
    if missing:
        raise GraphError(f"unknown nodes {missing}")
    return nodes


def greedy_eliminate(g: UGraph, chain: Sequence[str] = ("fillin", "cliqueSize"), seed: int = 0,
                     nodes: Iterable[int] | None = None) -> EliminationResult:
    """Greedy elimination driven by a prioritized heuristic chain.

    The first heuristic picks the node; later ones only break its ties, and
    remaining ties go to the smallest node id.  Only ``nodes`` (default:
    all) are eliminated.
    """
    chain = parse_chain(chain)
    targets = set(_targets(g, nodes))
    rng = random.Random(seed)
    ranks = list(range(len(g)))
    rng.shuffle(ranks)
    rand_rank = dict(zip(g.nodes, ranks))
    adj = {v: set(n) for v, n in g.adj.items()}

    def criterion(h: str, v: int):
        nbrs = adj[v]
        if h == "cliqueSize":
            return len(nbrs) + 1
        if h == "fillin":
            ns = sorted(nbrs)
            return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in adj[a])
        if h == "weight":
            return g.card(v) * state_space(nbrs, g)
        if h == "temporalPosition":
            return g.info[v].frame
        if h == "filePosition":
            return g.info[v].position
        if h == "hint":
            return g.info[v].hint
        return rand_rank[v]

    order = []
    while targets:
        v = min(targets, key=lambda x: (tuple(criterion(h, x) for h in chain), x))
        targets.remove(v)
        order.append(v)
        nbrs = adj.pop(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a] |= nbrs - {a}
    return eliminate(g, order)


def mcs_eliminate(g: UGraph, nodes: Iterable[int] | None = None) -> EliminationResult:
    """Eliminate in maximum-cardinality-search order (restricted to ``nodes``)."""
    keep = set(_targets(g, nodes))
    order, _ = mcs(g)
    return eliminate(g, [v for v in order if v in keep])


def exhaustive_orders(g: UGraph, nodes: Iterable[int] | None = None, limit: int = 10,
                      objective: str = "maxclique") -> EliminationResult:
    """Best elimination order of ``nodes`` over all orders.

    Exact dynamic programme over eliminated subsets: the graph left after
    eliminating a set does not depend on the order inside it, so each subset
    keeps the Pareto front of (maxclique, states, fill) over its completions.
    """
    targets = _targets(g, nodes)
    if len(targets) > limit:
        raise ValueError(f"{len(targets)} nodes exceed the exhaustive search limit of {limit}")
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    ids = g.nodes
    bit = {v: 1 << i for i, v in enumerate(ids)}
    adjm = {v: sum(bit[u] for u in g.adj[v]) for v in ids}
    card = {v: g.card(v) for v in ids}
    full = sum(bit[v] for v in targets)

    def members(mask: int) -> list[int]:
        return [v for v in ids if mask & bit[v]]

    def reach(elim: int, v: int) -> int:
        seen = bit[v]
        stack = [v]
        out = 0
        while stack:
            x = stack.pop()
            new = adjm[x] & ~seen
            seen |= new
            out |= new & ~elim
            stack.extend(members(new & elim))
        return out

    rank = (lambda e: (e[0], e[1], e[2])) if objective == "maxclique" else (lambda e: (e[1], e[0], e[2]))
    memo: dict[int, list[tuple]] = {}

    def front(elim: int) -> list[tuple]:
        if elim == full:
            return [(0, 0, 0, None, None)]
        if elim in memo:
            return memo[elim]
        cands = []
        for v in members(full & ~elim):
            q = reach(elim, v)
            qs = members(q)
            size = len(qs) + 1
            states = card[v] * math.prod(card[u] for u in qs)
            fill = 0
            for i, a in enumerate(qs):
                ra = reach(elim, a)
                fill += sum(1 for b in qs[i + 1:] if not ra & bit[b])
            sub = front(elim | bit[v])
            for j, (m2, s2, f2, _, _) in enumerate(sub):
                cands.append((max(size, m2), states + s2, fill + f2, v, j))
        cands.sort(key=lambda e: (rank(e), e[3], e[4]))
        kept: list[tuple] = []
        for e in cands:
            if not any(k[0] <= e[0] and k[1] <= e[1] and k[2] <= e[2] for k in kept):
                kept.append(e)
        memo[elim] = kept
        return kept

    order = []
    elim = 0
    entry = min(front(0), key=rank)
    while elim != full:
        _, _, _, v, j = entry
        order.append(v)
        elim |= bit[v]
        entry = front(elim)[j]
    return eliminate(g, order)


@dataclass
class AnytimeLog:
    entries: list[tuple[float, str, tuple]] = field(default_factory=list)

    def add(self, elapsed: float, strategy: str, best: tuple) -> None:
        self.entries.append((elapsed, strategy, best))

    def is_monotone(self) -> bool:
        scores = [e[2] for e in self.entries]
        return all(b <= a for a, b in zip(scores, scores[1:]))


def anytime(g: UGraph, budget: float, strategies: Sequence = (("fillin", "cliqueSize"),),
            include_exhaustive: bool = True, nodes: Iterable[int] | None = None, seed: int = 0,
            objective: str = "maxclique", exhaustive_limit: int = 10, max_restarts: int | None = None,
            clock: Callable[[], float] = time.perf_counter) -> tuple[EliminationResult, AnytimeLog]:
    """Best triangulation found within ``budget`` seconds.

    The first strategy always runs.  Then the remaining strategies, the
    exhaustive search (when the node count allows) and seeded random-tie
    restarts of the strategies run until the budget is spent.  An exhaustive
    result is optimal, so the search stops there.  Strategies are heuristic
    chains or the string ``"mcs"``.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if not strategies:
        raise ValueError("at least one strategy is required")
    targets = _targets(g, nodes)
    start = clock()
    log = AnytimeLog()
    best: EliminationResult | None = None

    def run(name: str, fn) -> None:
        nonlocal best
        res = fn()
        if best is None or score_key(res, objective) < score_key(best, objective):
            best = res
        log.add(clock() - start, name, score_key(best, objective))

    def strategy_fn(s, tie_seed):
        if s == "mcs":
            return lambda: mcs_eliminate(g, targets)
        return lambda: greedy_eliminate(g, s, tie_seed, targets)

    def name_of(s) -> str:
        return s if isinstance(s, str) else ",".join(parse_chain(s))

    run(name_of(strategies[0]), strategy_fn(strategies[0], seed))
    for s in strategies[1:]:
        if clock() - start >= budget:
            return best, log
        run(name_of(s), strategy_fn(s, seed))
    if include_exhaustive and len(targets) <= exhaustive_limit:
        if clock() - start >= budget:
            return best, log
        run("exhaustive", lambda: exhaustive_orders(g, targets, exhaustive_limit, objective))
        return best, log
    chains = [parse_chain(s) for s in strategies if s != "mcs"] or [("fillin", "cliqueSize")]
    restart = 0
    while clock() - start < budget and (max_restarts is None or restart < max_restarts):
        base = chains[restart % len(chains)]
        chain = base if base[-1] == "random" else base + ("random",)
        run(f"{','.join(chain)}#{restart}", strategy_fn(chain, seed + 1 + restart))
        restart += 1
    return best, log


@dataclass(frozen=True)
class EngineSettings:
    """How partitions are triangulated.

    ``budget`` of 0 runs the heuristic chain once (fully deterministic);
    a positive budget (seconds) hands control to :func:`anytime`.
    """

    heuristics: tuple[str, ...] = ("fillin", "cliqueSize")
    seed: int = 0
    budget: float = 0.0
    exhaustive_limit: int = 10
    objective: str = "maxclique"
    include_exhaustive: bool = True
    extra_strategies: tuple = (("cliqueSize", "fillin"), ("weight", "fillin"), "mcs")

    def __post_init__(self):
        object.__setattr__(self, "heuristics", parse_chain(self.heuristics))
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")

    def to_dict(self) -> dict:
        return {
            "heuristics": list(self.heuristics), "seed": self.seed, "budget": self.budget,
            "exhaustive_limit": self.exhaustive_limit, "objective": self.objective,
        }


def triangulate(g: UGraph, nodes: Iterable[int] | None = None,
                settings: EngineSettings = EngineSettings()) -> EliminationResult:
    if settings.budget <= 0:
        return greedy_eliminate(g, settings.heuristics, settings.seed, nodes)
    strategies = (settings.heuristics,) + tuple(settings.extra_strategies)
    res, _ = anytime(g, settings.budget, strategies, settings.include_exhaustive, nodes,
                     settings.seed, settings.objective, settings.exhaustive_limit)
    return res


@dataclass
class TriangulatedPartition:
    """A 1.5-chunk subgraph after interface completion and elimination.

    ``elim_cliques`` are the pruned step cliques of the partition's own
    nodes; assembling an unrolled graph uses only these, so cliques are never
    counted twice.  ``maxclique`` includes the completed right interface,
    ``elim_maxclique`` does not.
    """

    graph: UGraph
    left_interface: frozenset[int]
    right_interface: frozenset[int]
    result: EliminationResult
    elim_cliques: list[frozenset[int]]
    cliques: list[frozenset[int]]
    maxclique: int
    elim_maxclique: int
    log_weight: float

    @property
    def filled(self) -> UGraph:
        return self.graph.with_edges(self.result.fill)


def triangulate_partition(part: UGraph, left_iface: Iterable[int], right_iface: Iterable[int],
                          settings: EngineSettings = EngineSettings()) -> TriangulatedPartition:
    """Complete both interfaces, then eliminate every node except the right interface."""
    left_iface, right_iface = frozenset(left_iface), frozenset(right_iface)
    for name, iface in (("left", left_iface), ("right", right_iface)):
        if not iface <= set(part.nodes):
            raise GraphError(f"{name} interface is not a subset of the partition")
    g = part.completed(left_iface, right_iface)
    proper = [v for v in g.nodes if v not in right_iface]
    res = triangulate(g, proper, settings) if proper else eliminate(g, [])
    elim_cliques = prune_cliques(res.cliques)
    cliques = prune_cliques([*res.cliques, right_iface] if right_iface else res.cliques)
    states = sum(state_space(c, g) for c in elim_cliques)
    return TriangulatedPartition(
        graph=g,
        left_interface=left_iface,
        right_interface=right_iface,
        result=res,
        elim_cliques=elim_cliques,
        cliques=cliques,
        maxclique=max(res.maxclique, len(right_iface)),
        elim_maxclique=res.maxclique,
        log_weight=math.log10(states) if states else float("-inf"),
    )


def virtual_weight(prologue: Sequence[int], chunk: Sequence[int], epilogue: Sequence[int], k: int) -> float:
    """log10 of the total state space with ``k`` repeats of the chunk cliques.

    Arguments are per-clique state spaces; nothing is materialised.
    """
    if not chunk:
        raise ValueError("the repeated chunk must contribute at least one clique")
    if k < 0:
        raise ValueError("k must be non-negative")
    return math.log10(sum(prologue) + k * sum(chunk) + sum(epilogue))
