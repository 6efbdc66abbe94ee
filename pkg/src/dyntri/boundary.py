"""Interfaces, interface quality measures and the boundary search.

The search runs on a :class:`Window`: the moral graph around ``M``
consecutive chunk copies with everything to their left collapsed into
``window.left`` and everything to their right into ``window.right``.  A
boundary is described by the set of chunk nodes it has already passed
(``left_of_boundary``); its left interface is every remaining chunk node
adjacent to the left side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .graph import UGraph, is_separator
from .template import Key, Template, UnrolledGraph, unroll

LOCAL_MEASURES = ("size", "fillin", "weight")
GLOBAL_MEASURES = ("global-mc", "global-weight")


@dataclass
class Window:
    """Chunk copies ``C_1..C_M`` plus collapsed left and right context.

    ``unrolled`` holds ``M + 2`` chunk copies; copy 0 belongs to ``left`` and
    copy ``M + 1`` to ``right`` so that any boundary found stays valid when
    it is laid between interior chunks.  The graph is the union of that
    unrolled moral graph and the moral graph of the plain ``M``-copy
    unrolling, which carries the edges induced next to P and E.
    """

    graph: UGraph
    left: frozenset[int]
    chunks: tuple[frozenset[int], ...]
    right: frozenset[int]
    unrolled: UnrolledGraph

    @property
    def m(self) -> int:
        return len(self.chunks)

    @property
    def core(self) -> frozenset[int]:
        return frozenset().union(*self.chunks)

    def reversed(self) -> "Window":
        return Window(self.graph, self.right, self.chunks[::-1], self.left, self.unrolled)

    def split(self, at: int) -> tuple[frozenset[int], frozenset[int]]:
        """Node sets left and right of the seam before chunk ``at`` (0-based)."""
        left = self.left.union(*self.chunks[:at])
        right = self.right.union(*self.chunks[at:])
        return left, right

    def left_interface(self, at: int = 0) -> frozenset[int]:
        return left_interface(self.graph, *self.split(at))

    def right_interface(self, at: int | None = None) -> frozenset[int]:
        return right_interface(self.graph, *self.split(self.m if at is None else at))

    def key(self, v: int) -> Key:
        """Chunk-relative key with the first window chunk as copy 0."""
        part, copy, i = self.unrolled.key_of[v]
        return (part, copy - 1, i) if part == "C" else (part, copy, i)


def build_window(t: Template, m: int) -> Window:
    if m < 1:
        raise ValueError("M must be >= 1")
    if not t.vars_in("C"):
        raise ValueError("empty chunk")
    big = unroll(t, m + 2)
    small = unroll(t, m)
    extra = []
    for a, b in small.moral().edges():
        ends = []
        for v in (a, b):
            part, copy, i = small.key_of[v]
            ends.append(big.id_of[(part, copy + 1, i) if part == "C" else (part, copy, i)])
        extra.append(tuple(ends))
    graph = big.moral().with_edges(extra)
    left = frozenset(big.part_nodes("P") | big.chunk(0))
    right = frozenset(big.part_nodes("E") | big.chunk(m + 1))
    chunks = tuple(frozenset(big.chunk(c)) for c in range(1, m + 1))
    return Window(graph, left, chunks, right, big)


def left_interface(g: UGraph, left: Iterable[int], right: Iterable[int]) -> frozenset[int]:
    """Nodes of ``right`` adjacent to at least one node of ``left``."""
    left = frozenset(left)
    return frozenset(v for v in right if g.adj[v] & left)


def right_interface(g: UGraph, left: Iterable[int], right: Iterable[int]) -> frozenset[int]:
    """Nodes of ``left`` adjacent to at least one node of ``right``."""
    return left_interface(g, right, left)


# --- quality measures ---------------------------------------------------------

def j_size(iface: Iterable[int], g: UGraph | None = None) -> float:
    return float(len(frozenset(iface)))


def j_fillin(iface: Iterable[int], g: UGraph) -> float:
    """Number of edges needed to complete ``iface``."""
    nodes = sorted(iface)
    return float(sum(1 for i, u in enumerate(nodes) for v in nodes[i + 1:] if not g.has_edge(u, v)))


def j_weight(iface: Iterable[int], g: UGraph) -> float:
    """log10 of the joint state space of the interface variables."""
    return math.log10(math.prod(g.card(v) for v in iface))


_LOCAL = {"size": j_size, "fillin": j_fillin, "weight": j_weight}


def local_quality(kind: str, g: UGraph) -> Callable[[frozenset[int], frozenset[int]], float]:
    try:
        fn = _LOCAL[kind]
    except KeyError:
        raise ValueError(f"unknown local quality measure {kind!r}") from None
    return lambda iface, _passed: fn(iface, g)


# --- search ---------------------------------------------------------------------

@dataclass
class BoundaryResult:
    """Best interface found by :func:`boundary_search`.

    For ``direction == "right"`` the roles of the two sides are swapped:
    ``left_of_boundary`` holds the chunk nodes the boundary passed while
    moving leftwards and ``interface`` is a right interface.
    """

    interface: frozenset[int]
    left_of_boundary: frozenset[int]
    boundary_edges: frozenset[tuple[int, int]]
    quality: float
    direction: str
    states_visited: int
    initial_interface: frozenset[int]
    initial_quality: float
    window: Window = field(repr=False)

    def interface_keys(self) -> list[Key]:
        return sorted(self.window.key(v) for v in self.interface)

    def labels(self, nodes: Iterable[int] | None = None) -> list[str]:
        g = self.window.graph
        nodes = self.interface if nodes is None else nodes
        return [g.label(v) for v in sorted(nodes)]


def boundary_search(
    window: Window,
    quality: str | Callable[[frozenset[int], frozenset[int]], float] = "size",
    direction: str = "left",
    memoize: bool = True,
    admissible: Callable[[frozenset[int], frozenset[int]], bool] | None = None,
    visit: Callable[[frozenset[int], frozenset[int]], None] | None = None,
) -> BoundaryResult:
    """Advance a boundary node by node through the window's chunks.

    Parameters
    ----------
    window : Window
    quality : str or callable
        A local measure name or ``f(interface, left_of_boundary) -> float``
        (lower is better).
    direction : {"left", "right"}
        ``"right"`` searches right interfaces by swapping the two sides.
    memoize : bool
        Skip interfaces already seen.  Disabling it only inflates
        ``states_visited``.
    admissible : callable, optional
        States rejected here are still explored but never reported as best.
    visit : callable, optional
        Called with every interface the search considers.

    Returns
    -------
    BoundaryResult
        The best interface, ties broken by size and then by sorted node ids.
    """
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    if window.m < 1 or not all(window.chunks):
        raise ValueError("window needs M >= 1 non-empty chunks")
    w = window if direction == "left" else window.reversed()
    g = w.graph
    if isinstance(quality, str):
        quality = local_quality(quality, g)
    core, first, far = w.core, w.chunks[0], w.right
    best = None
    seen = set()
    count = 0

    def note(iface: frozenset[int], passed: frozenset[int]) -> None:
        nonlocal best, count
        count += 1
        if visit is not None:
            visit(iface, passed)
        if admissible is not None and not admissible(iface, passed):
            return
        q = quality(iface, passed)
        key = (q, len(iface), tuple(sorted(iface)))
        if best is None or key < best[0]:
            best = (key, iface, passed)

    def recurse(iface: frozenset[int], passed: frozenset[int]) -> None:
        for v in sorted(iface):
            if g.adj[v] & far:
                continue
            passed2 = passed | {v}
            if first <= passed2:
                continue
            iface2 = (iface | (g.adj[v] & core)) - passed2
            if memoize:
                if iface2 in seen:
                    continue
                seen.add(iface2)
            note(iface2, passed2)
            recurse(iface2, passed2)

    start = frozenset(v for v in core if g.adj[v] & w.left)
    seen.add(start)
    note(start, frozenset())
    initial_quality = quality(start, frozenset())
    recurse(start, frozenset())
    if best is None:
        raise ValueError("no admissible boundary found")
    _, iface, passed = best
    side = w.left | passed
    edges = frozenset((u, v) for u, v in g.edges() if (u in side) != (v in side))
    return BoundaryResult(iface, passed, edges, best[0][0], direction, count,
                          start, initial_quality, window)


def separates(window: Window, iface: Iterable[int], passed: Iterable[int], direction: str = "left") -> bool:
    """Check that ``iface`` separates the passed side from the rest of the window."""
    w = window if direction == "left" else window.reversed()
    iface = frozenset(iface)
    side = w.left | frozenset(passed)
    rest = frozenset(w.graph.nodes) - side - iface
    return is_separator(w.graph, iface, side, rest)


def search_both(t: Template, m: int, j: str = "size", memoize: bool = True) -> tuple[BoundaryResult, BoundaryResult]:
    """Left- and right-direction searches over the same window (local J only)."""
    if j not in LOCAL_MEASURES:
        raise ValueError(f"search_both needs a local measure, got {j!r}")
    w = build_window(t, m)
    return (boundary_search(w, j, "left", memoize=memoize),
            boundary_search(w, j, "right", memoize=memoize))


def best_boundary(t: Template, m: int, j: str = "size", **kwargs) -> BoundaryResult:
    """Run both directions and keep the better interface (ties go left).

    Global measures are delegated to :func:`dyntri.pipeline.global_boundary`,
    which accepts the engine keyword arguments.
    """
    if j in GLOBAL_MEASURES:
        from .pipeline import global_boundary
        return global_boundary(t, m, j, **kwargs)
    left, right = search_both(t, m, j)
    return right if right.quality < left.quality else left
