"""Repartitioning a template along a found boundary.

Two copies of the boundary are laid ``S`` chunks apart across ``M + S``
chunk copies.  Everything left of the first copy becomes the new prologue
P', everything right of the second the new epilogue E', and the nodes in
between form the new chunk C'.  Unrolling the new template ``k`` times
reproduces the original unrolled ``M + k*S`` times.

All node sets are kept as keys ``(part, copy, var)`` of the original
template unrolled ``M + S`` times (the canonical coordinates).  A boundary
searched rightwards is handled by working on the time-reversed template and
mapping nodes back through their frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from .boundary import (GLOBAL_MEASURES, LOCAL_MEASURES, BoundaryResult, Window, boundary_search,
                       build_window, local_quality)
from .graph import DGraph, GraphError, UGraph, moralize
from .template import Key, Template, UnrolledGraph, unroll

PIECES = ("P", "C", "E")


class RepartitionError(ValueError):
    pass


def shift_key(key: Key, d: int) -> Key:
    part, c, i = key
    return (part, c + d, i) if part == "C" else key


def shift_keys(keys: Iterable[Key], d: int) -> frozenset[Key]:
    return frozenset(shift_key(k, d) for k in keys)


# --- cuts ------------------------------------------------------------------------

@dataclass(frozen=True)
class Cut:
    """Boundary edges and the connected node sets on either side."""

    boundary_edges: frozenset[tuple[int, int]]
    left_nodes: frozenset[int]
    right_nodes: frozenset[int]


def _reach(g: UGraph, seeds: Iterable[int], region: frozenset[int], blocked: frozenset) -> set[int]:
    seen = set(v for v in seeds if v in region)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in g.adj[x]:
            if y in region and y not in seen and (min(x, y), max(x, y)) not in blocked:
                seen.add(y)
                stack.append(y)
    return seen


def make_cut(g: UGraph, boundary_edges: Iterable[tuple[int, int]], region: Iterable[int],
             left_seeds: Iterable[int], right_seeds: Iterable[int]) -> Cut:
    """Split ``region`` into the parts reachable from each seed set.

    Raises
    ------
    RepartitionError
        If some node is reachable from both sides, i.e. the boundary edges do
        not disconnect the region.
    """
    region = frozenset(region)
    blocked = frozenset((min(u, v), max(u, v)) for u, v in boundary_edges)
    left = _reach(g, left_seeds, region, blocked)
    right = _reach(g, right_seeds, region, blocked)
    if left & right:
        raise RepartitionError("boundary does not disconnect the region")
    return Cut(blocked, frozenset(left), frozenset(right))


def l_cut(cut: Cut, region: Iterable[int]) -> frozenset[int]:
    return cut.left_nodes & frozenset(region)


def r_cut(cut: Cut, region: Iterable[int]) -> frozenset[int]:
    return cut.right_nodes & frozenset(region)


def window_cut(result: BoundaryResult) -> Cut:
    """Cut of the whole search window by a boundary result."""
    w = result.window if result.direction == "left" else result.window.reversed()
    g = w.graph
    return make_cut(g, result.boundary_edges, g.nodes, w.left, w.right)


# --- admissibility ------------------------------------------------------------

def compatibility_filter(window: Window, s: int) -> Callable[[frozenset[int], frozenset[int]], bool]:
    """Reject boundaries whose S-shifted copy would overlap the original.

    Needed only for ``S < M``: every passed or interface node at chunk
    ``c >= S`` must sit behind the shifted boundary, i.e. its copy in
    chunk ``c - S`` must have been passed as well.
    """

    def ok(iface: frozenset[int], passed: frozenset[int]) -> bool:
        keys = {window.key(v) for v in passed}
        for part, c, i in keys | {window.key(v) for v in iface}:
            if c >= s and (part, c - s, i) not in keys:
                return False
        return True

    return ok


def admissible_lengths(p_frames: int, c_frames: int, e_frames: int, m: int, s: int) -> Callable[[int], bool]:
    """Predicate for unrolled lengths ``T = T(P) + (M + k S) T(C) + T(E)``, ``k >= 0``."""

    def ok(t: int) -> bool:
        rest = t - p_frames - e_frames - m * c_frames
        return rest >= 0 and rest % (s * c_frames) == 0

    return ok


# --- the repartitioned template ---------------------------------------------

def _mirror_ids(work: UnrolledGraph, source: UnrolledGraph) -> dict[int, int]:
    """Node ids of a time-reversed unrolling mapped onto the original one."""
    last = source.slices - 1
    by_label = {(i.name, i.frame): v for v, i in source.graph.info.items()}
    return {v: by_label[(i.name, last - i.frame)] for v, i in work.graph.info.items()}


@dataclass
class RepartitionedTemplate:
    """New prologue, chunk and epilogue cut out of an unrolled template.

    ``left_interface`` lies in C' and is adjacent to P'; ``right_interface``
    is its image one copy later (shifted by ``S`` chunks), i.e. the left
    interface of the next C' copy, or of E'.
    """

    source: Template
    work: Template
    mirrored: bool
    m: int
    s: int
    p_prime: frozenset[Key]
    c_prime: frozenset[Key]
    e_prime: frozenset[Key]
    left_interface: frozenset[Key]
    right_interface: frozenset[Key]
    boundary: BoundaryResult | None = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # geometry --------------------------------------------------------------
    def count(self, k: int) -> int:
        """Chunk copies of the original template behind ``k`` copies of C'."""
        if k < 0:
            raise RepartitionError("k must be non-negative")
        return self.m + k * self.s

    def slices(self, k: int) -> int:
        t = self.source
        return t.p_frames + self.count(k) * t.c_frames + t.e_frames

    def admissible(self, length: int) -> bool:
        t = self.source
        return admissible_lengths(t.p_frames, t.c_frames, t.e_frames, self.m, self.s)(length)

    def k_for(self, length: int) -> int:
        if not self.admissible(length):
            raise RepartitionError(f"T={length} is not admissible; need {self.formula()}")
        t = self.source
        return (length - t.p_frames - t.e_frames - self.m * t.c_frames) // (self.s * t.c_frames)

    def formula(self) -> str:
        t = self.source
        return (f"T = {t.p_frames} + ({self.m} + k*{self.s})*{t.c_frames} + {t.e_frames}, k >= 0")

    def instances(self, k: int) -> list[tuple[str, int, int]]:
        """``(piece, copy, shift)`` for every piece instance of a k-unrolling."""
        out = [("P", 0, 0)]
        out += [("C", j, (j - 1) * self.s) for j in range(1, k + 1)]
        out.append(("E", 0, (k - 1) * self.s))
        return out

    def piece_nodes(self, piece: str) -> frozenset[Key]:
        return {"P": self.p_prime, "C": self.c_prime, "E": self.e_prime}[piece]

    def piece_left(self, piece: str) -> frozenset[Key]:
        return {"P": frozenset(), "C": self.left_interface, "E": self.right_interface}[piece]

    def piece_right(self, piece: str) -> frozenset[Key]:
        return {"P": self.left_interface, "C": self.right_interface, "E": frozenset()}[piece]

    # unrollings -----------------------------------------------------------------
    def work_unrolled(self, n: int) -> UnrolledGraph:
        key = ("work", n)
        if key not in self._cache:
            self._cache[key] = unroll(self.work, n)
        return self._cache[key]

    def source_unrolled(self, n: int) -> UnrolledGraph:
        if not self.mirrored:
            return self.work_unrolled(n)
        key = ("source", n)
        if key not in self._cache:
            self._cache[key] = unroll(self.source, n)
        return self._cache[key]

    def to_source(self, n: int) -> dict[int, int]:
        """Map node ids of the work unrolling onto the original unrolling."""
        key = ("map", n)
        if key not in self._cache:
            w = self.work_unrolled(n)
            if self.mirrored:
                self._cache[key] = _mirror_ids(w, self.source_unrolled(n))
            else:
                self._cache[key] = {v: v for v in w.graph.nodes}
        return self._cache[key]

    @property
    def canonical(self) -> UnrolledGraph:
        return self.work_unrolled(self.m + self.s)

    def layout(self, k: int) -> dict[int, tuple[str, int, Key]]:
        """Original node id -> (piece, copy, canonical key) for a k-unrolling."""
        n = self.count(k)
        w = self.work_unrolled(n)
        to_src = self.to_source(n)
        out = {}
        for piece, j, d in self.instances(k):
            for key in self.piece_nodes(piece):
                v = w.id_of[shift_key(key, d)]
                if to_src[v] in out:
                    raise RepartitionError(f"pieces overlap at {w.graph.info[v].label}")
                out[to_src[v]] = (piece, j, key)
        if len(out) != len(w.graph):
            raise RepartitionError("pieces do not cover the unrolled graph")
        return out

    # piece graphs ------------------------------------------------------------------
    def piece_graph(self, piece: str) -> UGraph:
        """Moral subgraph of a piece plus its right interface.

        Edges are collected from every placement of the piece (first, inner
        and last copy, and the k=0 layout), so one triangulation serves
        every unrolling length.  Node ids are those of the canonical
        unrolling.
        """
        key = ("piece", piece)
        if key in self._cache:
            return self._cache[key]
        canon = self.canonical
        nodes = self.piece_nodes(piece) | self.piece_right(piece)
        ids = {canon.id_of[k]: k for k in nodes}
        edges = set()
        for k in (0, 1, 2, 3):
            w = self.work_unrolled(self.count(k))
            g = w.moral()
            for name, _, d in self.instances(k):
                if name != piece:
                    continue
                local = {w.id_of[shift_key(kk, d)]: v for v, kk in ids.items()}
                for a in local:
                    for b in g.adj[a]:
                        if b in local and local[a] < local[b]:
                            edges.add((local[a], local[b]))
        out = UGraph({v: canon.graph.info[v] for v in ids}, sorted(edges))
        self._cache[key] = out
        return out

    def piece_ids(self, keys: Iterable[Key]) -> frozenset[int]:
        return frozenset(self.canonical.id_of[k] for k in keys)

    # exact re-unrolling ------------------------------------------------------------
    @cached_property
    def edge_classes(self) -> dict[str, frozenset]:
        """Directed edges of the new template, by the pieces they join.

        Endpoints are ``(piece, copy offset, canonical key)``.  ``PE`` holds
        the edges that join P' straight to E' when C' is unrolled zero times.
        """
        classes: dict[str, set] = {c: set() for c in ("PP", "PC", "CC", "CC+", "CE", "EE", "PE")}

        def tag(lay, v):
            piece, j, key = lay[v]
            return piece, j, key

        for k in (0, 2):
            lay = self.layout(k)
            n = self.count(k)
            to_src = self.to_source(n)
            w = self.work_unrolled(n)
            for a, b in w.graph.edges():
                (pa, ja, ka), (pb, jb, kb) = tag(lay, to_src[a]), tag(lay, to_src[b])
                pair = pa + pb
                if k == 0:
                    name = {"PP": "PP", "EE": "EE", "PE": "PE", "EP": "PE"}[pair]
                    classes[name].add(((pa, 0, ka), (pb, 0, kb)))
                    continue
                if pa == "C" and pb == "C":
                    if abs(ja - jb) > 1:
                        raise RepartitionError("edge skips a C' copy")
                    base = min(ja, jb)
                    name = "CC" if ja == jb else "CC+"
                    classes[name].add((("C", ja - base, ka), ("C", jb - base, kb)))
                    continue
                ends = sorted([(pa, ja), (pb, jb)], key=lambda e: "PCE".index(e[0]))
                sig = "".join(e[0] for e in ends)
                if sig == "PE" or (sig == "PC" and ends[1][1] != 1) or (sig == "CE" and ends[0][1] != 2):
                    raise RepartitionError(f"edge joins non-adjacent pieces ({pa}{ja}, {pb}{jb})")
                name = {"PP": "PP", "EE": "EE", "PC": "PC", "CE": "CE"}[sig]
                classes[name].add(((pa, 0, ka), (pb, 0, kb)))
        return {name: frozenset(v) for name, v in classes.items()}

    def unroll_new(self, k: int) -> tuple[DGraph, dict[tuple[str, int, Key], int]]:
        """Unroll P' + k copies of C' + E' from the edge classes alone.

        Returns the directed graph over the original unrolling's node ids
        and the placement of every ``(piece, copy, key)``.
        """
        n = self.count(k)
        src = self.source_unrolled(n)
        lay = self.layout(k)
        place = {val: v for v, val in lay.items()}
        cls = self.edge_classes

        def node(piece, j, key):
            return place[(piece, j, key)]

        edges = set()
        if k == 0:
            for name in ("PP", "EE", "PE"):
                for (pa, _, ka), (pb, _, kb) in cls[name]:
                    edges.add((node(pa, 0, ka), node(pb, 0, kb)))
        else:
            for (pa, _, ka), (pb, _, kb) in cls["PP"] | cls["EE"]:
                edges.add((node(pa, 0, ka), node(pb, 0, kb)))
            for (pa, _, ka), (pb, _, kb) in cls["PC"]:
                edges.add((node(pa, 0 if pa == "P" else 1, ka), node(pb, 0 if pb == "P" else 1, kb)))
            for (pa, _, ka), (pb, _, kb) in cls["CE"]:
                edges.add((node(pa, 0 if pa == "E" else k, ka), node(pb, 0 if pb == "E" else k, kb)))
            for j in range(1, k + 1):
                for (_, oa, ka), (_, ob, kb) in cls["CC"]:
                    edges.add((node("C", j, ka), node("C", j, kb)))
            for j in range(1, k):
                for (_, oa, ka), (_, ob, kb) in cls["CC+"]:
                    edges.add((node("C", j + oa, ka), node("C", j + ob, kb)))
        return DGraph(src.graph.info, sorted(edges)), place

    def is_isomorphic(self, k: int) -> bool:
        """Re-unrolled and moralized new template equals the original unrolling."""
        g, _ = self.unroll_new(k)
        return moralize(g) == self.source_unrolled(self.count(k)).moral()

    # reporting ----------------------------------------------------------------------
    def labels(self, keys: Iterable[Key]) -> list[str]:
        """Node labels of canonical keys, in original frames."""
        canon = self.canonical
        to_src = self.to_source(self.m + self.s)
        info = self.source_unrolled(self.m + self.s).graph.info
        return sorted((info[to_src[canon.id_of[k]]].label for k in keys),
                      key=lambda s: (int(s.rsplit("@", 1)[1]), s))

    def to_dict(self) -> dict:
        d = {
            "M": self.m,
            "S": self.s,
            "direction": "right" if self.mirrored else "left",
            "nodes": {"P'": len(self.p_prime), "C'": len(self.c_prime), "E'": len(self.e_prime)},
            "P'": self.labels(self.p_prime),
            "C'": self.labels(self.c_prime),
            "E'": self.labels(self.e_prime),
            "left_interface": self.labels(self.left_interface),
            "right_interface": self.labels(self.right_interface),
            "admissible_lengths": {
                "T_P": self.source.p_frames, "T_C": self.source.c_frames, "T_E": self.source.e_frames,
                "M": self.m, "S": self.s, "formula": self.formula(),
            },
        }
        if self.boundary is not None:
            d["boundary"] = {"quality": self.boundary.quality, "states_visited": self.boundary.states_visited}
        return d


def build_repartition(source: Template, work: Template, mirrored: bool, m: int, s: int,
                      passed: Iterable[Key], interface: Iterable[Key],
                      boundary: BoundaryResult | None = None) -> RepartitionedTemplate:
    """Lay the boundary ``passed``/``interface`` (chunk-relative keys) twice, ``S`` apart."""
    if m < 1 or s < 1:
        raise RepartitionError("M and S must be >= 1")
    b1 = frozenset(passed)
    iface = frozenset(interface)
    canon = unroll(work, m + s)
    keys = frozenset(canon.id_of)
    p_prime = frozenset(k for k in keys if k[0] == "P") | b1
    b2 = shift_keys(b1, s)
    e_prime = frozenset(k for k in keys if k[0] == "E" or (k[0] == "C" and k[1] >= s)) - b2
    if p_prime & e_prime:
        raise RepartitionError("the S-shifted boundary collides with the original")
    c_prime = keys - p_prime - e_prime
    if not iface <= c_prime:
        raise RepartitionError("interface is not inside the new chunk")
    rt = RepartitionedTemplate(source, work, mirrored, m, s, p_prime, c_prime, e_prime,
                               iface, shift_keys(iface, s), boundary)
    rt._cache[("work", m + s)] = canon
    return rt


def search_window(t: Template, m: int, s: int, direction: str):
    """Work template, mirror flag, window and compatibility filter for a direction."""
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    work = t if direction == "left" else t.mirrored()
    window = build_window(work, m)
    return work, direction == "right", window, compatibility_filter(window, s)


def partition(t: Template, m: int = 1, s: int = 1, j: str = "size", direction: str = "left",
              basic: bool = False, settings=None) -> RepartitionedTemplate:
    """Search a boundary and repartition ``t`` along it.

    Parameters
    ----------
    t : Template
    m, s : int
        Chunks the boundary may span, and chunks between its two copies.
    j : str
        Interface quality measure, local or global.
    direction : {"left", "right", "best"}
        ``"best"`` runs both and keeps the better quality (ties go left).
    basic : bool
        Skip the search and cut at the initial interface of ``direction``;
        with ``"best"`` the side with the smaller initial interface wins.
    settings : EngineSettings, optional
        Engine used by global measures.
    """
    if m < 1 or s < 1:
        raise RepartitionError("M and S must be >= 1")
    if j not in LOCAL_MEASURES + GLOBAL_MEASURES:
        raise ValueError(f"unknown quality measure {j!r}")
    if direction == "best":
        options = [partition(t, m, s, j, d, basic, settings) for d in ("left", "right")]
        if basic:
            return min(options, key=lambda r: len(r.left_interface))
        return min(options, key=lambda r: r.boundary.quality)

    work, mirrored, window, ok = search_window(t, m, s, direction)
    if j in GLOBAL_MEASURES:
        from .pipeline import global_quality
        quality = global_quality(t, work, mirrored, window, m, s, j, settings)
    else:
        quality = j
    if basic:
        res = initial_boundary(window, quality)
    else:
        res = boundary_search(window, quality, "left", admissible=ok)
    cut = window_cut(res)
    passed = l_cut(cut, window.core)
    if passed != res.left_of_boundary:
        raise RepartitionError("connected cut disagrees with the boundary search")
    return build_repartition(t, work, mirrored, m, s, [window.key(v) for v in passed],
                             res.interface_keys(), res)


def initial_boundary(window: Window, quality) -> BoundaryResult:
    """The starting interface of a left search, as a search result."""
    if isinstance(quality, str):
        quality = local_quality(quality, window.graph)
    iface = window.left_interface()
    q = quality(iface, frozenset())
    left = window.left
    edges = frozenset((u, v) for u, v in window.graph.edges() if (u in left) != (v in left))
    return BoundaryResult(iface, frozenset(), edges, q, "left", 1, iface, q, window)


def repartition_at(t: Template, work: Template, mirrored: bool, window: Window, m: int, s: int,
                   iface: frozenset[int], passed: frozenset[int]) -> RepartitionedTemplate:
    return build_repartition(t, work, mirrored, m, s, [window.key(v) for v in passed],
                             [window.key(v) for v in iface])


def basic_partition(t: Template, m: int = 1, s: int = 1) -> RepartitionedTemplate:
    """Cut at the initial interface on the side where it is smaller (ties go left)."""
    return partition(t, m, s, "size", "best", basic=True)


def check_separation(rt: RepartitionedTemplate, k: int) -> bool:
    """Every laid boundary separates the pieces before it from the rest."""
    n = rt.count(k)
    g = rt.source_unrolled(n).moral()
    lay = rt.layout(k)
    order = [(p, j) for p, j, _ in rt.instances(k)]
    pos = {v: order.index((p, j)) for v, (p, j, _) in lay.items()}
    for cut in range(len(order) - 1):
        nxt_piece, nxt_copy = order[cut + 1]
        sep = {v for v, (p, j, key) in lay.items()
               if (p, j) == (nxt_piece, nxt_copy) and key in rt.piece_left(nxt_piece)}
        left = {v for v in lay if pos[v] <= cut}
        right = set(lay) - left - sep
        if not is_separator_safe(g, sep, left, right):
            return False
    return True


def is_separator_safe(g: UGraph, sep, left, right) -> bool:
    from .graph import is_separator
    try:
        return is_separator(g, sep, left, right)
    except GraphError:
        return False
