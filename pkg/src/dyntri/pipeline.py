"""Triangulating a repartitioned template and assembling unrolled results.

Each piece (P', C', E') is triangulated once as a 1.5-chunk graph.  An
unrolled triangulation is the union of shifted copies of the piece
cliques, so the state space of ``k`` chunk copies follows from a small
materialised unrolling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boundary import GLOBAL_MEASURES, BoundaryResult, Window
from .engine import EngineSettings, TriangulatedPartition, triangulate_partition
from .graph import UGraph, is_chordal, state_space
from .repartition import (PIECES, RepartitionedTemplate, basic_partition, check_separation, partition,
                          repartition_at, shift_key)
from .template import Template

K_VIRTUAL = 500


@dataclass
class Assembly:
    """Cliques of a ``k``-unrolled triangulation over the original node ids."""

    k: int
    graph: UGraph  # moral graph of the original unrolling
    cliques: list[frozenset[int]]
    origins: list[tuple[str, int]]

    @property
    def filled(self) -> UGraph:
        """Graph made of all clique-internal edges."""
        edges = set()
        for c in self.cliques:
            cs = sorted(c)
            edges.update((a, b) for i, a in enumerate(cs) for b in cs[i + 1:])
        return UGraph(self.graph.info, edges)

    def pruned(self) -> list[tuple[frozenset[int], tuple[str, int]]]:
        """Maximal cliques with their origin; duplicates go to the earliest piece."""
        seen = set()
        uniq = []
        for c, o in zip(self.cliques, self.origins):
            if c not in seen:
                seen.add(c)
                uniq.append((c, o))
        by_size = sorted(uniq, key=lambda co: -len(co[0]))
        kept = []
        for c, o in uniq:
            if not any(len(d) > len(c) and c < d for d, _ in by_size):
                kept.append((c, o))
        return kept

    def states_by_origin(self) -> dict[tuple[str, int], int]:
        out: dict[tuple[str, int], int] = {}
        for c, o in self.pruned():
            out[o] = out.get(o, 0) + state_space(c, self.graph)
        return out

    @property
    def maxclique(self) -> int:
        return max(len(c) for c in self.cliques)

    @property
    def states(self) -> int:
        return sum(self.states_by_origin().values())

    @property
    def log_weight(self) -> float:
        return math.log10(self.states)

    def uncovered(self) -> list[tuple[int, int]]:
        filled = self.filled
        return [e for e in self.graph.edges() if not filled.has_edge(*e)]

    def is_chordal(self) -> bool:
        return is_chordal(self.filled)


@dataclass
class TriangulatedTemplate:
    """A repartitioned template with each piece triangulated."""

    rt: RepartitionedTemplate
    settings: EngineSettings
    pieces: dict[str, TriangulatedPartition]
    _assemblies: dict = field(default_factory=dict, repr=False)

    @property
    def maxclique(self) -> int:
        return max(p.maxclique for p in self.pieces.values())

    @property
    def elim_maxclique(self) -> int:
        return max(p.elim_maxclique for p in self.pieces.values())

    def assemble(self, k: int) -> Assembly:
        """Union the shifted piece cliques over ``k`` copies of C'."""
        if k in self._assemblies:
            return self._assemblies[k]
        rt = self.rt
        n = rt.count(k)
        canon = rt.canonical
        work = rt.work_unrolled(n)
        to_src = rt.to_source(n)
        cliques, origins = [], []
        for piece, j, d in rt.instances(k):
            for c in self.pieces[piece].elim_cliques:
                cliques.append(frozenset(to_src[work.id_of[shift_key(canon.key_of[v], d)]] for v in c))
                origins.append((piece, j))
        out = Assembly(k, rt.source_unrolled(n).moral(), cliques, origins)
        self._assemblies[k] = out
        return out

    def states(self, k: int) -> int:
        """Total clique state space of the ``k``-unrolled triangulation.

        Beyond three copies, interior copies of C' contribute exactly what
        the middle copy of the 3-copy assembly contributes, so nothing
        larger is materialised.
        """
        if k <= 3:
            return self.assemble(k).states
        by = self.assemble(3).states_by_origin()
        inner = by.get(("C", 2), 0)
        if not inner:
            raise ValueError("the middle copy of C' contributes no clique")
        prologue = by.get(("P", 0), 0) + by.get(("C", 1), 0)
        epilogue = by.get(("C", 3), 0) + by.get(("E", 0), 0)
        return prologue + (k - 2) * inner + epilogue

    def log_weight(self, k: int = K_VIRTUAL) -> float:
        return math.log10(self.states(k))

    def verify(self, k: int) -> dict[str, bool]:
        a = self.assemble(k)
        return {
            "chordal": a.is_chordal(),
            "covers_moral_edges": not a.uncovered(),
            "separation": check_separation(self.rt, k),
            "repartition_exact": self.rt.is_isomorphic(k),
        }

    def summary(self, k: int | None = None, k_virtual: int = K_VIRTUAL) -> dict:
        pieces = {}
        for name in PIECES:
            p = self.pieces[name]
            pieces[name + "'"] = {
                "nodes": len(p.graph) - len(p.right_interface),
                "maxclique": p.maxclique,
                "elim_maxclique": p.elim_maxclique,
                "log_weight": round(p.log_weight, 6) if p.elim_cliques else None,
                "fill": len(p.result.fill),
            }
        out = {
            "maxclique": self.maxclique,
            "elim_maxclique": self.elim_maxclique,
            "virtual_k": k_virtual,
            "virtual_log_weight": round(self.log_weight(k_virtual), 6),
            "pieces": pieces,
        }
        if k is not None:
            a = self.assemble(k)
            out["assembled"] = {
                "k": k,
                "slices": self.rt.slices(k),
                "nodes": len(a.graph),
                "maxclique": a.maxclique,
                "log_weight": round(a.log_weight, 6),
                "verification": self.verify(k),
            }
        return out


def triangulate_repartition(rt: RepartitionedTemplate, settings: EngineSettings | None = None) -> TriangulatedTemplate:
    settings = settings or EngineSettings()
    pieces = {}
    for name in PIECES:
        g = rt.piece_graph(name)
        pieces[name] = triangulate_partition(g, rt.piece_ids(rt.piece_left(name)),
                                             rt.piece_ids(rt.piece_right(name)), settings)
    return TriangulatedTemplate(rt, settings, pieces)


def score_unrolled(tt: TriangulatedTemplate, k: int) -> tuple[int, float]:
    """Maxclique and log10 state space of ``k`` copies, without materialising them."""
    return tt.maxclique, tt.log_weight(k)


def global_quality(t: Template, work: Template, mirrored: bool, window: Window, m: int, s: int,
                   kind: str, settings: EngineSettings | None = None):
    """Interface quality that triangulates the whole repartitioned template.

    ``global-mc`` scores the resulting maxclique, ``global-weight`` the log
    weight of the virtual 500-copy unrolling.
    """
    if kind not in GLOBAL_MEASURES:
        raise ValueError(f"not a global measure: {kind!r}")
    settings = settings or EngineSettings()
    memo: dict[frozenset[int], float] = {}

    def quality(iface: frozenset[int], passed: frozenset[int]) -> float:
        if iface not in memo:
            rt = repartition_at(t, work, mirrored, window, m, s, iface, passed)
            tt = triangulate_repartition(rt, settings)
            memo[iface] = float(tt.maxclique) if kind == "global-mc" else tt.log_weight(K_VIRTUAL)
        return memo[iface]

    return quality


def global_boundary(t: Template, m: int, j: str, s: int | None = None, settings: EngineSettings | None = None,
                    direction: str = "best") -> BoundaryResult:
    rt = partition(t, m, m if s is None else s, j, direction, settings=settings)
    return rt.boundary


@dataclass
class PipelineResult:
    rt: RepartitionedTemplate
    tt: TriangulatedTemplate
    k: int | None
    basic: bool

    def to_dict(self) -> dict:
        d = {"partitioning": "basic" if self.basic else "boundary"}
        d["repartition"] = self.rt.to_dict()
        d["triangulation"] = self.tt.summary(self.k)
        return d


def run_pipeline(t: Template, m: int = 1, s: int = 1, j: str = "size", direction: str = "best",
                 basic: bool = False, settings: EngineSettings | None = None, k: int | None = None) -> PipelineResult:
    """Boundary search, repartition, piece triangulation and (optionally) a k-copy assembly."""
    settings = settings or EngineSettings()
    if basic:
        rt = basic_partition(t, m, s)
    else:
        rt = partition(t, m, s, j, direction, settings=settings)
    tt = triangulate_repartition(rt, settings)
    return PipelineResult(rt, tt, k, basic)
