"""Boundary search, repartitioning and triangulation of dynamic graphical model templates."""

__version__ = "0.1.0"

from .boundary import BoundaryResult, Window, best_boundary, boundary_search, build_window, search_both
from .engine import (EngineSettings, TriangulatedPartition, anytime, exhaustive_orders, greedy_eliminate,
                     triangulate_partition, virtual_weight)
from .estimator import DynamicTriangulator
from .graph import (DGraph, EliminationResult, GraphError, NodeInfo, UGraph, eliminate, fill_oracle,
                    induced_subgraph, is_chordal, is_separator, maximal_cliques, mcs, moralize)
from .pipeline import Assembly, TriangulatedTemplate, run_pipeline, score_unrolled, triangulate_repartition
from .randgen import GenParams, generate
from .repartition import Cut, RepartitionedTemplate, admissible_lengths, l_cut, partition, r_cut
from .template import (FIXTURES, Template, TemplateError, TemplateSyntaxError, Variable, fixture,
                       format_template, load_template, parse_template, unroll, validate)

__all__ = [
    "Assembly", "BoundaryResult", "Cut", "DGraph", "DynamicTriangulator", "EliminationResult", "EngineSettings",
    "FIXTURES", "GenParams", "GraphError", "NodeInfo", "RepartitionedTemplate", "Template", "TemplateError",
    "TemplateSyntaxError", "TriangulatedPartition", "TriangulatedTemplate", "UGraph", "Variable", "Window",
    "admissible_lengths", "anytime", "best_boundary", "boundary_search", "build_window", "eliminate",
    "exhaustive_orders", "fill_oracle", "fixture", "format_template", "generate", "greedy_eliminate",
    "induced_subgraph", "is_chordal", "is_separator", "l_cut", "load_template", "maximal_cliques", "mcs",
    "moralize", "parse_template", "partition", "r_cut", "run_pipeline", "score_unrolled", "search_both",
    "triangulate_partition", "triangulate_repartition", "unroll", "validate", "virtual_weight",
]
