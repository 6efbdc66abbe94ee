import itertools
import math

import networkx as nx
import pytest
from hypothesis import given

from conftest import cycle, path
from strategies import graph_and_order, graphs

from dyntri.graph import (DGraph, GraphError, NodeInfo, UGraph, eliminate, fill_oracle, induced_subgraph,
                          is_chordal, is_separator, log_weight, maximal_cliques, mcs, moralize, prune_cliques)
from dyntri.template import fixture, unroll


def dgraph(n, edges):
    return DGraph({v: NodeInfo(str(v), position=v) for v in range(n)}, edges)


def to_nx(g: UGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_edges_from(g.edges())
    return h


# moralize ---------------------------------------------------------------------

def test_moralize_no_common_child():
    assert moralize(dgraph(3, [(0, 1), (0, 2)])).edges() == [(0, 1), (0, 2)]


def test_moralize_marries_parents():
    assert moralize(dgraph(3, [(0, 2), (1, 2)])).edges() == [(0, 1), (0, 2), (1, 2)]


def test_moralize_diamond_against_pairwise_closure():
    d = dgraph(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    expected = {(0, 1), (0, 2), (1, 3), (2, 3)}
    for a, b in itertools.combinations(range(4), 2):
        if any(a in d.parents[c] and b in d.parents[c] for c in range(4)):
            expected.add((a, b))
    assert moralize(d).edge_set() == expected == {(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)}


def test_moral_graph_marries_every_coparent_pair():
    u = unroll(fixture("hourglass"), 3)
    g = u.moral()
    assert len(g.edges()) >= len(u.graph.edges())
    for c in u.graph.nodes:
        for a, b in itertools.combinations(u.graph.parents[c], 2):
            assert g.has_edge(a, b)


def test_find_cycle_reports_edge_order():
    d = dgraph(3, [(0, 1), (1, 2), (2, 0)])
    cyc = d.find_cycle()
    assert cyc[0] == cyc[-1]
    assert all(b in d.children[a] for a, b in zip(cyc, cyc[1:]))
    assert dgraph(3, [(0, 1)]).find_cycle() is None


def test_graph_rejects_loops_and_unknown_nodes():
    with pytest.raises(GraphError):
        UGraph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError):
        UGraph.from_edges(2, [(0, 5)])


# induced subgraph / separators ---------------------------------------------------

def test_induced_subgraph_examples():
    p = path(3)
    assert induced_subgraph(p, {0, 2}).edges() == []
    tri = UGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert induced_subgraph(tri, tri.nodes) == tri
    assert induced_subgraph(cycle(4), {0, 1, 2}).edges() == [(0, 1), (1, 2)]
    with pytest.raises(GraphError):
        induced_subgraph(p, {7})


def test_is_separator_examples():
    p = path(3)
    assert is_separator(p, {1}, {0}, {2})
    assert not is_separator(p, set(), {0, 1}, {2})
    with pytest.raises(GraphError):
        is_separator(p, {1}, {0, 1}, {2})
    with pytest.raises(GraphError):
        is_separator(p, {1}, {0}, set())


def test_hourglass_bottleneck_separates():
    u = unroll(fixture("hourglass"), 2)
    g = u.moral()
    e = next(v for v in u.chunk(0) if g.info[v].name == "E")
    f = g.info[e].frame
    left = {v for v in g.nodes if g.info[v].frame < f}
    right = set(g.nodes) - left - {e}
    assert is_separator(g, {e}, left, right)
    h = to_nx(g)
    h.remove_node(e)
    comps = list(nx.connected_components(h))
    assert not any(c & left and c & right for c in comps)


# elimination ---------------------------------------------------------------------

def test_eliminate_path_examples():
    p = path(3)
    r = eliminate(p, [0, 1, 2])
    assert r.fill == frozenset() and r.maxclique == 2
    r = eliminate(p, [1, 0, 2])
    assert r.fill == {(0, 2)} and r.maxclique == 3
    assert fill_oracle(p, [1, 0, 2]) == {(0, 2)}


def test_eliminate_four_cycle():
    r = eliminate(cycle(4), [0, 1, 2, 3])
    assert r.fill == {(1, 3)} and r.maxclique == 3


def test_eliminate_rejects_bad_orders():
    with pytest.raises(GraphError):
        eliminate(path(3), [0, 0])
    with pytest.raises(GraphError):
        eliminate(path(3), [9])


def test_partial_elimination_leaves_rest():
    r = eliminate(cycle(4), [0])
    assert r.order == (0,) and r.fill == {(1, 3)} and r.cliques == (frozenset({0, 1, 3}),)


def test_states_and_weight():
    g = UGraph.from_edges(2, [(0, 1)], [2, 10])
    r = eliminate(g, [0, 1])
    assert r.states == 20 + 10
    assert math.isclose(r.log_weight, math.log10(30))


@given(graph_and_order())
def test_fill_matches_path_oracle(case):
    g, order = case
    assert set(eliminate(g, order).fill) == fill_oracle(g, order)


@given(graphs())
def test_full_elimination_output_is_chordal(g):
    order = list(reversed(g.nodes))
    r = eliminate(g, order)
    assert is_chordal(r.filled(g))
    assert r.maxclique == max(len(c) for c in r.cliques)
    assert not (set(r.fill) & g.edge_set())


# chordality and cliques ----------------------------------------------------------

def test_mcs_examples():
    tri = UGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert mcs(tri)[1]
    assert not mcs(cycle(4))[1]
    assert mcs(UGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]))[1]


@given(graphs(max_nodes=8))
def test_mcs_agrees_with_networkx(g):
    assert is_chordal(g) == nx.is_chordal(to_nx(g))


@given(graphs(max_nodes=8))
def test_perfect_order_has_zero_fill(g):
    filled = eliminate(g, g.nodes).filled(g)
    order, chordal = mcs(filled)
    assert chordal
    assert eliminate(filled, order).fill == frozenset()
    assert fill_oracle(filled, order) == set()


def test_maximal_cliques_examples():
    tri = UGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert maximal_cliques(tri) == [frozenset({0, 1, 2})]
    assert maximal_cliques(path(3)) == [frozenset({0, 1}), frozenset({1, 2})]
    chorded = UGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)])
    got = set(maximal_cliques(chorded))
    assert got == {frozenset({0, 1, 3}), frozenset({1, 2, 3})}
    assert got == {frozenset(c) for c in nx.find_cliques(to_nx(chorded))}
    with pytest.raises(GraphError):
        maximal_cliques(cycle(4))


@given(graphs(max_nodes=8))
def test_maximal_cliques_cover_and_antichain(g):
    filled = eliminate(g, g.nodes).filled(g)
    cl = maximal_cliques(filled)
    assert {frozenset(c) for c in nx.find_cliques(to_nx(filled))} == set(cl)
    for u, v in filled.edges():
        assert any(u in c and v in c for c in cl)
    assert not any(a < b for a in cl for b in cl)


def test_prune_cliques_drops_subsets_and_duplicates():
    assert prune_cliques([{1, 2}, {1, 2, 3}, {1, 2}, {4}]) == [frozenset({1, 2, 3}), frozenset({4})]


def test_log_weight_examples():
    g = UGraph.from_edges(3, [], [2, 10, 10])
    assert math.isclose(log_weight([{0, 1}], g), math.log10(20))
    assert math.isclose(log_weight([{1}, {2}], g), math.log10(20))
    with pytest.raises(GraphError):
        log_weight([], g)


def test_hourglass_k1_weight_by_enumeration():
    u = unroll(fixture("hourglass"), 1)
    g = u.moral()
    filled = eliminate(g, g.nodes).filled(g)
    cl = maximal_cliques(filled)
    total = sum(math.prod(g.card(v) for v in c) for c in cl)
    assert math.isclose(log_weight(cl, filled), math.log10(total))
    # P: A-B-E triangle and E-C, E-D; the seam couples C, D to A', B'
    assert max(len(c) for c in cl) == 3


def test_dump_and_dot():
    g = path(2)
    assert "0@0 -- 1@0" in g.dump()
    dot = g.to_dot({0})
    assert dot.startswith("graph G {") and "fillcolor" in dot
