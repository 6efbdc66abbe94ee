"""Hypothesis strategies shared by the property tests."""

import itertools

from hypothesis import strategies as st

from dyntri.graph import UGraph


@st.composite
def graphs(draw, max_nodes=9, min_nodes=1):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    cards = draw(st.lists(st.integers(2, 6), min_size=n, max_size=n))
    return UGraph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep], cards)


@st.composite
def graph_and_order(draw, max_nodes=9):
    g = draw(graphs(max_nodes))
    order = draw(st.permutations(g.nodes))
    cut = draw(st.integers(0, len(order)))
    return g, list(order[:cut])
