import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from dyntri.graph import UGraph, moralize
from dyntri.randgen import GenParams, generate
from dyntri.repartition import (RepartitionError, admissible_lengths, basic_partition, check_separation,
                                l_cut, make_cut, partition, shift_key, window_cut)
from dyntri.template import FIXTURES, fixture


def labelled(g: UGraph) -> nx.Graph:
    h = nx.Graph()
    for v in g.nodes:
        h.add_node(v, name=g.info[v].name, frame=g.info[v].frame)
    h.add_edges_from(g.edges())
    return h


def same_frames(a, b):
    return a["name"] == b["name"] and a["frame"] == b["frame"]


def test_chain_repartition_is_identity_shaped():
    rt = partition(fixture("chain"), 1, 1)
    d = rt.to_dict()
    # nothing is passed, so the cut sits where the original chunk starts
    assert d["nodes"] == {"P'": 1, "C'": 1, "E'": 2}
    assert d["left_interface"] == ["A@1"]
    assert d["right_interface"] == ["A@2"]


def test_hourglass_bookkeeping():
    t = fixture("hourglass")
    rt = partition(t, 1, 1)
    assert (len(rt.p_prime), len(rt.c_prime), len(rt.e_prime)) == (7, 5, 8)
    assert len(rt.p_prime) + len(rt.c_prime) + len(rt.e_prime) == len(rt.canonical.graph) == 20
    assert rt.labels(rt.left_interface) == ["E@4"]
    passed = l_cut(window_cut(rt.boundary), rt.boundary.window.core)
    old_p = {k for k in rt.p_prime if k[0] == "P"}
    assert {rt.boundary.window.key(v) for v in passed} == rt.p_prime - old_p


def test_admissible_lengths():
    chain = admissible_lengths(1, 1, 1, 1, 1)
    assert [n for n in range(8) if chain(n)] == [3, 4, 5, 6, 7]
    ok = admissible_lengths(1, 1, 1, 3, 2)
    assert [n for n in range(14) if ok(n)] == [5, 7, 9, 11, 13]
    rt = partition(fixture("hourglass"), 3, 2)
    assert rt.formula() == "T = 3 + (3 + k*2)*3 + 3, k >= 0"
    assert rt.k_for(3 + 7 * 3 + 3) == 2
    with pytest.raises(RepartitionError):
        rt.k_for(3 + 4 * 3 + 3)


def test_instances():
    rt = partition(fixture("chain"), 2, 1)
    assert rt.instances(3) == [("P", 0, 0), ("C", 1, 0), ("C", 2, 1), ("C", 3, 2), ("E", 0, 2)]
    assert rt.count(3) == 5
    with pytest.raises(RepartitionError):
        rt.count(-1)


def test_shift_key():
    assert shift_key(("C", 1, 4), 2) == ("C", 3, 4)
    assert shift_key(("P", 0, 1), 3) == ("P", 0, 1)


def test_make_cut_requires_disconnection():
    g = UGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    cut = make_cut(g, [(1, 2)], g.nodes, [0], [3])
    assert cut.left_nodes == {0, 1} and cut.right_nodes == {2, 3}
    with pytest.raises(RepartitionError):
        make_cut(g, [(0, 1)], g.nodes, [0, 1], [3])


def test_bad_parameters():
    with pytest.raises(RepartitionError):
        partition(fixture("chain"), 0, 1)
    with pytest.raises(ValueError):
        partition(fixture("chain"), 1, 1, j="volume")
    with pytest.raises(ValueError):
        partition(fixture("chain"), 1, 1, direction="up")


def test_basic_partition_keeps_initial_interface():
    rt = basic_partition(fixture("hourglass"))
    assert len(rt.left_interface) == 2
    assert rt.boundary.states_visited == 1


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("m,s", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)])
@pytest.mark.parametrize("direction", ["left", "right"])
def test_reunroll_is_exact(name, m, s, direction):
    rt = partition(fixture(name), m, s, direction=direction)
    for k in (0, 1, 2, 3):
        assert rt.is_isomorphic(k)
        assert check_separation(rt, k)


@pytest.mark.parametrize("name", FIXTURES)
def test_reunroll_isomorphic_with_networkx(name):
    rt = partition(fixture(name), 2, 1, direction="best")
    for k in (1, 2):
        g, _ = rt.unroll_new(k)
        new = labelled(moralize(g))
        old = labelled(rt.source_unrolled(rt.count(k)).moral())
        assert nx.is_isomorphic(new, old, node_match=same_frames)


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.booleans(), st.sampled_from([(1, 1), (2, 1), (2, 2)]))
def test_reunroll_random(seed, backward, ms):
    rt = partition(generate(GenParams(5, allow_backward=backward, seed=seed)), *ms, direction="best")
    for k in (0, 1, 3):
        assert rt.is_isomorphic(k)
        assert check_separation(rt, k)


def test_piece_graphs_cover_pieces():
    rt = partition(fixture("hourglass"), 1, 1)
    for piece in "PCE":
        g = rt.piece_graph(piece)
        assert set(g.nodes) == rt.piece_ids(rt.piece_nodes(piece) | rt.piece_right(piece))
