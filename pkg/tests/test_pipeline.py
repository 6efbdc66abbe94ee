import math

import pytest

from dyntri.engine import EngineSettings
from dyntri.graph import eliminate, is_chordal, maximal_cliques
from dyntri.pipeline import K_VIRTUAL, run_pipeline, score_unrolled, triangulate_repartition
from dyntri.repartition import partition
from dyntri.template import FIXTURES, fixture


def test_chain_defaults():
    res = run_pipeline(fixture("chain"), k=3)
    assert res.tt.maxclique == 2
    assert all(res.tt.verify(3).values())
    assert res.to_dict()["triangulation"]["assembled"]["maxclique"] == 2


def test_hourglass_verification():
    res = run_pipeline(fixture("hourglass"), k=2)
    assert all(res.tt.verify(2).values())


def test_ladder_maxclique():
    res = run_pipeline(fixture("ladder"))
    assert res.tt.maxclique == 3
    assert res.tt.assemble(5).maxclique == 3


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("basic", [False, True])
def test_fixtures_verify(name, basic):
    tt = run_pipeline(fixture(name), 1, 1, basic=basic).tt
    for k in (0, 1, 2, 5):
        assert all(tt.verify(k).values()), (name, k)


def test_assembly_weight_by_enumeration():
    tt = run_pipeline(fixture("hourglass")).tt
    a = tt.assemble(2)
    cl = maximal_cliques(a.filled)
    total = sum(math.prod(a.graph.card(v) for v in c) for c in cl)
    assert a.states == total


@pytest.mark.parametrize("name", ["chain", "hourglass", "xy"])
def test_virtual_matches_materialised(name):
    tt = run_pipeline(fixture(name), 1, 1).tt
    for k in (4, 7, 10):
        assert math.isclose(tt.log_weight(k), tt.assemble(k).log_weight, abs_tol=1e-9)


def test_boundary_weight_not_worse_than_basic():
    t = fixture("hourglass")
    basic = run_pipeline(t, basic=True).tt.log_weight()
    boundary = run_pipeline(t, j="global-weight").tt.log_weight()
    assert boundary <= basic


def test_score_unrolled():
    tt = run_pipeline(fixture("chain")).tt
    mc, w = score_unrolled(tt, K_VIRTUAL)
    assert mc == 2 and w == tt.log_weight(K_VIRTUAL)


def test_anytime_settings_are_used():
    rt = partition(fixture("hourglass"), 1, 1)
    a = triangulate_repartition(rt, EngineSettings()).maxclique
    b = triangulate_repartition(rt, EngineSettings(budget=5.0)).maxclique
    assert b <= a


def test_piece_triangulations_are_chordal():
    tt = run_pipeline(fixture("multichunk"), 2, 1).tt
    for p in tt.pieces.values():
        assert is_chordal(p.filled)
        assert eliminate(p.filled, p.result.order).fill == frozenset()
