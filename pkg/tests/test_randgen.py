import pytest
from hypothesis import given, settings, strategies as st

from dyntri.randgen import GenParams, backward_edge_count, generate
from dyntri.template import unroll, validate


def test_determinism():
    p = GenParams(10, allow_backward=True, seed=42)
    assert generate(p) == generate(p)
    assert generate(p) != generate(GenParams(10, allow_backward=True, seed=43))


@given(st.integers(0, 2**63 - 1), st.sampled_from([5, 10, 15, 20]))
def test_forward_only_regime(seed, n):
    t = generate(GenParams(n, seed=seed))
    assert backward_edge_count(t) == 0


@given(st.integers(0, 10_000))
def test_five_variables_per_frame(seed):
    t = generate(GenParams(5, seed=seed, allow_backward=True))
    for frame in (0, 1, 3):
        cards = [v.card for v in t.variables if v.frame == frame]
        assert len(cards) == 5
        assert all(2 <= c <= 50 for c in cards)


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.sampled_from([5, 10]), st.booleans())
def test_valid_and_acyclic(seed, n, backward):
    t = generate(GenParams(n, allow_backward=backward, seed=seed))
    assert validate(t) == []
    for k in range(1, 6):
        assert unroll(t, k).graph.find_cycle() is None


def test_backward_regime_produces_backward_edges():
    counts = [backward_edge_count(generate(GenParams(10, allow_backward=True, seed=s))) for s in range(10)]
    assert sum(counts) > 0


def test_density_is_shared():
    p = GenParams(10)
    assert p.density() == pytest.approx(0.15)
    assert GenParams(5, edge_density=0.4).density() == 0.4


def test_bad_parameters():
    for p in (GenParams(0), GenParams(5, card_range=(1, 5)), GenParams(5, edge_density=1.5)):
        with pytest.raises(ValueError):
            generate(p)


def test_chunk_is_connected():
    t = generate(GenParams(8, edge_density=0.0, seed=1))
    names = {v.name for v in t.variables if v.frame == 1}
    intra = {(a[0], b[0]) for a, b in t.edges if a[1] == b[1] == 1}
    assert len(intra) == len(names) - 1
