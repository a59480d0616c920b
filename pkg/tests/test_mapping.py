from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hrgnf.errors import CapExceeded
from hrgnf.mapping import (
    PartialBijection,
    compose,
    count_formula,
    enumerate_partial_bijections,
    from_pairs,
    identity,
)

F3 = from_pairs(3, [(1, 2), (2, 3)])
G3 = from_pairs(3, [(1, 3)])
G2 = from_pairs(3, [(1, 2), (2, 3)])


def brute_force_count(t: int) -> int:
    """Count maps [1,t] -> [1,t] + {undefined} that are injective where defined."""
    n = 0
    for images in product([None, *range(1, t + 1)], repeat=t):
        defined = [j for j in images if j is not None]
        if len(defined) == len(set(defined)):
            n += 1
    return n


def test_rejects_non_injective():
    with pytest.raises(ValueError):
        from_pairs(3, [(1, 2), (2, 2)])
    with pytest.raises(ValueError):
        from_pairs(3, [(1, 2), (1, 3)])
    with pytest.raises(ValueError):
        from_pairs(2, [(1, 3)])


def test_compose_examples():
    assert compose(identity(3), F3) == F3
    assert compose(G3, F3) == PartialBijection(3, ())
    assert compose(G2, F3) == G3
    assert compose(F3, identity(3)) == F3


def test_compose_size_mismatch():
    with pytest.raises(ValueError):
        compose(identity(2), identity(3))


def test_identity():
    assert identity(0).pairs == () and identity(0).t == 0
    assert identity(3).as_dict() == {1: 1, 2: 2, 3: 3}
    assert identity(3).is_total()


def test_fragment_round_trip():
    assert F3.fragment() == "1-2_2-3"
    assert PartialBijection(3, ()).fragment() == "0"
    for f in enumerate_partial_bijections(3):
        assert PartialBijection.parse_fragment(3, f.fragment()) == f


@pytest.mark.parametrize("t,expected", [(0, 1), (1, 2), (2, 7), (3, 34), (4, 209)])
def test_enumeration_counts(t, expected):
    maps = enumerate_partial_bijections(t)
    assert len(maps) == expected == count_formula(t)
    assert len(set(maps)) == len(maps)


@pytest.mark.parametrize("t", [0, 1, 2, 3])
def test_formula_matches_brute_force(t):
    assert count_formula(t) == brute_force_count(t)


def test_enumeration_order_and_cap():
    maps = enumerate_partial_bijections(2)
    assert [m.fragment() for m in maps] == ["0", "1-1", "1-2", "2-1", "2-2", "1-1_2-2", "1-2_2-1"]
    with pytest.raises(CapExceeded):
        enumerate_partial_bijections(5)
    assert len(enumerate_partial_bijections(5, cap=5)) == count_formula(5)


maps3 = st.sampled_from(enumerate_partial_bijections(3))


@given(maps3, maps3, maps3)
def test_compose_associative(f, g, h):
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)


@given(maps3)
def test_identity_is_unit(f):
    assert compose(identity(3), f) == f == compose(f, identity(3))


@given(maps3, maps3)
def test_compose_domain(f, g):
    gf = compose(g, f)
    assert len(gf) <= min(len(f), len(g))
    assert gf.dom == {i for i in f.dom if f(i) in g.dom}
    for i in gf.dom:
        assert gf(i) == g(f(i))
