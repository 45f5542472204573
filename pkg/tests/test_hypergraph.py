import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgnoise.hypergraph import (
    BoolPoly,
    Hypergraph,
    build_k4,
    build_union_jack,
    directional_derivative,
    evaluate,
    evaluate_all,
    higher_derivative,
    max_vertex_neighbors,
    neighborhood,
    poly_from_graph,
    union_jack_size,
    vertex_degree,
    vertex_neighbor_count,
)


def mono(*vs):
    return sum(1 << (v - 1) for v in vs)


def test_k4_polynomial():
    p = poly_from_graph(build_k4())
    assert p.monomials == {mono(1, 2, 3), mono(1, 2, 4), mono(1, 3, 4), mono(2, 3, 4)}
    assert str(p) == "x1x2x3 + x1x2x4 + x1x3x4 + x2x3x4"
    assert p.degree == 3


def test_empty_and_single_edge():
    assert poly_from_graph(Hypergraph.from_edges(3, [])).is_zero()
    assert str(poly_from_graph(Hypergraph.from_edges(2, [(0, 1)]))) == "x1x2"


def test_duplicate_edges_cancel():
    g = Hypergraph.from_edges(3, [(0, 1, 2), (2, 1, 0), (0, 1)])
    assert g.edges == {0b011}
    assert g.k_max == 2


def test_invalid_edges():
    with pytest.raises(ValueError):
        Hypergraph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        Hypergraph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Hypergraph.from_edges(33, [])


def test_evaluate():
    p = BoolPoly.from_monomials(3, [mono(1, 2, 3)])
    assert evaluate(p, 0b111) == 1
    k4 = poly_from_graph(build_k4())
    assert evaluate(k4, 0) == 0
    assert evaluate(k4, 0b0111) == 1  # x1=x2=x3=1: one monomial active
    assert evaluate(k4, 0b1111) == 0


def test_derivative_examples():
    p = BoolPoly.from_monomials(3, [mono(1, 2, 3)])
    assert directional_derivative(p, 0b001).monomials == {mono(2, 3)}
    k4 = poly_from_graph(build_k4())
    assert directional_derivative(k4, 0).is_zero()
    # shift "1000" written qubit-1 first, i.e. mask with only bit 0 set
    assert directional_derivative(k4, 0b0001).monomials == {mono(2, 3), mono(2, 4), mono(3, 4)}


def test_higher_derivative():
    p = BoolPoly.from_monomials(3, [mono(1, 2, 3)])
    assert higher_derivative(p, [0b001, 0b010]).monomials == {mono(3)}
    assert higher_derivative(p, [0b001, 0]).is_zero()
    assert higher_derivative(p, [0b011, 0b110]).degree <= 1
    with pytest.raises(ValueError):
        higher_derivative(p, [])


@st.composite
def polys(draw, n=st.integers(1, 8)):
    n = draw(n)
    monos = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=12))
    return BoolPoly.from_monomials(n, monos)


@settings(max_examples=60, deadline=None)
@given(polys(), st.data())
def test_derivative_matches_evaluation(p, data):
    s = data.draw(st.integers(0, (1 << p.n) - 1))
    xs = np.arange(1 << p.n)
    lhs = evaluate_all(p, xs ^ s) ^ evaluate_all(p, xs)
    assert np.array_equal(lhs, evaluate_all(directional_derivative(p, s), xs))


@settings(max_examples=60, deadline=None)
@given(polys(n=st.just(6)), polys(n=st.just(6)), st.integers(0, 63))
def test_derivative_additive(p, q, s):
    assert directional_derivative(p + q, s) == directional_derivative(p, s) + directional_derivative(q, s)


@settings(max_examples=60, deadline=None)
@given(polys(), st.data())
def test_double_derivative_vanishes(p, data):
    s = data.draw(st.integers(0, (1 << p.n) - 1))
    assert higher_derivative(p, [s, s]).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8), st.data())
def test_cubic_derivative_is_quadratic(n, data):
    edges = data.draw(st.lists(st.lists(st.integers(0, n - 1), min_size=3, max_size=3, unique=True), max_size=8))
    g = Hypergraph.from_edges(n, edges)
    s = data.draw(st.integers(1, (1 << n) - 1))
    assert directional_derivative(poly_from_graph(g), s).degree <= 2


def test_exhaustive_linearity_small(rng):
    n = 5
    p = BoolPoly.from_monomials(n, rng.integers(0, 1 << n, size=10).tolist())
    xs = np.arange(1 << n)
    for s in range(1 << n):
        assert np.array_equal(evaluate_all(p, xs ^ s) ^ evaluate_all(p, xs), evaluate_all(directional_derivative(p, s), xs))


def test_degrees_and_neighborhoods():
    k4 = build_k4()
    assert vertex_degree(k4, 0) == 3
    assert neighborhood(k4, [0]) == {0, 1, 2, 3}
    assert vertex_degree(Hypergraph.from_edges(3, []), 1) == 0
    assert neighborhood(Hypergraph.from_edges(3, []), [1]) == set()
    with pytest.raises(ValueError):
        vertex_degree(k4, 4)


def test_union_jack_shapes():
    tile = build_union_jack(1, 1)
    assert tile.n == 5 and len(tile.edges) == 4
    assert all(e.bit_count() == 3 for e in tile.edges)
    g = build_union_jack(2, 3)
    assert g.n == 18 == union_jack_size(2, 3)
    assert len(g.edges) == 24
    assert all(e.bit_count() == 3 for e in g.edges)
    with pytest.raises(ValueError):
        build_union_jack(0, 2)


def test_union_jack_overflow():
    assert union_jack_size(3, 4) == 32
    build_union_jack(3, 4)
    with pytest.raises(ValueError):
        build_union_jack(4, 4)


def test_union_jack_bounded_degree():
    # interior corner: 8 triangles, centre: 4; independent of lattice size
    degs = [max(vertex_degree(g, v) for v in range(g.n)) for g in (build_union_jack(2, 2), build_union_jack(3, 4))]
    assert degs == [8, 8]
    assert max_vertex_neighbors(build_union_jack(2, 2)) == max_vertex_neighbors(build_union_jack(3, 4)) == 8
    g = build_union_jack(3, 3)
    centre = (4 * 4) + 1 * 3 + 1
    assert vertex_degree(g, centre) == 4
    assert vertex_neighbor_count(g, centre) == 4


def test_json_roundtrip():
    g = build_union_jack(1, 2)
    data = json.loads(json.dumps(g.to_json()))
    assert min(min(e) for e in data["edges"]) == 1
    assert Hypergraph.from_json(data) == g
