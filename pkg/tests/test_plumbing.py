"""Plumbing trees: parsing, framing data, definiteness, Neumann moves,
continued fractions, and the graph builders."""
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zhat.exactnum import det, inertia
from zhat.plumbing import (BadFraction, NeumannMove, NotApplicable, NotATree,
                           NotRepresentable, apply_neumann, canonical_form,
                           cf_value, continued_fraction, degree_vector,
                           framing_matrix, graphs_isomorphic, inverse_move,
                           is_negative_definite, is_weakly_negative_definite,
                           make_graph, parse_graph, seifert_graph,
                           serialize_graph, solid_torus_graph, standard_glue,
                           torus_knot_graph, DuplicateId, MissingDistinguished)

S3_GRAPH = make_graph([(0, -1)], [])
L83 = make_graph([(0, -3), (1, -3)], [(0, 1)])


def sigma237():
    return seifert_graph(-1, [Fraction(1, 2), Fraction(1, 3), Fraction(1, 7)])


def test_parse_single_vertex():
    g = parse_graph('{"vertices": [{"id": 0, "weight": -1}], "edges": []}')
    assert g == S3_GRAPH


def test_parse_text_format():
    g = parse_graph("v 0 -3\nv 1 -3\ne 0 1\n")
    assert g == L83
    assert parse_graph(serialize_graph(g)) == g


def test_parse_cycle_rejected():
    with pytest.raises(NotATree):
        make_graph([(0, -1), (1, -1), (2, -1)], [(0, 1), (1, 2), (2, 0)])


def test_duplicate_id_rejected():
    with pytest.raises(DuplicateId):
        make_graph([(0, -1), (0, -2)], [])


def test_framing_matrix_l83():
    m = framing_matrix(L83)
    assert m.rows == ((-3, 1), (1, -3))
    assert degree_vector(L83) == (1, 1)


def test_framing_matrix_sigma237():
    g = sigma237()
    m = framing_matrix(g)
    assert m.rows[0] == (-1, 1, 1, 1)
    assert degree_vector(make_graph([(0, -2), (1, -2), (2, -2)],
                                    [(0, 1), (1, 2)])) == (1, 2, 1)


def test_negative_definite():
    assert is_negative_definite(sigma237())
    assert not is_negative_definite(make_graph([(0, 1)], []))
    assert not is_weakly_negative_definite(make_graph([(0, 1)], []))


def test_move_c_creates_weakly_negative():
    g = sigma237()
    move = NeumannMove("c", "blow_up", (1, -1, frozenset()))
    g2 = apply_neumann(g, move)
    assert not is_negative_definite(g2)
    assert is_weakly_negative_definite(g2)


HAND_CHECKED_MOVES = [
    # ((graph data), move, expected graph data): fixtures pinning the figure
    (([(0, -2), (1, -3)], [(0, 1)]),
     NeumannMove("a_minus", "blow_up", (0, 1)),
     ([(0, -3), (1, -4), (2, -1)], [(0, 2), (2, 1)])),
    (([(0, -2), (1, -3)], [(0, 1)]),
     NeumannMove("a_plus", "blow_up", (0, 1)),
     ([(0, -1), (1, -2), (2, 1)], [(0, 2), (2, 1)])),
    (([(0, -2), (1, -3)], [(0, 1)]),
     NeumannMove("b_minus", "blow_up", 1),
     ([(0, -2), (1, -4), (2, -1)], [(0, 1), (1, 2)])),
    (([(0, -2), (1, -3)], [(0, 1)]),
     NeumannMove("b_plus", "blow_up", 1),
     ([(0, -2), (1, -2), (2, 1)], [(0, 1), (1, 2)])),
    (([(0, -5), (1, -3)], [(0, 1)]),
     NeumannMove("c", "blow_up", (0, -2, frozenset([1]))),
     ([(0, -2), (1, -3), (2, -3), (3, 0)], [(0, 1), (0, 3), (3, 2)])),
]


@pytest.mark.parametrize("before,move,after", HAND_CHECKED_MOVES)
def test_moves_against_fixtures(before, move, after):
    g = make_graph(*before)
    expect = make_graph(*after)
    assert graphs_isomorphic(apply_neumann(g, move), expect)


def test_blow_down_round_trip():
    g = S3_GRAPH
    move = NeumannMove("b_minus", "blow_up", 0)
    g2 = apply_neumann(g, move)
    g3 = apply_neumann(g2, inverse_move(g, g2, move))
    assert graphs_isomorphic(g, g3)


def test_move_c_round_trip():
    g = make_graph([(0, -5), (1, -3), (2, -2)], [(0, 1), (0, 2)])
    move = NeumannMove("c", "blow_up", (0, -1, frozenset([1])))
    g2 = apply_neumann(g, move)
    g3 = apply_neumann(g2, inverse_move(g, g2, move))
    assert graphs_isomorphic(g, g3)


def test_blow_down_protects_distinguished():
    g = make_graph([(0, -1), (1, -2)], [(0, 1)], distinguished=0)
    with pytest.raises(NotApplicable):
        apply_neumann(g, NeumannMove("b_minus", "blow_down", 0))


def random_tree(data, max_size=7, weights=(-4, -1)):
    n = data.draw(st.integers(2, max_size))
    verts = [(i, data.draw(st.integers(*weights))) for i in range(n)]
    edges = [(data.draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    return make_graph(verts, edges)


def random_move(data, g):
    kind = data.draw(st.sampled_from(["a_minus", "a_plus", "b_minus",
                                      "b_plus", "c"]))
    if kind.startswith("a"):
        edge = data.draw(st.sampled_from(sorted(tuple(sorted(e))
                                                for e in g.edges)))
        return NeumannMove(kind, "blow_up", tuple(edge))
    if kind.startswith("b"):
        return NeumannMove(kind, "blow_up", data.draw(st.sampled_from(g.ids())))
    v = data.draw(st.sampled_from(g.ids()))
    nbrs = g.neighbors(v)
    side = frozenset(u for u in nbrs if data.draw(st.booleans()))
    w1 = data.draw(st.integers(-3, 3))
    return NeumannMove("c", "blow_up", (v, w1, side))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_random_moves_invertible_and_det_preserved(data):
    g = random_tree(data)
    move = random_move(data, g)
    g2 = apply_neumann(g, move)
    g3 = apply_neumann(g2, inverse_move(g, g2, move))
    assert graphs_isomorphic(g, g3)
    d1, d2 = det(framing_matrix(g)), det(framing_matrix(g2))
    if d1 != 0:
        assert abs(d1) == abs(d2)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_weak_negative_definiteness_preserved_by_moves(data):
    g = random_tree(data, max_size=6, weights=(-4, -2))
    if det(framing_matrix(g)) == 0 or not is_weakly_negative_definite(g):
        return
    move = random_move(data, g)
    g2 = apply_neumann(g, move)
    if det(framing_matrix(g2)) != 0:
        assert is_weakly_negative_definite(g2)


def test_continued_fraction_examples():
    assert continued_fraction(-1, 2) == [-1, -2]
    assert cf_value([-1, -2]) == Fraction(-1, 2)
    assert continued_fraction(7, 1) == [7]
    assert continued_fraction(-3, 2, "all_le_minus2") == [-2, -2]
    assert cf_value([-2, -2]) == Fraction(-3, 2)


def test_continued_fraction_not_representable():
    with pytest.raises(NotRepresentable):
        continued_fraction(-1, 2, "all_le_minus2")


@settings(max_examples=150, deadline=None)
@given(st.integers(-40, 40), st.integers(1, 24))
def test_continued_fraction_evaluates_back(p, r):
    from math import gcd
    if p == 0 or gcd(p, r) != 1:
        return
    ks = continued_fraction(p, r)
    assert cf_value(ks) == Fraction(p, r)
    assert all(k <= -2 for k in ks[1:])


def test_seifert_graph_sigma237():
    g = sigma237()
    weights = sorted(w for _, w in g.vertices)
    assert weights == [-7, -3, -2, -1]
    assert g.degree(0) == 3


def test_seifert_graph_three_vertex_star():
    g = seifert_graph(-2, [Fraction(1, 2), Fraction(1, 2)])
    assert g.size() == 3
    assert sorted(w for _, w in g.vertices) == [-2, -2, -2]


def test_seifert_graph_empty_fraction_list():
    g = seifert_graph(-1, [])
    assert g.size() == 1 and g.weight(0) == -1


def test_seifert_graph_bad_fraction():
    with pytest.raises(BadFraction):
        seifert_graph(-1, [Fraction(3, 2)])


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_seifert_det_orbifold_euler(data):
    n = data.draw(st.integers(1, 3))
    b = data.draw(st.integers(-3, -1))
    fracs = []
    for _ in range(n):
        bi = data.draw(st.integers(2, 7))
        ai = data.draw(st.integers(1, bi - 1))
        from math import gcd
        if gcd(ai, bi) != 1:
            return
        fracs.append(Fraction(ai, bi))
    g = seifert_graph(b, fracs)
    dets = abs(det(framing_matrix(g)))
    prod = 1
    for f in fracs:
        prod *= f.denominator
    expected = abs(b * prod + sum(f.numerator * prod // f.denominator
                                  for f in fracs))
    assert dets == expected


def test_torus_knot_graph_23():
    g = torus_knot_graph(2, 3)
    assert g.weight(g.distinguished) == -6
    assert g.degree(g.distinguished) == 1
    assert sorted(w for _, w in g.vertices) == [-6, -3, -2, -1]
    assert det(framing_matrix(g)) == 0


def test_torus_knot_graph_34():
    g = torus_knot_graph(3, 4)
    assert g.weight(g.distinguished) == -12
    assert sorted(w for _, w in g.vertices) == [-12, -4, -2, -2, -1]


@pytest.mark.parametrize("s,t", [(2, 5), (3, 5), (4, 5)])
def test_torus_knot_graph_seifert_framing_degenerate(s, t):
    assert det(framing_matrix(torus_knot_graph(s, t))) == 0


def test_solid_torus_graphs():
    g = solid_torus_graph(-1, 1)
    assert g.size() == 1 and g.weight(0) == -1 and g.distinguished == 0
    g = solid_torus_graph(-1, 3)
    assert [g.weight(v) for v in g.ids()] == [-1, -2, -2]
    g = solid_torus_graph(7, 1)
    assert g.size() == 1 and g.weight(0) == 7


def test_standard_glue_trefoil_plus_minus_one():
    g = standard_glue(torus_knot_graph(2, 3), solid_torus_graph(-1, 1))
    assert graphs_isomorphic(g, sigma237())
    assert g.distinguished is None


def test_standard_glue_trefoil_minus_half():
    g = standard_glue(torus_knot_graph(2, 3), solid_torus_graph(-1, 2))
    assert abs(det(framing_matrix(g))) == 1
    assert sorted(w for _, w in g.vertices) == [-7, -3, -2, -2, -1]


def test_standard_glue_single_vertices():
    a = make_graph([(0, -3)], [], distinguished=0)
    b = make_graph([(0, 5)], [], distinguished=0)
    g = standard_glue(a, b)
    assert g.size() == 1 and g.weight(g.ids()[0]) == 2


def test_standard_glue_needs_distinguished():
    with pytest.raises(MissingDistinguished):
        standard_glue(S3_GRAPH, solid_torus_graph(-1, 1))
